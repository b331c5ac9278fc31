"""Exact approval-based committee elections and participation analysis."""

from abcpart.errors import AbcError
from abcpart.kernels import BACKEND
from abcpart.model import (BallotGroup, ElectionInstance, Outcome, Profile, abstain,
                           abstain_many, approval_scores, fmt_rational, normalize_profile)
from abcpart.rules import compute_outcome, parse_rule
from abcpart.scoring import ScoringFunction, builtin_scoring, committee_score, elect_scoring
from abcpart.sequential import Mes, QueryRule, SeqPhragmen, SeqThiele, enumerate_outcomes

__all__ = [
    "AbcError", "BACKEND", "BallotGroup", "ElectionInstance", "Outcome", "Profile", "abstain",
    "abstain_many", "approval_scores", "fmt_rational", "normalize_profile", "compute_outcome",
    "parse_rule", "ScoringFunction", "builtin_scoring", "committee_score", "elect_scoring",
    "Mes", "QueryRule", "SeqPhragmen", "SeqThiele", "enumerate_outcomes",
]
