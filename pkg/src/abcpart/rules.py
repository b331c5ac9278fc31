"""Rule names, parsing and a single entry point computing outcomes."""

from __future__ import annotations

from dataclasses import dataclass

from abcpart import sequential
from abcpart.errors import BadScoring
from abcpart.model import ElectionInstance, Outcome
from abcpart.scoring import (DEFAULT_MAX_SUBSETS, ScoringFunction, builtin_scoring,
                             elect_scoring, general_scoring, satisfaction_scoring,
                             thiele_scoring)

SCORING_NAMES = ("av", "pav", "ccav", "sav")
SEQUENTIAL_NAMES = ("seqav", "seqpav", "seqccav", "phragmen", "mes", "mes:phase1")


@dataclass(frozen=True)
class ScoringRule:
    """Non-sequential ABC scoring rule.

    ``s`` may be ``None`` for the built-in families, which are instantiated
    for the committee size at hand.
    """

    family: str
    s: ScoringFunction = None

    def scoring_for(self, instance: ElectionInstance) -> ScoringFunction:
        if self.s is not None:
            return self.s
        if self.family == "sav":
            return satisfaction_scoring(instance.profile.max_ballot_size())
        return builtin_scoring(self.family, max(instance.k, 1))

    @property
    def label(self):
        return self.family if self.s is None else f"{self.family}[{self.s.name}]"


@dataclass(frozen=True)
class SeqThieleFamily:
    """Sequential Thiele rule whose weights are instantiated per committee size."""

    family: str

    def process(self, profile, k):
        return sequential.ThieleProcess(profile, k, builtin_scoring(self.family, k))

    @property
    def label(self):
        return "seq" + self.family


def parse_rule(text: str, thiele_loader=None, table_loader=None):
    """Turn a rule name such as ``seqpav`` or ``thiele:weights.txt`` into a rule object.

    Loaders for weight files default to :mod:`abcpart.io`.
    """
    from abcpart import io

    thiele_loader = thiele_loader or io.read_thiele_weights
    table_loader = table_loader or io.read_general_table
    name = text.strip()
    low = name.lower()
    if low in ("av", "pav", "ccav", "sav"):
        return ScoringRule(low)
    if low in ("seqav", "seqpav", "seqccav"):
        return SeqThieleFamily(low[3:])
    if low == "phragmen":
        return sequential.SeqPhragmen()
    if low == "mes":
        return sequential.Mes()
    if low == "mes:phase1":
        return sequential.Mes(phase1_only=True)
    if ":" in name:
        kind, path = name.split(":", 1)
        kind = kind.lower()
        if kind == "thiele":
            return ScoringRule("thiele", thiele_scoring(thiele_loader(path), path))
        if kind == "general":
            return ScoringRule("general", general_scoring(table_loader(path), path))
        if kind == "seqthiele":
            return sequential.SeqThiele(thiele_scoring(thiele_loader(path), path))
    raise BadScoring(f"unknown rule {text!r}")


def is_sequential(rule) -> bool:
    return hasattr(rule, "process")


def compute_outcome(rule, instance: ElectionInstance, max_subsets=DEFAULT_MAX_SUBSETS,
                    max_branches=sequential.DEFAULT_MAX_BRANCHES, on_step=None) -> Outcome:
    if is_sequential(rule):
        return sequential.enumerate_outcomes(rule, instance, max_branches=max_branches,
                                             on_step=on_step)
    return elect_scoring(instance, rule.scoring_for(instance), max_subsets=max_subsets)


def rule_label(rule) -> str:
    return getattr(rule, "label", type(rule).__name__)
