"""Kelly comparisons and abstention analysis."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from abcpart.errors import AllVotersAbstain, InvariantError
from abcpart.model import ElectionInstance, Outcome, abstain_many, normalize_profile
from abcpart.rules import compute_outcome

STRICT, WEAK, NONE = "strict", "weak", "none"


def kelly_compare(x: Outcome, y: Outcome, ballot) -> str:
    """Compare outcome ``x`` against ``y`` for a voter with approval set ``ballot``.

    ``weak`` when every committee of ``x`` contains at least as many approved
    candidates as every committee of ``y``; ``strict`` when additionally some
    pair differs.
    """
    ballot = frozenset(ballot)
    xs = [len(w & ballot) for w in x.committees]
    ys = [len(w & ballot) for w in y.committees]
    if min(xs) < max(ys):
        return NONE
    return STRICT if max(xs) > min(ys) else WEAK


def _approvals(outcome: Outcome, ballot) -> tuple:
    return tuple(len(frozenset(w) & ballot) for w in outcome)


@dataclass(frozen=True)
class AbstentionWitness:
    """Abstainers together with the outcomes with and without them.

    ``abstainers`` lists ``(group, count)`` pairs indexing the original
    profile; the approval tuples follow the canonical committee order.
    """

    abstainers: tuple
    ballots: tuple
    outcome_before: Outcome
    outcome_after: Outcome
    approvals_before: tuple
    approvals_after: tuple

    def to_dict(self, labels=None) -> dict:
        name = (lambda c: labels[c]) if labels else (lambda c: c)
        return {
            "abstainers": [{"group": g, "count": c} for g, c in self.abstainers],
            "ballots": [sorted(name(c) for c in b) for b in self.ballots],
            "outcome_before": [[name(c) for c in w] for w in self.outcome_before.canonical()],
            "outcome_after": [[name(c) for c in w] for w in self.outcome_after.canonical()],
            "approvals_before": [list(a) for a in self.approvals_before],
            "approvals_after": [list(a) for a in self.approvals_after],
        }


def _without(instance: ElectionInstance, abstainers) -> ElectionInstance:
    total = sum(c for _, c in abstainers)
    if total >= instance.profile.n:
        raise AllVotersAbstain("at least one voter has to remain")
    return ElectionInstance(abstain_many(instance.profile, abstainers), instance.k)


def group_benefits(rule, instance: ElectionInstance, groups, before: Outcome = None,
                   **caps) -> Optional[AbstentionWitness]:
    """Witness if the abstainers all weakly and one strictly prefer abstaining."""
    groups = tuple(sorted(_merge(groups)))
    after_instance = _without(instance, groups)
    if before is None:
        before = compute_outcome(rule, instance, **caps)
    after = compute_outcome(rule, after_instance, **caps)
    ballots = tuple(instance.profile.groups[g].ballot for g, _ in groups)
    verdicts = [kelly_compare(after, before, b) for b in ballots]
    if NONE in verdicts or STRICT not in verdicts:
        return None
    return AbstentionWitness(
        groups, ballots, before, after,
        tuple(_approvals(before, b) for b in ballots),
        tuple(_approvals(after, b) for b in ballots),
    )


def _merge(groups):
    totals = {}
    for g, c in groups:
        if c < 1:
            raise InvariantError("abstainer counts must be positive")
        totals[g] = totals.get(g, 0) + c
    return totals.items()


def benefits_by_abstaining(rule, instance: ElectionInstance, group: int, count: int = 1,
                           before: Outcome = None, **caps) -> Optional[AbstentionWitness]:
    return group_benefits(rule, instance, [(group, count)], before, **caps)


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def scan_participation(rule, instance: ElectionInstance, threads: int = 1, groups=None,
                       **caps) -> list:
    """Witnesses for single-voter abstentions, in group order."""
    before = compute_outcome(rule, instance, **caps)
    n = instance.profile.n
    if groups is None:
        groups = range(len(instance.profile.groups))
    candidates = [g for g in groups if n > 1]

    def check(g):
        return benefits_by_abstaining(rule, instance, g, 1, before, **caps)

    return [w for w in _map(check, candidates, threads) if w is not None]


def abstainer_multisets(instance: ElectionInstance, max_total: int):
    """All ``(group, count)`` combinations with total count 1..max_total.

    Coalitions containing every voter are skipped.
    """
    weights = [g.weight for g in instance.profile.groups]
    n = sum(weights)
    for size in range(1, max_total + 1):
        if size >= n:
            break
        for combo in itertools.combinations_with_replacement(range(len(weights)), size):
            counts = {}
            for g in combo:
                counts[g] = counts.get(g, 0) + 1
            if all(counts[g] <= weights[g] for g in counts):
                yield tuple(sorted(counts.items()))


def scan_group_participation(rule, instance: ElectionInstance, max_total: int = 3,
                             threads: int = 1, **caps) -> list:
    before = compute_outcome(rule, instance, **caps)

    def check(groups):
        return group_benefits(rule, instance, groups, before, **caps)

    return [w for w in _map(check, list(abstainer_multisets(instance, max_total)), threads)
            if w is not None]


def unrepresented_groups(outcome: Outcome, instance: ElectionInstance) -> list:
    return [i for i, g in enumerate(instance.profile.groups)
            if any(not (w & g.ballot) for w in outcome.committees)]


def unrepresented_check(rule, instance: ElectionInstance, **caps) -> Optional[AbstentionWitness]:
    """First witness among voters left without an approved candidate in some winning committee."""
    before = compute_outcome(rule, instance, **caps)
    if instance.profile.n < 2:
        return None
    for g in unrepresented_groups(before, instance):
        w = benefits_by_abstaining(rule, instance, g, 1, before, **caps)
        if w is not None:
            return w
    return None


def is_outcome(rule, instance: ElectionInstance, claimed, **caps) -> bool:
    claimed = frozenset(frozenset(w) for w in claimed)
    for w in claimed:
        if len(w) != instance.k or not all(0 <= c < instance.m for c in w):
            raise InvariantError(f"malformed committee {sorted(w)}")
    return compute_outcome(rule, instance, **caps).committees == claimed


def max_approvals(outcome: Outcome, ballot) -> int:
    ballot = frozenset(ballot)
    return max(len(w & ballot) for w in outcome.committees)


def max_approvals_for(rule, instance: ElectionInstance, group: int, **caps) -> int:
    outcome = compute_outcome(rule, instance, **caps)
    return max_approvals(outcome, instance.profile.groups[group].ballot)


@dataclass(frozen=True)
class ApprovalChange:
    group: int
    candidate: int
    action: str
    outcome_before: Outcome
    outcome_after: Outcome

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "candidate": self.candidate,
            "action": self.action,
            "outcome_before": [list(w) for w in self.outcome_before.canonical()],
            "outcome_after": [list(w) for w in self.outcome_after.canonical()],
        }


def modify_single_approval(instance: ElectionInstance, group: int, candidate: int) -> ElectionInstance:
    """Toggle ``candidate`` on the ballot of one voter of ``group``."""
    profile = instance.profile
    raw = []
    for i, g in enumerate(profile.groups):
        if i != group:
            raw.append((g.ballot, g.weight))
            continue
        if g.weight > 1:
            raw.append((g.ballot, g.weight - 1))
        raw.append((g.ballot ^ {candidate}, 1))
    return ElectionInstance(normalize_profile(raw, profile.m, profile.labels), instance.k)


def single_approval_robustness(rule, instance: ElectionInstance, **caps) -> Optional[ApprovalChange]:
    """First single added or deleted approval that changes the outcome."""
    before = compute_outcome(rule, instance, **caps)
    for i, g in enumerate(instance.profile.groups):
        for c in range(instance.m):
            if c in g.ballot and len(g.ballot) == 1:
                continue
            after = compute_outcome(rule, modify_single_approval(instance, i, c), **caps)
            if after.committees != before.committees:
                action = "delete" if c in g.ballot else "add"
                return ApprovalChange(i, c, action, before, after)
    return None


def witness_summary(w: AbstentionWitness) -> str:
    parts = [f"abstainers={list(w.abstainers)}"]
    parts.append(f"approvals before={list(w.approvals_before)} after={list(w.approvals_after)}")
    return " ".join(parts)


__all__ = [
    "kelly_compare", "AbstentionWitness", "group_benefits", "benefits_by_abstaining",
    "scan_participation", "scan_group_participation", "abstainer_multisets",
    "unrepresented_check", "unrepresented_groups", "is_outcome", "max_approvals",
    "max_approvals_for", "single_approval_robustness", "modify_single_approval",
    "ApprovalChange",
]
