"""Election data model: weighted approval profiles, instances and outcomes.

A profile stores one :class:`BallotGroup` per distinct ballot.  Every rule in
this package depends on the ballots only through their multiplicities, so a
voter is addressed by the index of her group and abstention decrements the
group weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from abcpart.errors import BadCandidate, EmptyBallot, InvariantError, TooManyAbstainers

Committee = frozenset


def fmt_rational(x) -> str:
    """Render an exact quantity as ``p/q``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class BallotGroup:
    ballot: frozenset
    weight: int

    def __post_init__(self):
        if not self.ballot:
            raise EmptyBallot("approval ballots must be non-empty")
        if self.weight < 1:
            raise InvariantError(f"group weight must be positive, got {self.weight}")

    def sort_key(self):
        return tuple(sorted(self.ballot))


@dataclass(frozen=True)
class Profile:
    m: int
    groups: tuple
    labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise InvariantError("a profile needs at least one candidate")
        seen = set()
        for g in self.groups:
            if g.ballot in seen:
                raise InvariantError("duplicate ballot groups; use normalize_profile")
            seen.add(g.ballot)
            for c in g.ballot:
                if not 0 <= c < self.m:
                    raise BadCandidate(f"candidate {c} outside 0..{self.m - 1}")
        if self.labels is not None and len(self.labels) != self.m:
            raise InvariantError("need exactly one label per candidate")

    @property
    def n(self) -> int:
        return sum(g.weight for g in self.groups)

    @property
    def candidates(self) -> range:
        return range(self.m)

    def label(self, c: int) -> str:
        if self.labels is None:
            return str(c)
        return self.labels[c]

    def index_of(self, ballot: Iterable[int]) -> int:
        ballot = frozenset(ballot)
        for i, g in enumerate(self.groups):
            if g.ballot == ballot:
                return i
        raise KeyError(f"no group with ballot {sorted(ballot)}")

    def max_ballot_size(self) -> int:
        return max((len(g.ballot) for g in self.groups), default=0)

    def supporters(self, c: int) -> frozenset:
        """Indices of the groups approving ``c``."""
        return frozenset(i for i, g in enumerate(self.groups) if c in g.ballot)

    def scaled(self, factor: int) -> "Profile":
        return Profile(self.m, tuple(BallotGroup(g.ballot, g.weight * factor) for g in self.groups),
                       self.labels)

    def __add__(self, other: "Profile") -> "Profile":
        if self.m != other.m:
            raise InvariantError("cannot add profiles over different candidate sets")
        raw = [(g.ballot, g.weight) for g in self.groups + other.groups]
        return normalize_profile(raw, self.m, self.labels)


@dataclass(frozen=True)
class ElectionInstance:
    profile: Profile
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.profile.m - 1:
            raise InvariantError(
                f"committee size must satisfy 1 <= k <= m-1 (k={self.k}, m={self.profile.m})")
        if self.profile.n < 1:
            raise InvariantError("an election needs at least one voter")

    @property
    def m(self) -> int:
        return self.profile.m


def canonical_committees(committees: Iterable[frozenset]) -> list:
    return sorted((tuple(sorted(w)) for w in committees), key=lambda t: (len(t), t))


@dataclass(frozen=True)
class Outcome:
    """Set of tied winning committees.

    ``flags`` carries diagnostics, e.g. ``"fallback"`` when a sequential rule
    had to fill seats with candidates nobody can pay for.  ``partial`` marks
    outcomes of truncated procedures (MES Phase 1 alone), whose committees may
    be smaller than k.
    """

    committees: frozenset
    flags: frozenset = frozenset()
    partial: bool = False

    def __post_init__(self):
        if not self.committees:
            raise InvariantError("an outcome contains at least one committee")
        if not self.partial and len({len(w) for w in self.committees}) != 1:
            raise InvariantError("all committees of an outcome must have the same size")

    def __iter__(self):
        return iter(frozenset(w) for w in self.canonical())

    def __len__(self):
        return len(self.committees)

    def __contains__(self, w):
        return frozenset(w) in self.committees

    def canonical(self) -> list:
        return canonical_committees(self.committees)


def normalize_profile(raw: Iterable, m: int, labels: Optional[Sequence[str]] = None) -> Profile:
    """Merge duplicate ballots and order groups lexicographically by ballot."""
    merged = {}
    for ballot, weight in raw:
        ballot = frozenset(ballot)
        if not ballot:
            raise EmptyBallot("approval ballots must be non-empty")
        bad = [c for c in ballot if not 0 <= c < m]
        if bad:
            raise BadCandidate(f"candidate {min(bad)} outside 0..{m - 1}")
        if weight < 1:
            raise InvariantError(f"weights must be positive, got {weight}")
        merged[ballot] = merged.get(ballot, 0) + weight
    groups = sorted((BallotGroup(b, w) for b, w in merged.items()), key=BallotGroup.sort_key)
    return Profile(m, tuple(groups), tuple(labels) if labels is not None else None)


def abstain(profile: Profile, group: int, count: int = 1) -> Profile:
    g = profile.groups[group]
    if count < 1:
        raise InvariantError("abstainer count must be positive")
    if count > g.weight:
        raise TooManyAbstainers(f"group {group} has only {g.weight} voters, {count} requested")
    groups = list(profile.groups)
    if count == g.weight:
        del groups[group]
    else:
        groups[group] = BallotGroup(g.ballot, g.weight - count)
    return Profile(profile.m, tuple(groups), profile.labels)


def abstain_many(profile: Profile, abstainers: Iterable) -> Profile:
    """Remove several ``(group, count)`` abstentions at once.

    Group indices refer to ``profile``; duplicates are accumulated.
    """
    totals = {}
    for g, c in abstainers:
        totals[g] = totals.get(g, 0) + c
    groups = []
    for i, g in enumerate(profile.groups):
        c = totals.pop(i, 0)
        if c > g.weight:
            raise TooManyAbstainers(f"group {i} has only {g.weight} voters, {c} requested")
        if c < g.weight:
            groups.append(BallotGroup(g.ballot, g.weight - c))
    if totals:
        raise IndexError(f"unknown group index {min(totals)}")
    return Profile(profile.m, tuple(groups), profile.labels)


def approval_scores(profile: Profile) -> list:
    scores = [0] * profile.m
    for g in profile.groups:
        for c in g.ballot:
            scores[c] += g.weight
    return scores
