"""ABC scoring rules and Thiele rules with exhaustive winner determination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from abcpart import kernels
from abcpart.errors import BadScoring, TooLarge
from abcpart.model import ElectionInstance, Outcome, Profile

DEFAULT_MAX_SUBSETS = 10**6


@dataclass(frozen=True)
class ScoringFunction:
    """Exact scoring function ``s(x, y)``.

    For ``kind == "thiele"`` the score ignores the ballot size and ``values``
    holds ``s(0), ..., s(k_max)``; for ``kind == "general"`` ``values`` maps
    ``(x, y)`` to ``s(x, y)``.  Entries outside the stored range are an error.
    """

    kind: str
    values: object
    name: str = "custom"

    def __post_init__(self):
        if self.kind == "thiele":
            vals = tuple(Fraction(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            _validate_thiele(vals)
        elif self.kind == "general":
            vals = {(int(x), int(y)): Fraction(v) for (x, y), v in dict(self.values).items()}
            object.__setattr__(self, "values", vals)
            _validate_general(vals)
        else:
            raise BadScoring(f"unknown scoring kind {self.kind!r}")

    @property
    def is_thiele(self) -> bool:
        return self.kind == "thiele"

    @property
    def k_max(self) -> int:
        if self.is_thiele:
            return len(self.values) - 1
        return max(x for x, _ in self.values)

    def __call__(self, x: int, y: int = None) -> Fraction:
        if self.is_thiele:
            if x >= len(self.values):
                raise BadScoring(f"{self.name}: s({x}) not tabulated (k_max={self.k_max})")
            return self.values[x]
        if y is None:
            raise BadScoring("general scoring functions need the ballot size")
        try:
            return self.values[(x, y)]
        except KeyError:
            raise BadScoring(f"{self.name}: s({x},{y}) not tabulated") from None

    def delta(self, x: int) -> Fraction:
        """Marginal gain s(x) - s(x-1) of a Thiele function, x >= 1."""
        return self(x) - self(x - 1)

    def __hash__(self):
        if self.is_thiele:
            return hash((self.kind, self.values))
        return hash((self.kind, tuple(sorted(self.values.items()))))


def _validate_thiele(vals):
    if len(vals) < 2:
        raise BadScoring("a Thiele function needs s(0) and s(1)")
    if vals[0] != 0:
        raise BadScoring("s(0) must be 0")
    if vals[1] <= 0:
        raise BadScoring("s(1) must be positive")
    for x in range(len(vals) - 1):
        if vals[x + 1] < vals[x]:
            raise BadScoring("s must be weakly increasing")
    for x in range(len(vals) - 2):
        if vals[x + 1] - vals[x] < vals[x + 2] - vals[x + 1]:
            raise BadScoring(f"s violates concavity at x={x}")


def _validate_general(vals):
    for (x, y), v in vals.items():
        if not 0 <= x <= y:
            raise BadScoring(f"entry s({x},{y}) outside 0 <= x <= y")
        if x == 0 and v != 0:
            raise BadScoring("s(0,y) must be 0")
        if x > 0 and (x - 1, y) in vals and vals[(x - 1, y)] > v:
            raise BadScoring(f"s(.,{y}) must be weakly increasing")


def builtin_scoring(name: str, k_max: int) -> ScoringFunction:
    if k_max < 1:
        raise BadScoring("k_max must be at least 1")
    if name == "av":
        vals = [Fraction(x) for x in range(k_max + 1)]
    elif name == "pav":
        vals = [sum((Fraction(1, y) for y in range(1, x + 1)), Fraction(0)) for x in range(k_max + 1)]
    elif name == "ccav":
        vals = [Fraction(0)] + [Fraction(1)] * k_max
    else:
        raise BadScoring(f"unknown builtin scoring {name!r}")
    return ScoringFunction("thiele", vals, name)


def thiele_scoring(values: Sequence, name: str = "custom") -> ScoringFunction:
    return ScoringFunction("thiele", values, name)


def general_scoring(table: Mapping, name: str = "custom") -> ScoringFunction:
    return ScoringFunction("general", table, name)


def satisfaction_scoring(max_ballot: int) -> ScoringFunction:
    """Ballot-size dependent rule s(x, y) = x / y."""
    table = {(x, y): Fraction(x, y) if y else Fraction(0)
             for y in range(max_ballot + 1) for x in range(y + 1)}
    return ScoringFunction("general", table, "sav")


def voter_score(s: ScoringFunction, x: int, y: int) -> Fraction:
    return s(x) if s.is_thiele else s(x, y)


def committee_score(profile: Profile, committee, s: ScoringFunction) -> Fraction:
    committee = frozenset(committee)
    total = Fraction(0)
    for g in profile.groups:
        x = len(g.ballot & committee)
        if x:
            total += g.weight * voter_score(s, x, len(g.ballot))
    return total


def _integer_table(s: ScoringFunction, ymax: int, k: int):
    rows = []
    for y in range(ymax + 1):
        rows.append([voter_score(s, x, y) if x <= k else Fraction(0) for x in range(y + 1)])
    denom = 1
    for row in rows:
        for v in row:
            denom = math.lcm(denom, v.denominator)
    return [[int(v * denom) for v in row] for row in rows], denom


def elect_scoring(instance: ElectionInstance, s: ScoringFunction,
                  max_subsets: int = DEFAULT_MAX_SUBSETS, backend=None) -> Outcome:
    """All committees of size k maximising the total score."""
    profile, k = instance.profile, instance.k
    total = math.comb(profile.m, k)
    if total > max_subsets:
        raise TooLarge(f"binomial({profile.m},{k}) = {total} exceeds the cap {max_subsets}")
    ymax = profile.max_ballot_size()
    table, _ = _integer_table(s, ymax, k)
    masks = [sum(1 << c for c in g.ballot) for g in profile.groups]
    sizes = [len(g.ballot) for g in profile.groups]
    weights = [g.weight for g in profile.groups]
    _, winners = kernels.best_subsets(profile.m, k, masks, sizes, weights, table, backend=backend)
    committees = frozenset(frozenset(c for c in range(profile.m) if (w >> c) & 1) for w in winners)
    return Outcome(committees)
