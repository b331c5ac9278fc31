"""Counterexample profiles, hardness reductions and brute-force oracles."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from abcpart import kernels
from abcpart.errors import (BadK, BadScoring, BudgetExceeded, InvariantError, NotCubic,
                            NotRegular, TBoundViolated, TooLarge)
from abcpart.model import ElectionInstance, Profile, abstain, normalize_profile
from abcpart.scoring import ScoringFunction


@dataclass(frozen=True)
class ReducedInstance:
    """A generated election together with its bookkeeping.

    ``blocks`` keeps the voter blocks before identical ballots are merged,
    as ``(role, ballot, weight)`` triples, so they can be audited against
    closed-form counts.  ``abstainer`` indexes the normalized profile.
    """

    instance: ElectionInstance
    abstainer: int
    roles: tuple
    blocks: tuple = ()
    params: dict = field(default_factory=dict, compare=False)

    @property
    def profile(self) -> Profile:
        return self.instance.profile

    @property
    def k(self) -> int:
        return self.instance.k

    def candidate(self, role: str) -> int:
        return self.roles.index(role)

    def without_abstainer(self) -> ElectionInstance:
        return ElectionInstance(abstain(self.profile, self.abstainer, 1), self.k)

    def abstainer_ballot(self) -> frozenset:
        return self.profile.groups[self.abstainer].ballot


def _build(m, k, blocks, roles, abstainer_ballot, params=None) -> ReducedInstance:
    raw = [(ballot, w) for _, ballot, w in blocks if w]
    profile = normalize_profile(raw, m, roles)
    inst = ElectionInstance(profile, k)
    return ReducedInstance(inst, profile.index_of(abstainer_ballot), tuple(roles),
                           tuple((r, frozenset(b), w) for r, b, w in blocks), params or {})


# ------------------------------------------------------- small profiles


def concurrence_profile() -> ElectionInstance:
    """1x{a,b}, 1x{b,c}, 1x{a}, 1x{c} with k = 2 (a, b, c = 0, 1, 2)."""
    raw = [({0, 1}, 1), ({1, 2}, 1), ({0}, 1), ({2}, 1)]
    return ElectionInstance(normalize_profile(raw, 3, ("a", "b", "c")), 2)


def equal_score_pair_profile(seed: int, max_m: int = 6, max_score: int = 4) -> ElectionInstance:
    """Random profile with ballots of size at most 2 and equal approval scores.

    Random pairs are added while both endpoints stay below the common score,
    then singleton ballots top every candidate up.  ``k`` is drawn so that
    score * k <= n.
    """
    rng = random.Random(seed)
    m = rng.randint(3, max_m)
    score = rng.randint(1, max_score)
    counts = [0] * m
    raw = []
    for _ in range(rng.randint(0, m * score)):
        x, y = rng.sample(range(m), 2)
        if counts[x] < score and counts[y] < score:
            raw.append(({x, y}, 1))
            counts[x] += 1
            counts[y] += 1
    for c in range(m):
        if counts[c] < score:
            raw.append(({c}, score - counts[c]))
    profile = normalize_profile(raw, m)
    k = rng.randint(1, min(m - 1, profile.n // score))
    return ElectionInstance(profile, k)


def mes_unrep_instance() -> ReducedInstance:
    roles = ("x1", "x2", "x3", "y1", "y2", "z", "c")
    x1, x2, x3, y1, y2, z, c = range(7)
    blocks = [
        ("x", {x1, x2, x3}, 20),
        ("y", {y1, y2}, 10),
        ("yz", {y1, y2, z}, 10),
        ("zc", {z, c}, 9),
        ("c", {c}, 2),
    ]
    return _build(7, 5, blocks, roles, {c})


def noshow_base(k: int):
    """Pairwise profile (before scaling) and roles for committee size ``k``.

    Returns ``(m, blocks, roles)``.  Candidates are a1..ar, b1..br (r = k-1)
    and, for k = 3, an extra candidate d.
    """
    if k < 3:
        raise BadK("the construction needs k >= 3")
    r = k - 1
    a = list(range(r))
    b = list(range(r, 2 * r))
    roles = [f"a{i + 1}" for i in range(r)] + [f"b{i + 1}" for i in range(r)]
    pairs = {}
    for x, y in itertools.combinations(a + b, 2):
        pairs[frozenset((x, y))] = 1
    pairs[frozenset((a[0], b[0]))] = 0
    pairs[frozenset((a[-1], b[-1]))] = 0
    for i in range(1, r):
        pairs[frozenset((a[i], b[0]))] += 2
    for j in range(1, r - 1):
        pairs[frozenset((b[j], a[-1]))] += 2
    pairs[frozenset((b[0], b[-1]))] += 1
    pairs[frozenset((a[0], a[-1]))] += 1
    m = 2 * r
    if k == 3:
        d = m
        m += 1
        roles.append("d")
        for x in a + b:
            pairs[frozenset((d, x))] = 3
    blocks = [("pair", ballot, w) for ballot, w in sorted(pairs.items(), key=lambda p: sorted(p[0])) if w]
    scores = [0] * m
    for _, ballot, w in blocks:
        for x in ballot:
            scores[x] += w
    top = max(scores)
    blocks += [("single", frozenset({x}), top - scores[x]) for x in range(m) if top > scores[x]]
    return m, blocks, tuple(roles)


def noshow_family(k: int, lam: int) -> ReducedInstance:
    """Scaled pairwise profile plus four extra voters; abstainer approves a1..ar."""
    if lam < 1:
        raise InvariantError("lambda must be at least 1")
    m, blocks, roles = noshow_base(k)
    r = k - 1
    a = frozenset(range(r))
    b = frozenset(range(r, 2 * r))
    scaled = [(role, ballot, w * lam) for role, ballot, w in blocks]
    extra = [("extra-a", a, 1), ("extra-b", b, 1),
             ("extra-a1", frozenset({0}), 1), ("extra-br", frozenset({2 * r - 1}), 1)]
    return _build(m, k, scaled + extra, roles, a, {"lambda": lam, "r": r})


def noshow_expected(k: int):
    """Committees predicted with and without the abstainer."""
    r = k - 1
    a = frozenset(range(r))
    b = frozenset(range(r, 2 * r))
    before = frozenset({b | {0}, a | {2 * r - 1}})
    after = frozenset({a | {2 * r - 1}})
    return before, after


def noshow_lambda_search(rule, k: int, lam_max: int = 200, compute=None):
    """Smallest lambda for which both outcomes match the predicted structure.

    Returns ``(lam, outcome_before, outcome_after)`` or ``None``.
    """
    if compute is None:
        from abcpart.rules import compute_outcome as compute
    before_exp, after_exp = noshow_expected(k)
    for lam in range(1, lam_max + 1):
        red = noshow_family(k, lam)
        before = compute(rule, red.instance)
        if before.committees != before_exp:
            continue
        after = compute(rule, red.without_abstainer())
        if after.committees == after_exp:
            return lam, before, after
    return None


# ------------------------------------------------------------- graphs


@dataclass(frozen=True)
class CubicGraph:
    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        degree = [0] * self.n
        for u, v in self.edges:
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise NotCubic(f"bad edge ({u}, {v})")
            e = frozenset((u, v))
            if e in seen:
                raise NotCubic(f"repeated edge ({u}, {v})")
            seen.add(e)
            degree[u] += 1
            degree[v] += 1
        bad = [v for v in range(self.n) if degree[v] != 3]
        if bad:
            raise NotCubic(f"vertex {bad[0]} has degree {degree[bad[0]]}")

    @classmethod
    def from_edges(cls, edges) -> "CubicGraph":
        edges = list(edges)
        verts = sorted({v for e in edges for v in e})
        index = {v: i for i, v in enumerate(verts)}
        return cls(len(verts), tuple(sorted((min(index[u], index[v]), max(index[u], index[v]))
                                            for u, v in edges)))

    def adjacency_masks(self) -> list:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def is_independent(self, vertices) -> bool:
        vs = set(vertices)
        return not any(u in vs and v in vs for u, v in self.edges)


def k4() -> CubicGraph:
    return CubicGraph.from_edges(itertools.combinations(range(4), 2))


def k33() -> CubicGraph:
    return CubicGraph.from_edges((u, v) for u in range(3) for v in range(3, 6))


def cube() -> CubicGraph:
    return CubicGraph.from_edges((u, u ^ (1 << i)) for u in range(8) for i in range(3) if u < u ^ (1 << i))


GRAPH_LIBRARY = {"k4": k4, "k33": k33, "q3": cube}


def independent_set_oracle(graph: CubicGraph, t: int, max_vertices: int = 32) -> bool:
    if graph.n > max_vertices:
        raise TooLarge(f"{graph.n} vertices exceed the limit of {max_vertices}")
    return kernels.has_independent_set(graph.n, graph.adjacency_masks(), t)


def independent_set_brute_force(graph: CubicGraph, t: int) -> bool:
    return any(graph.is_independent(sub) for sub in itertools.combinations(range(graph.n), t))


def indset_alpha(s: ScoringFunction) -> int:
    """Smallest positive integer alpha meeting the two divisibility and size conditions."""
    d1, d2 = s.delta(1), s.delta(2)
    ratio = (d1 - d2) / d1
    if ratio <= 0:
        raise BadScoring("need delta(1) > delta(2)")
    alpha = 1
    while True:
        if (Fraction(alpha, 4) * ratio).denominator == 1 and alpha * (d1 - d2) >= d1:
            return alpha
        alpha += 1


def indset_reduction(graph: CubicGraph, t: int, s: ScoringFunction) -> ReducedInstance:
    """Election in which a {g1, g3} voter gains by abstaining iff ``graph`` has an independent t-set.

    Candidates: g1..g4 (0..3), b (4) and one candidate per vertex (5..).
    """
    if not s.is_thiele or s.k_max < 3:
        raise BadScoring("need a Thiele function tabulated up to s(3)")
    d1, d2, d3 = s.delta(1), s.delta(2), s.delta(3)
    if not d1 - d2 > d2 - d3:
        raise BadScoring("the first differences must satisfy delta1-delta2 > delta2-delta3")
    n = graph.n
    if n < 2:
        raise InvariantError("the graph needs at least two vertices")
    if len(graph.edges) < 3 * t:
        raise InvariantError("need |E| >= 3t")
    if t < 1:
        raise InvariantError("t must be positive")
    alpha = indset_alpha(s)
    big = Fraction(alpha, 2) * (n**4 - (t - Fraction(1, 2)) * n**3 * (d1 - d2) / d1)
    if big.denominator != 1:
        raise InvariantError(f"gadget multiplicity {big} is not an integer")
    big = int(big)
    g1, g2, g3, g4, b = range(5)
    cv = [5 + v for v in range(n)]
    roles = ["g1", "g2", "g3", "g4", "b"] + [f"c{v}" for v in range(n)]
    an3 = alpha * n**3
    blocks = [(f"vertex:{v}", {cv[v]}, an3) for v in range(n)]
    blocks += [(f"pair:{v},{w}", {cv[v], cv[w]}, an3) for v, w in itertools.combinations(range(n), 2)]
    blocks += [(f"edge:{u},{v}", {cv[u], cv[v], g1}, 1) for u, v in graph.edges]
    blocks += [
        ("b", {b}, alpha * n**5),
        ("b+g2", {b, g2}, 3 * t),
        ("g1+g2", {g1, g2}, big),
        ("g1+g3", {g1, g3}, big),
        ("g2+g4", {g2, g4}, big),
        ("g3+g4", {g3, g4}, big),
        ("g2", {g2}, len(graph.edges) - 3 * t),
        ("g1", {g1}, 1),
    ]
    params = {"alpha": alpha, "gadget": big, "t": t, "n": n}
    return _build(n + 5, n + 4, blocks, roles, {g1, g3}, params)


def indset_expected(red: ReducedInstance, yes: bool):
    """Committees predicted without and with the {g1, g3} abstention."""
    n = red.params["n"]
    core = frozenset({4} | set(range(5, 5 + n)))
    before = frozenset({core | {0, 1, 3}})
    after = before | {core | {0, 1, 2}} if yes else before
    return before, frozenset(after)


# -------------------------------------------------------------- RX3C


@dataclass(frozen=True)
class Rx3cInstance:
    """Universe 0..3t-1 with 3t three-element sets (a family, repeats allowed)."""

    t: int
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(tuple(sorted(s)) for s in self.sets))

    def validate(self):
        if len(self.sets) != 3 * self.t:
            raise NotRegular(f"expected {3 * self.t} sets, got {len(self.sets)}")
        counts = [0] * (3 * self.t)
        for s in self.sets:
            if len(set(s)) != 3:
                raise NotRegular(f"set {s} does not have three distinct elements")
            for x in s:
                if not 0 <= x < 3 * self.t:
                    raise NotRegular(f"element {x} outside the universe")
                counts[x] += 1
        bad = [x for x, c in enumerate(counts) if c != 3]
        if bad:
            raise NotRegular(f"element {bad[0]} occurs in {counts[bad[0]]} sets")

    def containing(self, x: int) -> list:
        return [i for i, s in enumerate(self.sets) if x in s]

    def is_cover(self, indices) -> bool:
        seen = [x for i in indices for x in self.sets[i]]
        return len(seen) == len(set(seen)) == 3 * self.t


def _random_partition(elements, rng):
    elems = list(elements)
    rng.shuffle(elems)
    return [tuple(sorted(elems[i:i + 3])) for i in range(0, len(elems), 3)]


def planted_rx3c(t: int, seed: int = 0, scramble: Optional[int] = None) -> Rx3cInstance:
    """Three partitions of the universe into triples; the first is a planted cover.

    With ``scramble = None`` all three partitions are independent random
    partitions.  With ``scramble = s`` (a multiple of 3) only ``s`` random
    elements get independent partitions; elsewhere the planted triples are
    repeated three times.
    """
    if t < 1:
        raise InvariantError("t must be positive")
    rng = random.Random(seed)
    universe = list(range(3 * t))
    if scramble is None:
        sets = []
        for _ in range(3):
            sets += _random_partition(universe, rng)
        inst = Rx3cInstance(t, tuple(sets))
        inst.validate()
        return inst
    if scramble % 3 or not 0 <= scramble <= 3 * t:
        raise InvariantError("scramble must be a multiple of 3 between 0 and 3t")
    rng.shuffle(universe)
    region, rest = universe[:scramble], universe[scramble:]
    rest_triples = [tuple(sorted(rest[i:i + 3])) for i in range(0, len(rest), 3)]
    sets = []
    for _ in range(3):
        sets += _random_partition(region, rng) + rest_triples
    inst = Rx3cInstance(t, tuple(sets))
    inst.validate()
    return inst


def exact_cover_oracle(inst: Rx3cInstance, budget: int = 10**6) -> Optional[list]:
    """Indices of sets forming an exact cover, or ``None``.

    Backtracking over the element with the fewest candidate sets; choosing a
    set removes every set that clashes with it.  Raises BudgetExceeded after
    ``budget`` nodes.
    """
    universe = range(3 * inst.t)
    cols = {x: set() for x in universe}
    for i, s in enumerate(inst.sets):
        for x in s:
            cols[x].add(i)
    rows = {i: s for i, s in enumerate(inst.sets)}
    nodes = [0]

    def select(i):
        removed = []
        for x in rows[i]:
            for j in cols[x]:
                for y in rows[j]:
                    if y != x:
                        cols[y].discard(j)
            removed.append(cols.pop(x))
        return removed

    def deselect(i, removed):
        for x in reversed(rows[i]):
            cols[x] = removed.pop()
            for j in cols[x]:
                for y in rows[j]:
                    if y != x:
                        cols[y].add(j)

    def solve(partial):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"exact cover search exceeded {budget} nodes")
        if not cols:
            return list(partial)
        x = min(cols, key=lambda e: len(cols[e]))
        for i in sorted(cols[x]):
            partial.append(i)
            removed = select(i)
            found = solve(partial)
            deselect(i, removed)
            partial.pop()
            if found is not None:
                return found
        return None

    return solve([])


def exact_cover_brute_force(inst: Rx3cInstance) -> bool:
    return any(inst.is_cover(c) for c in itertools.combinations(range(len(inst.sets)), inst.t))


def rx3c_t_bound_holds(t: int) -> bool:
    return t**3 >= 90 * t**2 + 120 * t + 60


def minimal_rx3c_t() -> int:
    t = 1
    while not rx3c_t_bound_holds(t):
        t += 1
    return t


def rx3c_formula_table(t: int) -> dict:
    """Closed-form voter counts per block role."""
    t3 = t**3
    return {
        "a": 10 * t3 + 45 * t,
        "g4+a": 15,
        "b1": 7 * t3,
        "b2": 7 * t3 - (90 * t**2 + 120 * t + 60),
        "c": 10 * t3,
        "elem+g1": 5,
        "elem": 15 * t,
        "abstainer": 1,
        "g1+g4": 4 * t3 + 30 * t + 13,
        "g1": 6 * t3,
        "g2": 3 * t3 + 11,
        "g3": 3 * t3 + 11,
        "g5": 12,
        "g6": 12,
        "g2+g5": 7 * t3 + 30 * t,
        "g3+g6": 7 * t3 + 30 * t,
        "g4+g5": 3 * t3,
        "g4+g6": 3 * t3,
        "total": 10 * t3 * (4 * t + 5),
        "k": 4 * t + 5,
    }


def rx3c_reduction(inst: Rx3cInstance) -> ReducedInstance:
    """Election in which the {g1, g2, g3} voter gains by abstaining iff ``inst`` has an exact cover.

    Candidates: g1..g6 (0..5), one per set (6..6+3t-1), a1..at, then b1, b2.
    """
    t = inst.t
    if not rx3c_t_bound_holds(t):
        raise TBoundViolated(f"t = {t} violates t^3 >= 90t^2 + 120t + 60")
    inst.validate()
    f = rx3c_formula_table(t)
    g = list(range(6))
    cs = [6 + i for i in range(3 * t)]
    av = [6 + 3 * t + i for i in range(t)]
    b1, b2 = 6 + 4 * t, 7 + 4 * t
    roles = ([f"g{i + 1}" for i in range(6)] + [f"S{i}" for i in range(3 * t)]
             + [f"a{i + 1}" for i in range(t)] + ["b1", "b2"])
    blocks = []
    for a in av:
        blocks.append(("a", {a}, f["a"]))
        blocks.append(("g4+a", {g[3], a}, f["g4+a"]))
    blocks += [("b1", {b1}, f["b1"]), ("b2", {b2}, f["b2"])]
    blocks += [("c", {c}, f["c"]) for c in cs]
    for x in range(3 * t):
        members = {cs[i] for i in inst.containing(x)}
        blocks.append(("elem+g1", members | {g[0]}, f["elem+g1"]))
        blocks.append(("elem", members, f["elem"]))
    blocks.append(("abstainer", {g[0], g[1], g[2]}, f["abstainer"]))
    gadget = {
        "g1+g4": {g[0], g[3]}, "g1": {g[0]}, "g2": {g[1]}, "g3": {g[2]},
        "g5": {g[4]}, "g6": {g[5]}, "g2+g5": {g[1], g[4]}, "g3+g6": {g[2], g[5]},
        "g4+g5": {g[3], g[4]}, "g4+g6": {g[3], g[5]},
    }
    blocks += [(role, ballot, f[role]) for role, ballot in gadget.items()]
    return _build(8 + 4 * t, f["k"], blocks, roles, {g[0], g[1], g[2]}, {"t": t})


def audit_rx3c(red: ReducedInstance) -> list:
    """Mismatches between generated blocks and the closed-form table (empty when consistent)."""
    t = red.params["t"]
    f = rx3c_formula_table(t)
    problems = []
    for role, ballot, w in red.blocks:
        if f.get(role) != w:
            problems.append(f"block {role} {sorted(ballot)}: {w} != {f.get(role)}")
    expected_counts = {"a": t, "g4+a": t, "c": 3 * t, "elem+g1": 3 * t, "elem": 3 * t}
    for role, count in expected_counts.items():
        got = sum(1 for r, _, _ in red.blocks if r == role)
        if got != count:
            problems.append(f"{got} blocks of role {role}, expected {count}")
    total = sum(w for _, _, w in red.blocks)
    if total != f["total"] or red.profile.n != f["total"]:
        problems.append(f"total {total} != {f['total']}")
    if red.k != f["k"]:
        problems.append(f"k = {red.k} != {f['k']}")
    return problems


def rx3c_expected(red: ReducedInstance, phase1: bool):
    """Committees predicted without and with abstention on a Yes-instance."""
    t = red.params["t"]
    core = set(range(6, 6 + 4 * t))
    if not phase1:
        core |= {6 + 4 * t, 7 + 4 * t}
    core = frozenset(core)
    before = frozenset({core | {0, 4, 5}})
    after = before | {core | {3, 1, 2}}
    return before, frozenset(after)
