"""Laminar profiles: detection, forest decomposition and random generation.

A profile is laminar when the supporter sets of any two candidates are nested
or disjoint.  Candidates with identical supporter sets form a clone class;
the classes ordered by strict inclusion of supporter sets form a forest whose
roots have the largest supporter sets.  Every ballot of a laminar profile is
the up-set of one node: the node's candidates plus those of all ancestors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from abcpart.errors import InvariantError, NotLaminar
from abcpart.model import Profile, normalize_profile


def _supporter_sets(profile: Profile) -> list:
    return [profile.supporters(c) for c in range(profile.m)]


def is_laminar(profile: Profile) -> bool:
    sets = _supporter_sets(profile)
    for i in range(profile.m):
        for j in range(i + 1, profile.m):
            a, b = sets[i], sets[j]
            if a & b and not (a <= b or b <= a):
                return False
    return True


@dataclass(frozen=True)
class LaminarNode:
    candidates: tuple
    supporters: frozenset
    parent: Optional[int]
    weight: int


@dataclass(frozen=True)
class LaminarForest:
    nodes: tuple
    unapproved: tuple

    def node_of(self, c: int) -> int:
        for i, node in enumerate(self.nodes):
            if c in node.candidates:
                return i
        raise KeyError(c)

    def children(self, i: int) -> list:
        return [j for j, node in enumerate(self.nodes) if node.parent == i]

    def roots(self) -> list:
        return [j for j, node in enumerate(self.nodes) if node.parent is None]

    def up_set(self, i: int) -> frozenset:
        out = set()
        while i is not None:
            out.update(self.nodes[i].candidates)
            i = self.nodes[i].parent
        return frozenset(out)

    def ballots(self) -> list:
        """``(ballot, weight)`` pairs re-emitted from the forest."""
        return [(self.up_set(i), n.weight) for i, n in enumerate(self.nodes) if n.weight]

    def to_dot(self, labels=None) -> str:
        name = (lambda c: labels[c]) if labels else str
        lines = ["digraph laminar {"]
        for i, node in enumerate(self.nodes):
            text = ",".join(name(c) for c in node.candidates)
            lines.append(f'  n{i} [label="{{{text}}} w={node.weight}"];')
        for i, node in enumerate(self.nodes):
            if node.parent is not None:
                lines.append(f"  n{node.parent} -> n{i};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def laminar_forest(profile: Profile) -> LaminarForest:
    if not is_laminar(profile):
        raise NotLaminar("supporter sets overlap without nesting")
    sets = _supporter_sets(profile)
    classes = {}
    unapproved = []
    for c, sup in enumerate(sets):
        if sup:
            classes.setdefault(sup, []).append(c)
        else:
            unapproved.append(c)
    keys = sorted(classes, key=lambda s: (-len(s), min(classes[s])))
    index = {s: i for i, s in enumerate(keys)}
    parents = []
    for s in keys:
        above = [t for t in keys if s < t]
        parents.append(index[min(above, key=len)] if above else None)
    nodes = []
    for i, s in enumerate(keys):
        members = set(classes[s])
        j = parents[i]
        while j is not None:
            members.update(classes[keys[j]])
            j = parents[j]
        weight = sum(g.weight for g in profile.groups if g.ballot == members)
        nodes.append(LaminarNode(tuple(classes[s]), s, parents[i], weight))
    return LaminarForest(tuple(nodes), tuple(unapproved))


def strict_predecessors(profile: Profile) -> list:
    """For each candidate y, the candidates x whose supporters strictly contain y's."""
    sets = _supporter_sets(profile)
    return [frozenset(x for x in range(profile.m) if sets[y] and sets[y] < sets[x])
            for y in range(profile.m)]


def random_laminar(m: int, depth: int, branching: int, weight_range=(1, 3), seed=0) -> Profile:
    """Random laminar profile over ``m`` candidates, deterministic per seed.

    A random forest of at most ``depth`` levels with at most ``branching``
    children per node is grown until every candidate has a node; nodes hold
    one or two clones.  Each node's up-set becomes a ballot with a weight drawn
    from ``weight_range``.
    """
    if m < 1 or depth < 1 or branching < 1:
        raise InvariantError("m, depth and branching must be positive")
    lo, hi = weight_range
    if lo < 1 or hi < lo:
        raise InvariantError("weights must be positive")
    rng = random.Random(seed)
    order = list(range(m))
    rng.shuffle(order)
    nodes = []  # (candidates, parent, level)
    frontier = []
    pos = 0
    while pos < m:
        if frontier and rng.random() < 0.7:
            parent = rng.choice(frontier)
        else:
            parent = None
        level = 0 if parent is None else nodes[parent][2] + 1
        size = min(rng.choice((1, 1, 1, 2)), m - pos)
        nodes.append((order[pos:pos + size], parent, level))
        pos += size
        idx = len(nodes) - 1
        if level + 1 < depth:
            frontier.append(idx)
        if parent is not None:
            kids = sum(1 for n in nodes if n[1] == parent)
            if kids >= branching:
                frontier.remove(parent)
    raw = []
    for i, (cands, parent, _) in enumerate(nodes):
        ballot = set(cands)
        j = parent
        while j is not None:
            ballot.update(nodes[j][0])
            j = nodes[j][1]
        raw.append((ballot, rng.randint(lo, hi)))
    return normalize_profile(raw, m)


def picking_order_monitor(profile: Profile):
    """Callback for the sequential search recording picks that skip a predecessor.

    A pick of y is flagged when some x whose supporters strictly contain y's
    supporters is still unchosen.  Picks with zero cost (a Thiele candidate
    adding no satisfaction) are exempt.  Returns ``(on_step, violations)``.
    """
    preds = strict_predecessors(profile)
    violations = []

    def on_step(state, c, ties, cost):
        if cost == 0:
            return
        missing = preds[c] - state.chosen
        if missing:
            violations.append((tuple(sorted(state.chosen)), c, tuple(sorted(missing))))

    return on_step, violations
