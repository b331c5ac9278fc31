"""Sequential query rules: seqThiele, seqPhragmén and the Method of Equal Shares.

Every rule is described by a *process*: a root state, a cost for every
unchosen candidate (smaller is better, ``None`` when the candidate cannot be
chosen right now) and a transition applied when a candidate is picked.  The
query set of a state is the argmin of the costs.  :func:`enumerate_outcomes`
explores all tie branches depth first.

Two reductions keep the search small without changing the outcome:

* independent ties: tied candidates that share no active ballot group do not
  influence each other, and levels only ever get worse, so it suffices to
  branch on one connected component of the tie set as long as the remaining
  seats cannot all be filled from the other components;
* symmetry: when swapping two tied candidates maps every ballot group onto a
  group with the same weight and the same state value, both branches lead to
  mirrored results, so only one is explored and the other is obtained by the
  swap.

Both are sound only for rules whose costs never improve over time, which holds
for the built-in rules; custom query rules are searched without them.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from abcpart.errors import BranchExplosion, InvariantError, NoBuyer
from abcpart.model import ElectionInstance, Outcome, Profile, approval_scores
from abcpart.scoring import ScoringFunction, builtin_scoring

DEFAULT_MAX_BRANCHES = 10**6
FALLBACK_FLAG = "fallback"


@dataclass(frozen=True)
class State:
    """Search state: chosen candidates, per-group values and the phase.

    ``values`` holds satisfaction counts (Thiele), loads (Phragmén, MES
    phase 2) or budgets (MES phase 1), one entry per ballot group.
    """

    chosen: frozenset
    values: tuple
    phase: int = 1


# ---------------------------------------------------------------- processes


class _Process:
    monotone = True

    def __init__(self, profile: Profile, k: int):
        self.profile = profile
        self.k = k
        self.weights = [g.weight for g in profile.groups]
        self.support = [tuple(sorted(profile.supporters(c))) for c in range(profile.m)]
        self.approvals = [sum(self.weights[g] for g in sup) for sup in self.support]
        self.ballots = [g.ballot for g in profile.groups]
        self.index = {b: i for i, b in enumerate(self.ballots)}

    def symmetry_key(self, state: State, c):
        """Invariant shared by candidates that may be interchangeable."""
        return tuple(sorted((self.weights[g], len(self.ballots[g]), state.values[g])
                            for g in self.support[c]))

    def swappable(self, state: State, x, y) -> bool:
        """True when exchanging x and y maps every group onto an equivalent group."""
        for g in set(self.support[x]) | set(self.support[y]):
            ballot = self.ballots[g]
            if x in ballot and y in ballot:
                continue
            image = (ballot - {x}) | {y} if x in ballot else (ballot - {y}) | {x}
            h = self.index.get(image)
            if h is None or self.weights[h] != self.weights[g] or state.values[h] != state.values[g]:
                return False
        return True

    def costs(self, state: State) -> dict:
        return {c: self.cost(state, c) for c in range(self.profile.m) if c not in state.chosen}

    def update_costs(self, state: State, old: dict, changed) -> dict:
        if changed is None:
            return self.costs(state)
        new = {c: v for c, v in old.items() if c not in state.chosen}
        touched = set()
        for g in changed:
            touched.update(self.profile.groups[g].ballot)
        for c in touched:
            if c in new:
                new[c] = self.cost(state, c)
        return new

    def link_groups(self, state: State, c):
        return self.support[c]

    def shortcut(self, state: State, best) -> bool:
        """True when every remaining subset of candidates is reachable."""
        return False

    def exhausted(self, state: State):
        """Called when no candidate has a cost.

        Returns ``("phase", new_state)``, ``("stop",)`` or ``("fill", flag)``.
        """
        return ("fill", FALLBACK_FLAG)

    def describe(self, state: State) -> dict:
        return {}


class ThieleProcess(_Process):
    def __init__(self, profile, k, s: ScoringFunction):
        super().__init__(profile, k)
        if not s.is_thiele:
            raise InvariantError("sequential Thiele rules need a Thiele scoring function")
        top = min(k, max(profile.max_ballot_size(), 1))
        self.delta = [None] + [s.delta(x) for x in range(1, top + 1)]

    def root(self):
        return State(frozenset(), (0,) * len(self.weights))

    def cost(self, state, c):
        gain = Fraction(0)
        for g in self.support[c]:
            x = state.values[g]
            if x + 1 < len(self.delta):
                gain += self.weights[g] * self.delta[x + 1]
        return -gain

    def apply(self, state, c, cost):
        vals = list(state.values)
        for g in self.support[c]:
            vals[g] += 1
        return State(state.chosen | {c}, tuple(vals), state.phase), self.support[c]

    def shortcut(self, state, best):
        return best == 0

    def describe(self, state):
        return {"satisfaction": list(state.values)}


class PhragmenProcess(_Process):
    def __init__(self, profile, k, initial_loads=None):
        super().__init__(profile, k)
        if initial_loads is None:
            initial_loads = (Fraction(0),) * len(self.weights)
        self.initial = tuple(Fraction(y) for y in initial_loads)

    def root(self):
        return State(frozenset(), self.initial, 2)

    def cost(self, state, c):
        if not self.approvals[c]:
            return None
        total = 1 + sum(self.weights[g] * state.values[g] for g in self.support[c])
        return Fraction(total) / self.approvals[c]

    def apply(self, state, c, cost):
        vals = list(state.values)
        if cost is not None:
            for g in self.support[c]:
                vals[g] = cost
        return State(state.chosen | {c}, tuple(vals), state.phase), self.support[c]

    def describe(self, state):
        return {"loads": list(state.values)}


def mes_rho(budgets: Iterable, target=1) -> Optional[Fraction]:
    """Smallest ``rho`` with ``sum(w * min(rho, b)) == target``.

    ``budgets`` is an iterable of ``(budget, weight)`` pairs.  Returns ``None``
    when the total budget is below ``target``.
    """
    items = sorted((Fraction(b), w) for b, w in budgets if w)
    target = Fraction(target)
    if sum(b * w for b, w in items) < target:
        return None
    paid = Fraction(0)
    remaining = sum(w for _, w in items)
    for b, w in items:
        rho = (target - paid) / remaining
        if rho <= b:
            return rho
        paid += b * w
        remaining -= w
    # only reachable through rounding, which cannot happen with Fractions
    raise AssertionError("waterfill did not terminate")


class MesProcess(_Process):
    """Method of Equal Shares, completed by budget-carrying seqPhragmén."""

    def __init__(self, profile, k, phase1_only=False):
        super().__init__(profile, k)
        self.phase1_only = phase1_only
        self.start_budget = Fraction(k, profile.n)

    def root(self):
        return State(frozenset(), (self.start_budget,) * len(self.weights), 1)

    def cost(self, state, c):
        if state.phase == 1:
            return mes_rho((state.values[g], self.weights[g]) for g in self.support[c])
        if not self.approvals[c]:
            return None
        total = 1 + sum(self.weights[g] * state.values[g] for g in self.support[c])
        return Fraction(total) / self.approvals[c]

    def apply(self, state, c, cost):
        vals = list(state.values)
        if cost is not None:
            if state.phase == 1:
                for g in self.support[c]:
                    vals[g] -= min(cost, vals[g])
            else:
                for g in self.support[c]:
                    vals[g] = cost
        return State(state.chosen | {c}, tuple(vals), state.phase), self.support[c]

    def link_groups(self, state, c):
        if state.phase == 1:
            return tuple(g for g in self.support[c] if state.values[g] > 0)
        return self.support[c]

    def exhausted(self, state):
        if state.phase == 1:
            if self.phase1_only:
                return ("stop",)
            return ("phase", State(state.chosen, tuple(-b for b in state.values), 2))
        return ("fill", FALLBACK_FLAG)

    def describe(self, state):
        if state.phase == 1:
            return {"budgets": list(state.values)}
        return {"loads": list(state.values)}


class QueryProcess(_Process):
    """Wraps an arbitrary query function ``g(profile, k, sequence)``."""

    monotone = False

    def __init__(self, profile, k, query):
        super().__init__(profile, k)
        self.query = query

    def root(self):
        return State(frozenset(), (), 1)

    def costs(self, state):
        seq = state.values
        chosen = frozenset(seq)
        picked = set(self.query(self.profile, self.k, seq))
        if not picked or picked & chosen:
            raise InvariantError("query function returned an empty set or a chosen candidate")
        return {c: (0 if c in picked else None) for c in range(self.profile.m) if c not in chosen}

    def update_costs(self, state, old, changed):
        return self.costs(state)

    def apply(self, state, c, cost):
        return State(state.chosen | {c}, state.values + (c,), 1), None

    def exhausted(self, state):
        raise InvariantError("query function returned an empty set")


# -------------------------------------------------------------------- rules


@dataclass(frozen=True)
class SeqThiele:
    s: ScoringFunction
    name: str = ""

    def process(self, profile, k):
        return ThieleProcess(profile, k, self.s)

    @property
    def label(self):
        return self.name or f"seqthiele[{self.s.name}]"


@dataclass(frozen=True)
class SeqPhragmen:
    name: str = "phragmen"

    def process(self, profile, k):
        return PhragmenProcess(profile, k)

    @property
    def label(self):
        return self.name


@dataclass(frozen=True)
class Mes:
    phase1_only: bool = False

    def process(self, profile, k):
        return MesProcess(profile, k, self.phase1_only)

    @property
    def label(self):
        return "mes:phase1" if self.phase1_only else "mes"


@dataclass(frozen=True)
class QueryRule:
    """Sequential rule given by a plain query function."""

    query: Callable = field(compare=False)
    name: str = "custom"

    def process(self, profile, k):
        return QueryProcess(profile, k, self.query)

    @property
    def label(self):
        return self.name


def seq_thiele_rule(name: str, k_max: int) -> SeqThiele:
    return SeqThiele(builtin_scoring(name, k_max), "seq" + name)


# ------------------------------------------------------------------- search


@dataclass
class SearchResult:
    outcome: Outcome
    sequences: dict
    branches: int
    states: int


def _argmin(costs: dict):
    best = None
    for v in costs.values():
        if v is not None and (best is None or v < best):
            best = v
    if best is None:
        return None, []
    return best, sorted(c for c, v in costs.items() if v == best)


def _components(proc, state, ties):
    owner = {}
    parent = {c: c for c in ties}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in ties:
        for g in proc.link_groups(state, c):
            if g in owner:
                a, b = find(owner[g]), find(c)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[g] = c
    comps = {}
    for c in ties:
        comps.setdefault(find(c), []).append(c)
    return sorted(comps.values(), key=lambda comp: (len(comp), comp[0]))


def _swap(x, y):
    def f(c):
        if c == x:
            return y
        if c == y:
            return x
        return c
    return f


class _Search:
    def __init__(self, proc, k, max_branches, reduce, on_step):
        self.proc = proc
        self.k = k
        self.max_branches = max_branches
        self.reduce = reduce and proc.monotone
        self.on_step = on_step
        self.memo = {}
        self.branches = 0
        self.flags = set()
        self.partial = False

    def _count(self, amount=1):
        self.branches += amount
        if self.branches > self.max_branches:
            raise BranchExplosion(f"more than {self.max_branches} branches explored")

    def explore(self, state, costs):
        hit = self.memo.get(state)
        if hit is not None:
            return hit
        result = self._expand(state, costs)
        self.memo[state] = result
        return result

    def _expand(self, state, costs):
        proc = self.proc
        r = self.k - len(state.chosen)
        if r == 0:
            return {frozenset(): ()}
        best, ties = _argmin(costs)
        if best is None:
            action = proc.exhausted(state)
            if action[0] == "phase":
                nxt = action[1]
                return self.explore(nxt, proc.costs(nxt))
            if action[0] == "stop":
                self.partial = True
                return {frozenset(): ()}
            self.flags.add(action[1])
            return self._fill(state, r)
        if proc.shortcut(state, best):
            return self._fill(state, r)
        branch = ties
        if self.reduce and len(ties) > 1:
            comps = _components(proc, state, ties)
            if r > len(ties) - len(comps[0]):
                branch = comps[0]
        if self.reduce:
            groups = self._symmetry_classes(state, branch)
        else:
            groups = [[c] for c in branch]
        out = {}
        for members in groups:
            x = members[0]
            self._count()
            if self.on_step is not None:
                self.on_step(state, x, ties, best)
            nxt, changed = proc.apply(state, x, costs[x])
            child = self.explore(nxt, proc.update_costs(nxt, costs, changed))
            for comp, suffix in child.items():
                out.setdefault(comp | {x}, (x,) + suffix)
            for y in members[1:]:
                self._count()
                if self.on_step is not None:
                    self.on_step(state, y, ties, best)
                sigma = _swap(x, y)
                for comp, suffix in child.items():
                    mapped = frozenset(map(sigma, comp))
                    out.setdefault(mapped | {y}, (y,) + tuple(map(sigma, suffix)))
        return out

    def _symmetry_classes(self, state, branch):
        buckets = {}
        classes = []
        for c in branch:
            bucket = buckets.setdefault(self.proc.symmetry_key(state, c), [])
            for members in bucket:
                if self.proc.swappable(state, members[0], c):
                    members.append(c)
                    break
            else:
                bucket.append([c])
                classes.append(bucket[-1])
        return classes

    def _fill(self, state, r):
        rest = [c for c in range(self.proc.profile.m) if c not in state.chosen]
        total = math.comb(len(rest), r)
        self._count(total)
        return {frozenset(sub): sub for sub in itertools.combinations(rest, r)}


def search(rule, instance: ElectionInstance, max_branches=DEFAULT_MAX_BRANCHES,
           reduce=True, on_step=None) -> SearchResult:
    """Explore all valid sequences of ``rule`` and collect the committees.

    ``on_step(state, candidate, ties, cost)`` is called for every explored
    branch.  With ``reduce=False`` every tie branch is explored explicitly.
    """
    proc = rule.process(instance.profile, instance.k)
    engine = _Search(proc, instance.k, max_branches, reduce, on_step)
    needed = 4 * instance.k + 1000
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)
    root = proc.root()
    completions = engine.explore(root, proc.costs(root))
    outcome = Outcome(frozenset(completions), frozenset(engine.flags), engine.partial)
    return SearchResult(outcome, dict(completions), engine.branches, len(engine.memo))


def enumerate_outcomes(rule, instance: ElectionInstance, max_branches=DEFAULT_MAX_BRANCHES,
                       reduce=True, on_step=None) -> Outcome:
    return search(rule, instance, max_branches, reduce, on_step).outcome


# ------------------------------------------------------------ query access


def replay(rule, profile: Profile, k: int, sequence):
    """State reached by picking ``sequence`` in order, plus the process."""
    proc = rule.process(profile, k)
    state = proc.root()
    for c in sequence:
        costs = proc.costs(state)
        if all(v is None for v in costs.values()):
            action = proc.exhausted(state)
            if action[0] == "phase":
                state = action[1]
                costs = proc.costs(state)
        state, _ = proc.apply(state, c, costs.get(c))
    return proc, state


def query(rule, profile: Profile, k: int, sequence=()) -> set:
    """The query set ``g(A, k, sequence)`` of a sequential rule."""
    proc, state = replay(rule, profile, k, sequence)
    costs = proc.costs(state)
    best, ties = _argmin(costs)
    if best is None:
        action = proc.exhausted(state)
        if action[0] == "phase":
            best, ties = _argmin(proc.costs(action[1]))
        elif action[0] == "stop":
            return set()
        if best is None:
            return set(costs)
    return set(ties)


def marginal_scores(profile: Profile, partial, s: ScoringFunction) -> dict:
    partial = frozenset(partial)
    out = {}
    for c in range(profile.m):
        if c in partial:
            continue
        gain = Fraction(0)
        for g in profile.groups:
            if c in g.ballot:
                x = len(g.ballot & partial)
                gain += g.weight * (s(x + 1) - s(x))
        out[c] = gain
    return out


def seq_thiele_query(profile: Profile, k: int, seq, s: ScoringFunction) -> set:
    scores = marginal_scores(profile, seq, s)
    best = max(scores.values())
    return {c for c, v in scores.items() if v == best}


@dataclass(frozen=True)
class PhragmenState:
    loads: tuple
    sequence: tuple = ()


@dataclass(frozen=True)
class MesState:
    budgets: tuple
    sequence: tuple = ()
    phase: str = "one"


def fresh_phragmen_state(profile: Profile) -> PhragmenState:
    return PhragmenState((Fraction(0),) * len(profile.groups))


def fresh_mes_state(profile: Profile, k: int) -> MesState:
    return MesState((Fraction(k, profile.n),) * len(profile.groups))


def phragmen_query(profile: Profile, k: int, state: PhragmenState) -> set:
    """All ``(candidate, successor)`` pairs minimising the Phragmén load."""
    proc = PhragmenProcess(profile, k)
    inner = State(frozenset(state.sequence), tuple(state.loads), 2)
    best, ties = _argmin(proc.costs(inner))
    if best is None:
        raise NoBuyer("no remaining candidate has an approver")
    out = set()
    for c in ties:
        nxt, _ = proc.apply(inner, c, best)
        out.add((c, PhragmenState(nxt.values, state.sequence + (c,))))
    return out


def mes_phase1_query(profile: Profile, k: int, state: MesState) -> set:
    """All ``(candidate, successor)`` pairs of minimal price; empty when none is affordable."""
    if state.phase != "one":
        raise InvariantError("phase-1 query on a phase-2 state")
    proc = MesProcess(profile, k)
    inner = State(frozenset(state.sequence), tuple(state.budgets), 1)
    best, ties = _argmin(proc.costs(inner))
    out = set()
    for c in ties:
        nxt, _ = proc.apply(inner, c, best)
        out.add((c, MesState(nxt.values, state.sequence + (c,))))
    return out


def mes_prices(profile: Profile, k: int, sequence) -> list:
    """Price paid per voter (``rho``) for each candidate of a phase-1 sequence."""
    state = fresh_mes_state(profile, k)
    prices = []
    for c in sequence:
        options = dict(mes_phase1_query(profile, k, state))
        if c not in options:
            raise InvariantError(f"candidate {c} is not a valid phase-1 choice")
        budgets = [(state.budgets[g], profile.groups[g].weight) for g in profile.supporters(c)]
        prices.append(mes_rho(budgets))
        state = options[c]
    return prices


def mes_phase2(profile: Profile, k: int, state: MesState, max_branches=DEFAULT_MAX_BRANCHES) -> set:
    """Completed sequences reachable in phase 2 from a finished phase 1.

    Each voter's leftover budget keeps growing at unit rate; a candidate is
    bought as soon as its supporters hold one unit in total.
    """
    proc = MesProcess(profile, k)
    inner = State(frozenset(state.sequence), tuple(state.budgets), 1)
    best, _ = _argmin(proc.costs(inner))
    if best is not None:
        raise InvariantError("phase 1 is not finished: some candidate is still affordable")
    start = State(inner.chosen, tuple(-b for b in inner.values), 2)
    engine = _Search(proc, k, max_branches, True, None)
    completions = engine.explore(start, proc.costs(start))
    return {tuple(state.sequence) + suffix for suffix in completions.values()}


def phragmen_money_ties(profile: Profile, sequence, initial_budgets=None, chosen=()) -> list:
    """Tie sets of seqPhragmén along ``sequence``, by simulating budgets over time.

    Independent of the load recurrence: voters earn money continuously, a
    candidate is bought at the first moment her supporters can pay one unit,
    and the buyers' budgets drop to zero.  ``initial_budgets`` (per group) and
    ``chosen`` allow starting from the end of MES phase 1.  Returns one
    ``(time, ties)`` pair per step.
    """
    weights = [g.weight for g in profile.groups]
    support = [[i for i, g in enumerate(profile.groups) if c in g.ballot] for c in range(profile.m)]
    if initial_budgets is None:
        initial_budgets = [0] * len(weights)
    budgets = [Fraction(b) for b in initial_budgets]
    now = Fraction(0)
    chosen = set(chosen)
    steps = []
    for c in sequence:
        times = {}
        for d in range(profile.m):
            if d in chosen or not support[d]:
                continue
            have = sum(weights[g] * budgets[g] for g in support[d])
            rate = sum(weights[g] for g in support[d])
            times[d] = now + max(Fraction(0), 1 - have) / rate
        if not times:
            steps.append((None, sorted(d for d in range(profile.m) if d not in chosen)))
            chosen.add(c)
            continue
        first = min(times.values())
        steps.append((first, sorted(d for d, t in times.items() if t == first)))
        budgets = [b + (first - now) for b in budgets]
        now = first
        for g in support[c]:
            budgets[g] = Fraction(0)
        chosen.add(c)
    return steps


def phragmen_load_ties(profile: Profile, sequence) -> list:
    """Same as :func:`phragmen_money_ties` but through the load recurrence."""
    proc = PhragmenProcess(profile, len(sequence) or 1)
    state = proc.root()
    steps = []
    for c in sequence:
        costs = proc.costs(state)
        best, ties = _argmin(costs)
        if best is None:
            ties = sorted(costs)
        steps.append((best, ties))
        state, _ = proc.apply(state, c, costs[c])
    return steps


# --------------------------------------------------------------- axioms


def av_winners(profile: Profile) -> set:
    scores = approval_scores(profile)
    best = max(scores)
    return {c for c, v in enumerate(scores) if v == best}


def check_standardness(rule, instance: ElectionInstance) -> bool:
    return query(rule, instance.profile, instance.k, ()) == av_winners(instance.profile)


def concurrence_premise(profile: Profile, k: int, seq, c: int, d: int) -> bool:
    if any(len(g.ballot) > 2 for g in profile.groups):
        return False
    scores = approval_scores(profile)
    if len(set(scores)) != 1 or scores[0] * k > profile.n:
        return False
    if c in seq or d in seq or c == d:
        return False

    def count(ballot):
        ballot = frozenset(ballot)
        return next((g.weight for g in profile.groups if g.ballot == ballot), 0)

    strict = False
    for cj in seq:
        with_d, with_c = count({cj, d}), count({cj, c})
        if with_d < with_c:
            return False
        strict = strict or with_d > with_c
    return strict


def check_concurrence(rule, profile: Profile, k: int, seq, c: int, d: int) -> str:
    """``"premise_fails"``, ``"holds"`` (d is not in the query set) or ``"violated"``."""
    seq = tuple(seq)
    if not concurrence_premise(profile, k, seq, c, d):
        return "premise_fails"
    return "violated" if d in query(rule, profile, k, seq) else "holds"


def continuity_gap(rule, base: Profile, extra: Profile, k: int, seq, lam: int) -> set:
    """Candidates in ``g(lam*base + extra)`` but not in ``g(base)`` for one fixed ``lam``.

    A non-empty result only shows that this particular ``lam`` is too small;
    no finite number of calls verifies continuity.
    """
    combined = base.scaled(lam) + extra
    return query(rule, combined, k, seq) - query(rule, base, k, seq)
