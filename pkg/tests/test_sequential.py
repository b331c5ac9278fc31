import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from abcpart import sequential as seq
from abcpart.errors import BranchExplosion, InvariantError
from abcpart.generators import concurrence_profile
from abcpart.model import ElectionInstance, normalize_profile
from abcpart.rules import compute_outcome, parse_rule
from strategies import instances


def oracle_committees(name, inst):
    voters = oracles.expand(inst.profile)
    m, k = inst.m, inst.k
    if name in ("seqav", "seqpav", "seqccav"):
        score = {"seqav": oracles.av, "seqpav": oracles.harmonic, "seqccav": oracles.cc}[name]
        return oracles.valid_committees(oracles.thiele_query(voters, m, score), m, k)
    if name == "phragmen":
        return oracles.valid_committees(oracles.phragmen_money_query(voters, m), m, k)
    return oracles.mes_committees(voters, m, k, phase1_only=name == "mes:phase1")


SEQUENTIAL = ("seqav", "seqpav", "seqccav", "phragmen", "mes", "mes:phase1")


@settings(max_examples=120, deadline=None)
@given(instances(max_weight=2))
def test_rules_match_voter_level_oracles(inst):
    for name in SEQUENTIAL:
        assert compute_outcome(parse_rule(name), inst).committees == oracle_committees(name, inst), name


@st.composite
def cloned_instances(draw):
    """Profiles with repeated structure so that ties and symmetric candidates are common."""
    m = draw(st.integers(3, 8))
    base = draw(st.lists(st.frozensets(st.integers(0, m - 1), min_size=1, max_size=3),
                         min_size=1, max_size=4))
    weight = draw(st.integers(1, 3))
    raw = [(b, weight) for b in base]
    shift = draw(st.integers(1, m - 1))
    raw += [(frozenset((c + shift) % m for c in b), weight) for b in base]
    profile = normalize_profile(raw, m)
    return ElectionInstance(profile, draw(st.integers(1, min(5, m - 1))))


@settings(max_examples=150, deadline=None)
@given(cloned_instances())
def test_reductions_preserve_outcomes(inst):
    for name in SEQUENTIAL:
        rule = parse_rule(name)
        reduced = seq.search(rule, inst)
        full = seq.search(rule, inst, reduce=False)
        assert reduced.outcome == full.outcome, name
        assert reduced.branches <= full.branches


@settings(max_examples=80, deadline=None)
@given(cloned_instances())
def test_recorded_sequences_are_valid(inst):
    for name in ("seqpav", "phragmen", "mes"):
        result = seq.search(parse_rule(name), inst)
        for committee, order in result.sequences.items():
            assert frozenset(order) == committee
            for i, c in enumerate(order):
                assert c in seq.query(parse_rule(name), inst.profile, inst.k, order[:i])


@pytest.mark.parametrize("budgets,expected", [
    ([(Fraction(1, 2), 2)], Fraction(1, 2)),
    ([(Fraction(1, 10), 1), (Fraction(1), 1)], Fraction(9, 10)),
    ([(Fraction(1, 10), 1), (Fraction(1, 3), 3)], Fraction(3, 10)),
    ([(Fraction(1, 5), 4)], None),
    ([(Fraction(1, 4), 4)], Fraction(1, 4)),
])
def test_mes_rho(budgets, expected):
    assert seq.mes_rho(budgets) == expected
    voters = [b for b, w in budgets for _ in range(w)]
    assert oracles.equal_shares_rho(voters) == expected


def test_phase1_truncation_and_fallback():
    # only two approved candidates for k = 3
    inst = ElectionInstance(normalize_profile([({0}, 3), ({1}, 1)], 4), 3)
    mes = compute_outcome(parse_rule("mes"), inst)
    assert "fallback" in mes.flags
    assert mes.committees == {frozenset({0, 1, 2}), frozenset({0, 1, 3})}
    phase1 = compute_outcome(parse_rule("mes:phase1"), inst)
    assert phase1.partial and phase1.committees == {frozenset({0})}


def test_query_rule_and_errors():
    first = seq.QueryRule(lambda p, k, s: {min(set(range(p.m)) - set(s))}, "lowest")
    inst = ElectionInstance(normalize_profile([({3}, 1)], 5), 3)
    assert compute_outcome(first, inst).committees == {frozenset({0, 1, 2})}
    broken = seq.QueryRule(lambda p, k, s: set(), "empty")
    with pytest.raises(InvariantError):
        compute_outcome(broken, inst)
    everything = ElectionInstance(normalize_profile([(set(range(12)), 1)], 12), 6)
    with pytest.raises(BranchExplosion):
        seq.search(parse_rule("phragmen"), everything, max_branches=50, reduce=False)


def test_on_step_sees_every_branch():
    inst = ElectionInstance(normalize_profile([({0, 1}, 1), ({2}, 1)], 3), 2)
    calls = []
    seq.search(parse_rule("seqpav"), inst, reduce=False,
               on_step=lambda state, c, ties, cost: calls.append((tuple(sorted(state.chosen)), c)))
    assert ((), 0) in calls and ((), 1) in calls and ((0,), 2) in calls


@settings(max_examples=60, deadline=None)
@given(instances())
def test_standardness(inst):
    for name in ("seqav", "seqpav", "seqccav", "phragmen", "mes"):
        assert seq.check_standardness(parse_rule(name), inst)


def test_concurrence_scan():
    inst = concurrence_profile()
    verdicts = {}
    for name in ("seqpav", "seqccav", "phragmen", "mes", "seqav"):
        rule = parse_rule(name)
        found = []
        for length in range(inst.k):
            for prefix in itertools.permutations(range(inst.m), length):
                for c, d in itertools.permutations(range(inst.m), 2):
                    found.append(seq.check_concurrence(rule, inst.profile, inst.k, prefix, c, d))
        verdicts[name] = found
    for name in ("seqpav", "seqccav", "phragmen", "mes"):
        assert "holds" in verdicts[name] and "violated" not in verdicts[name], name
    assert "violated" in verdicts["seqav"]


def test_continuity_gap_closes_for_large_lambda():
    # base: a has 2 approvals, b has 1; extra: two {b} voters
    base = normalize_profile([({0}, 2), ({1}, 1)], 3)
    extra = normalize_profile([({1}, 2)], 3)
    rule = parse_rule("seqpav")
    assert seq.continuity_gap(rule, base, extra, 2, (), 1) == {1}
    assert seq.continuity_gap(rule, base, extra, 2, (), 2) == {1}
    assert seq.continuity_gap(rule, base, extra, 2, (), 3) == set()


@settings(max_examples=60, deadline=None)
@given(instances())
def test_money_and_load_formulations_agree(inst):
    for order in seq.search(parse_rule("phragmen"), inst).sequences.values():
        assert seq.phragmen_load_ties(inst.profile, order) == seq.phragmen_money_ties(inst.profile, order)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_state_queries(inst):
    p, k = inst.profile, inst.k
    first = seq.query(parse_rule("phragmen"), p, k)
    if any(p.supporters(c) for c in range(p.m)):
        assert {c for c, _ in seq.phragmen_query(p, k, seq.fresh_phragmen_state(p))} == first
    state = seq.fresh_mes_state(p, k)
    sequence = []
    while True:
        options = seq.mes_phase1_query(p, k, state)
        if not options or len(sequence) == k:
            break
        c, state = min(options, key=lambda o: o[0])
        sequence.append(c)
    assert seq.mes_prices(p, k, sequence) == oracles.mes_prices(oracles.expand(p), p.m, k, sequence)
    if len(sequence) < k:
        full = {frozenset(s) for s in seq.mes_phase2(p, k, state)}
        mes = compute_outcome(parse_rule("mes"), inst).committees
        assert full <= mes
