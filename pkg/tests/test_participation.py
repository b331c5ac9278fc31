import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from abcpart import participation as part
from abcpart.errors import AllVotersAbstain, InvariantError
from abcpart.generators import mes_unrep_instance
from abcpart.model import ElectionInstance, Outcome, abstain, normalize_profile
from abcpart.rules import compute_outcome, parse_rule
from strategies import instances


def outcome(*committees):
    return Outcome(frozenset(frozenset(w) for w in committees))


@pytest.mark.parametrize("x,y,ballot,expected", [
    (outcome({0, 1}), outcome({0, 2}), {1}, part.STRICT),
    (outcome({0, 1}), outcome({0, 2}), {0}, part.WEAK),
    (outcome({0, 2}), outcome({0, 1}), {1}, part.NONE),
    (outcome({0, 1}, {1, 2}), outcome({0, 2}), {1}, part.STRICT),
    (outcome({0, 1}, {0, 2}), outcome({0, 1}), {1}, part.NONE),
    (outcome({0, 1}), outcome({0, 1}, {2, 3}), {0, 1}, part.STRICT),
    (outcome({0, 1}, {2, 3}), outcome({0, 2}, {1, 3}), {0, 1}, part.NONE),
])
def test_kelly_compare(x, y, ballot, expected):
    assert part.kelly_compare(x, y, ballot) == expected


def independent_benefit(outcome_fn, inst, group):
    """Abstention benefit recomputed from oracle outcomes on voter lists."""
    before = outcome_fn(inst)
    after = outcome_fn(ElectionInstance(abstain(inst.profile, group), inst.k))
    ballot = inst.profile.groups[group].ballot
    xs = [len(w & ballot) for w in after]
    ys = [len(w & ballot) for w in before]
    return min(xs) >= max(ys) and max(xs) > min(ys)


def oracle_outcome(name):
    def fn(inst):
        voters = oracles.expand(inst.profile)
        if name == "seqpav":
            return oracles.valid_committees(oracles.thiele_query(voters, inst.m, oracles.harmonic), inst.m, inst.k)
        if name == "mes":
            return oracles.mes_committees(voters, inst.m, inst.k)
        return oracles.brute_force_scoring(voters, inst.m, inst.k, oracles.harmonic)
    return fn


@settings(max_examples=80, deadline=None)
@given(instances(max_weight=2))
def test_scan_matches_independent_check(inst):
    if inst.profile.n < 2:
        return
    for name in ("seqpav", "mes", "pav"):
        found = {w.abstainers[0][0] for w in part.scan_participation(parse_rule(name), inst)}
        expected = {g for g in range(len(inst.profile.groups))
                    if independent_benefit(oracle_outcome(name), inst, g)}
        assert found == expected, name


def test_mes_unrepresented_witness():
    red = mes_unrep_instance()
    rule = parse_rule("mes")
    w = part.benefits_by_abstaining(rule, red.instance, red.abstainer)
    assert w is not None
    assert w.approvals_before == ((0,) * len(w.outcome_before),)
    assert part.max_approvals_for(rule, red.instance, red.abstainer) == 0
    data = w.to_dict(red.profile.labels)
    assert data["abstainers"] == [{"group": red.abstainer, "count": 1}]
    assert all("c" in comm for comm in data["outcome_after"])
    assert red.abstainer in part.unrepresented_groups(w.outcome_before, red.instance)


def test_abstainer_multisets():
    inst = ElectionInstance(normalize_profile([({0}, 2), ({1}, 1)], 2), 1)
    combos = set(part.abstainer_multisets(inst, 2))
    assert combos == {((0, 1),), ((1, 1),), ((0, 2),), ((0, 1), (1, 1))}
    with pytest.raises(AllVotersAbstain):
        part.group_benefits(parse_rule("av"), inst, [(0, 2), (1, 1)])
    with pytest.raises(InvariantError):
        part.group_benefits(parse_rule("av"), inst, [(0, 0)])


@settings(max_examples=40, deadline=None)
@given(instances(), st.data())
def test_is_outcome(inst, data):
    rule = parse_rule(data.draw(st.sampled_from(["pav", "seqpav", "phragmen"])))
    actual = compute_outcome(rule, inst)
    assert part.is_outcome(rule, inst, actual.committees)
    others = [frozenset(w) for w in itertools.combinations(range(inst.m), inst.k)
              if frozenset(w) not in actual.committees]
    if others:
        assert not part.is_outcome(rule, inst, set(actual.committees) | {others[0]})
        assert not part.is_outcome(rule, inst, [others[0]])


def test_single_approval_robustness():
    inst = ElectionInstance(normalize_profile([({0}, 2), ({1}, 2)], 3), 1)
    change = part.single_approval_robustness(parse_rule("pav"), inst)
    assert change is not None
    modified = part.modify_single_approval(inst, change.group, change.candidate)
    assert compute_outcome(parse_rule("pav"), modified).committees == change.outcome_after.committees
    assert change.outcome_after.committees != change.outcome_before.committees
    stable = ElectionInstance(normalize_profile([({0}, 5), ({1}, 1)], 3), 1)
    assert part.single_approval_robustness(parse_rule("av"), stable) is None
