import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbmle import Instance, Profile, builtin_fixtures, check_weak_reinforcement, fuzz_weak_reinforcement
from pbmle.checks import (
    NOT_APPLICABLE,
    PASS,
    VIOLATION,
    FuzzSpace,
    check_monotonic_conditions,
    indicator_score,
    normalisation_refutation,
)
from pbmle.fixtures import (
    greedy_fixture,
    mes_fixture,
    two_project_fixture,
    phragmen_fixture,
    verify_counterexamples,
)
from pbmle.model import enumerate_allocations
from pbmle.welfare import SCORE_KINDS

from conftest import S, instances, profiles


def test_builtin_fixtures_shape():
    fixtures = builtin_fixtures()
    assert len(fixtures) == 4
    assert phragmen_fixture().instance.budget == 3
    g = greedy_fixture().instance
    assert tuple(p.cost for p in g.projects) == (2, 2, 3) and g.budget == 4


def test_fixture_violations():
    fx = phragmen_fixture()
    r = check_weak_reinforcement("phragmen", fx.instance, *fx.profiles)
    assert r.status == VIOLATION
    assert r.report.outcome_joint.as_sets() == S("p1,p2,p3")

    fx = mes_fixture()
    for rule in ("mes-card", "mes-cost"):
        r = check_weak_reinforcement(rule, fx.instance, *fx.profiles)
        assert r.status == VIOLATION
        assert r.outcome_joint.as_sets() <= S("p1", "p2")

    fx = greedy_fixture()
    r = check_weak_reinforcement("greedy", fx.instance, *fx.profiles)
    assert r.status == VIOLATION
    assert (r.outcome_a.as_sets(), r.outcome_joint.as_sets()) == (S("p1,p2"), S("p3"))


def test_verify_counterexamples_all_reproduce():
    checks = verify_counterexamples()
    assert len(checks) == 8
    assert all(c.reproduced and c.refuted for c in checks)
    assert sum(c.violation is not None for c in checks) == 4


def test_disjoint_outcomes():
    # the concatenated outcome shares no allocation with the common outcome
    for fx in (phragmen_fixture(), mes_fixture()):
        for rule in fx.refutes:
            common = fx.expected[rule][0]
            assert not common & fx.expected_joint[rule]


def test_two_project_refutation():
    fx = two_project_fixture()
    for rule in fx.refutes:
        ref = normalisation_refutation(rule, fx.instance, *fx.truths)
        assert ref.contradiction
        assert ref.relations[("p1",)] == "="
        assert ref.relations[("p2",)] == "<"


def test_normalisation_refutation_inconclusive_for_mle():
    inst = Instance.from_costs([1, 1], 2)
    ref = normalisation_refutation("nash-norm-card", inst, {"p1"}, {"p1", "p2"})
    assert not ref.contradiction


def test_not_applicable():
    inst = Instance.from_costs([1, 1], 1)
    r = check_weak_reinforcement("util-card", inst, Profile.parse("p1"), Profile.parse("p2"))
    assert r.status == NOT_APPLICABLE and r.outcome_joint is None


def test_fuzz_finds_phragmen_violation():
    s = fuzz_weak_reinforcement("phragmen", 3000, seed=0, space=FuzzSpace(max_agents=9))
    assert s.violations >= 1
    assert s.first_report is not None and s.first_trial is not None


def test_greedy_unit_cost_never_violates():
    # on unit-cost instances greedy maximises a sum of approval scores over
    # exhaustive allocations, so the fuzz cannot find a violation there
    assert fuzz_weak_reinforcement("greedy", 2000, seed=0).violations == 0


def test_fuzz_finds_greedy_violation_with_costs():
    s = fuzz_weak_reinforcement("greedy", 2000, seed=0, space=FuzzSpace(max_cost=3, max_agents=30))
    assert s.violations >= 1
    inst = s.first_report.instance
    assert len({p.cost for p in inst.projects}) > 1


def test_fuzz_rejects_zero_trials():
    with pytest.raises(ValueError):
        fuzz_weak_reinforcement("util-card", 0)


def test_fuzz_deterministic_and_parallel():
    a = fuzz_weak_reinforcement("mes-card", 400, seed=3)
    b = fuzz_weak_reinforcement("mes-card", 400, seed=3)
    c = fuzz_weak_reinforcement("mes-card", 400, seed=3, n_jobs=2)
    assert a.to_dict() == b.to_dict() == c.to_dict()


def test_fuzz_welfare_rule_small():
    s = fuzz_weak_reinforcement("nash-norm-cost", 500, seed=1, space=FuzzSpace(max_cost=3))
    assert s.violations == 0 and s.applicable > 0


@given(instances(max_projects=3), st.data())
def test_monotonic_conditions_hold(inst, data):
    a = data.draw(profiles(inst, 0, 3))
    b = data.draw(profiles(inst, 0, 3))
    allocs = enumerate_allocations(inst)
    x = data.draw(st.sampled_from(allocs))
    y = data.draw(st.sampled_from(allocs))
    for kind in SCORE_KINDS:
        assert check_monotonic_conditions(kind, inst, a, b, x, y) == PASS


def test_indicator_score_is_not_monotonic():
    fx = phragmen_fixture()
    score = indicator_score("phragmen")
    x = fx.instance.allocation({"p1", "p3", "p4"})
    y = fx.instance.allocation({"p1", "p2", "p3"})
    result = check_monotonic_conditions(score, fx.instance, *fx.profiles, x, y)
    assert result == "condition-1-violation"


@given(instances(max_projects=3), st.data())
def test_welfare_rules_never_violate(inst, data):
    a = data.draw(profiles(inst, 1, 3))
    b = data.draw(profiles(inst, 1, 3))
    for kind in SCORE_KINDS:
        assert check_weak_reinforcement(kind, inst, a, b).status in (PASS, NOT_APPLICABLE)
