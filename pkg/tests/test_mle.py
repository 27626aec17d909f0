import pytest
from hypothesis import given

from pbmle import Instance, Profile, argmax_rule, greedy_cost_approval, mle, mle_matches_rule
from pbmle.errors import EnumerationLimitError
from pbmle.mle import check_space, truth_space
from pbmle.model import enumerate_allocations

from conftest import S, instance_and_profile

TWO = Instance.from_costs([1, 1], 2)


def test_mle_examples():
    assert mle("m-ncost", TWO, Profile.parse("p1|p2")).as_sets() == S("p1,p2")
    assert mle("m-app", TWO, Profile.parse("p1,p2")).as_sets() == S("p1,p2")
    unit = Instance.from_costs([1, 1, 1], 2)
    assert mle("m-app", unit, Profile.parse("-"), "exhaustive").as_sets() == S("p1,p2", "p1,p3", "p2,p3")


def test_all_zero_likelihood_returns_space():
    # m-napp: every truth misses the empty ballot
    assert mle("m-napp", TWO, Profile.parse("-")).as_sets() == S("", "p1", "p2", "p1,p2")
    assert mle("m-napp", TWO, Profile.parse("-"), "nondegenerate").as_sets() == S("p1", "p2", "p1,p2")


def test_space_names():
    assert check_space("exhaustive-only") == "exhaustive"
    assert check_space("all-feasible") == "all"
    with pytest.raises(ValueError):
        check_space("some")
    assert {a.projects for a in truth_space("m-ncost", TWO, "nondegenerate")} == S("p1", "p2", "p1,p2")
    assert {a.projects for a in truth_space("m-app", TWO, "nondegenerate")} == S("", "p1", "p2", "p1,p2")


def test_cap():
    with pytest.raises(EnumerationLimitError):
        mle("m-app", Instance.from_costs([1] * 5, 2), Profile.parse("p1"), cap=4)


def test_m_app_all_space_discrepancy():
    report = mle_matches_rule("m-app", "util-card", TWO, Profile.parse("p1"))
    assert not report.equal
    assert report.only_mle or report.only_rule


@given(instance_and_profile(max_projects=4, max_cost=4, max_agents=4))
def test_nash_norm_mle_equivalence(case):
    inst, prof = case
    assert mle_matches_rule("m-ncost", "nash-norm-cost", inst, prof).equal
    assert mle_matches_rule("m-napp", "nash-norm-card", inst, prof).equal


@given(instance_and_profile(max_projects=4, unit=True, max_agents=4))
def test_m_app_unit_cost_exhaustive(case):
    inst, prof = case
    exhaustive = enumerate_allocations(inst, exhaustive_only=True)
    estimate = mle("m-app", inst, prof, "exhaustive")
    assert estimate == argmax_rule("util-card", inst, prof, candidates=exhaustive)
    assert estimate == greedy_cost_approval(inst, prof)
    assert mle_matches_rule("m-app", "util-card", inst, prof, "exhaustive").equal


@given(instance_and_profile(max_projects=4, max_agents=3))
def test_mle_scale_free(case):
    inst, prof = case
    for kind in ("m-app", "m-ncost", "m-napp"):
        assert mle(kind, inst, prof) == mle(kind, inst, prof + prof)
