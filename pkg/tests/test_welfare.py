from fractions import Fraction

import pytest
from hypothesis import given

from pbmle import Instance, Profile, approval_score, argmax_rule, greedy_cost_approval, score
from pbmle.errors import BranchLimitError, StructuralError
from pbmle.fixtures import greedy_fixture, phragmen_fixture
from pbmle.model import enumerate_allocations, is_unit_cost
from pbmle.welfare import SCORE_KINDS

from conftest import S, instance_and_profile

TWO = Instance.from_costs([1, 1], 2)
GREEDY = Instance.from_costs([2, 2, 3], 4)


def test_util_card_score():
    assert score("util-card", TWO, Profile.parse("p1|p2"), TWO.allocation({"p1", "p2"})).value == 2


def test_nash_norm_card_single_common_project():
    # two agents sharing p* and splitting b other projects between them
    b = 4
    inst = Instance.from_costs({"ps": 1, **{f"q{i}": 1 for i in range(1, b + 1)}}, b)
    prof = Profile((frozenset({"ps", "q1", "q3"}), frozenset({"ps", "q2", "q4"})))
    assert score("nash-norm-card", inst, prof, inst.allocation({"ps"})).value == 1
    spread = inst.allocation({"q1", "q2", "q3", "q4"})
    assert score("nash-norm-card", inst, prof, spread).value == Fraction(1, 4)
    assert argmax_rule("nash-norm-card", inst, prof).as_sets() == S("ps")


def test_nash_degenerate():
    s = score("nash-card", TWO, Profile.parse("p1"), TWO.allocation({"p2"}))
    assert s.value == 0 and s.degenerate


def test_normalised_empty_allocation_is_degenerate():
    for kind in ("util-norm-card", "util-norm-cost", "nash-norm-card", "nash-norm-cost"):
        s = score(kind, TWO, Profile.parse("p1"), TWO.allocation())
        assert s.value == 0 and s.degenerate


def test_nash_card_two_project_instance():
    assert argmax_rule("nash-card", TWO, Profile.parse("p1")).as_sets() == S("p1", "p1,p2")
    assert argmax_rule("nash-card", TWO, Profile.parse("p1,p2")).as_sets() == S("p1,p2")
    assert argmax_rule("nash-card", TWO, Profile.parse("-")).as_sets() == S("", "p1", "p2", "p1,p2")
    assert argmax_rule("nash-norm-card", TWO, Profile.parse("p1")).as_sets() == S("p1")


def test_unknown_kind():
    with pytest.raises(ValueError):
        argmax_rule("nash-foo", TWO, Profile.parse("p1"))


def test_greedy_fixture_scores():
    fx = greedy_fixture()
    a, b = fx.profiles
    assert greedy_cost_approval(GREEDY, a).as_sets() == S("p1,p2")
    assert greedy_cost_approval(GREEDY, b).as_sets() == S("p1,p2")
    assert greedy_cost_approval(GREEDY, a + b).as_sets() == S("p3")
    assert [approval_score(a + b, p) for p in GREEDY.ids] == [11, 11, 18]


def test_greedy_skips_and_continues():
    inst = Instance.from_costs([3, 2, 1], 4)
    prof = Profile.parse("p1|p1|p1|p2|p2|p3")
    # p1 (3) taken, p2 (2) skipped, p3 (1) fits
    assert greedy_cost_approval(inst, prof).as_sets() == S("p1,p3")


def test_greedy_ties_branch():
    inst = Instance.from_costs([1, 1, 1], 2)
    assert greedy_cost_approval(inst, Profile.parse("-")).as_sets() == S("p1,p2", "p1,p3", "p2,p3")


def test_greedy_branch_cap(monkeypatch):
    inst = Instance.from_costs([1] * 6, 3)
    with pytest.raises(BranchLimitError):
        greedy_cost_approval(inst, Profile.parse("-"), branch_cap=5)
    monkeypatch.setenv("PB_EPISTEMIC_BRANCH_CAP", "5")
    with pytest.raises(BranchLimitError):
        greedy_cost_approval(inst, Profile.parse("-"))


def test_approval_score():
    fx = phragmen_fixture()
    assert approval_score(fx.profiles[0], "p3") == 4
    assert approval_score(Profile.parse("p1"), "p2") == 0
    with pytest.raises(StructuralError):
        approval_score(Profile.parse("p1"), "p9", TWO)


@given(instance_and_profile(max_projects=5, unit=True))
def test_greedy_matches_util_card_on_unit_cost(case):
    inst, prof = case
    greedy = greedy_cost_approval(inst, prof).as_sets()
    exhaustive = enumerate_allocations(inst, exhaustive_only=True)
    assert greedy == argmax_rule("util-card", inst, prof, candidates=exhaustive).as_sets()


@given(instance_and_profile(max_projects=5))
def test_greedy_outputs_exhaustive(case):
    inst, prof = case
    assert all(a.is_exhaustive() for a in greedy_cost_approval(inst, prof))


@given(instance_and_profile(max_projects=4, unit=True))
def test_unit_cost_coincidence(case):
    inst, prof = case
    assert is_unit_cost(inst)
    assert argmax_rule("util-card", inst, prof) == argmax_rule("util-cost", inst, prof)
    assert argmax_rule("nash-card", inst, prof) == argmax_rule("nash-cost", inst, prof)


@given(instance_and_profile(max_projects=4))
def test_conditional_exhaustiveness(case):
    inst, prof = case
    if any(approval_score(prof, p) == 0 for p in inst.ids):
        return
    for kind in ("util-card", "util-cost"):
        assert all(a.is_exhaustive() for a in argmax_rule(kind, inst, prof))
    for kind in ("nash-card", "nash-cost"):
        for a in argmax_rule(kind, inst, prof):
            if score(kind, inst, prof, a).value > 0:
                assert a.is_exhaustive()


@given(instance_and_profile(max_projects=4))
def test_scores_are_exact_and_decomposable(case):
    inst, prof = case
    for kind in SCORE_KINDS:
        for a in enumerate_allocations(inst):
            whole = score(kind, inst, prof, a).value
            assert isinstance(whole, (int, Fraction))
            parts = [score(kind, inst, Profile((b,)), a).value for b in prof]
            if kind.startswith("util"):
                assert whole == sum(parts)
            else:
                expected = Fraction(1)
                for x in parts:
                    expected *= x
                assert whole == expected
