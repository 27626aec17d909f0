import math
from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from pbmle.estimators import (
    EqualShares,
    GreedyCostApproval,
    MaximumLikelihood,
    NoiseModel,
    SequentialPhragmen,
    WelfareRule,
)
from pbmle.fixtures import phragmen_fixture
from pbmle.validation import (
    check_approval_matrix,
    check_instance,
    matrix_from_profile,
    profile_from_matrix,
)


def test_phragmen_estimator():
    fx = phragmen_fixture()
    X = matrix_from_profile(fx.profiles[0], fx.instance)
    est = SequentialPhragmen(costs=[1, 1, 1, 1], budget=3)
    np.testing.assert_array_equal(est.fit_predict(X), [[True, False, True, True]])
    assert est.winning_sets_ == [["p1", "p3", "p4"]]
    assert est.n_agents_ == 5 and est.n_features_in_ == 4


def test_get_params_and_clone():
    est = EqualShares(satisfaction="cost", costs=[1, 2], budget=2)
    params = est.get_params()
    assert params == {"satisfaction": "cost", "costs": [1, 2], "budget": 2, "project_ids": None, "branch_cap": None}
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    twin.set_params(satisfaction="card")
    assert est.satisfaction == "cost"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        WelfareRule().winning_sets_
    with pytest.raises(NotFittedError):
        MaximumLikelihood().score([[1]])


def test_welfare_and_greedy():
    assert WelfareRule("nash-card", costs=[1, 1], budget=2).fit([[1, 0]]).winning_sets_ == [["p1"], ["p1", "p2"]]
    greedy = GreedyCostApproval(costs=[2, 2, 3], budget=4, project_ids=["a", "b", "c"])
    assert greedy.fit([[0, 0, 1], [1, 1, 0], [1, 0, 0]]).winning_sets_ == [["a", "b"]]


def test_mle_estimator():
    est = MaximumLikelihood("m-ncost", costs=[1, 1], budget=2).fit([[1, 0], [0, 1]])
    assert est.winning_sets_ == [["p1", "p2"]]
    assert est.likelihood_ == Fraction(1, 16)
    assert est.score([[1, 0]]) == pytest.approx(math.log(1 / 4))
    est = MaximumLikelihood("m-ncost", costs=[1, 1], budget=1).fit([[1, 0]])
    assert est.score([[0, 1]]) == -math.inf


def test_noise_model():
    nm = NoiseModel("m-app", truth=["p1"], costs=[1, 1], budget=2)
    X = nm.sample(100, random_state=4)
    assert X.shape == (100, 2) and X.dtype == bool
    np.testing.assert_array_equal(X, nm.sample(100, random_state=4))
    assert nm.ballot_proba([[0, 0], [1, 1]]) == [Fraction(1, 6), Fraction(1, 3)]
    assert nm.likelihood([[1, 1]]) == Fraction(1, 3)


def test_validation_helpers():
    with pytest.raises(ValueError):
        check_approval_matrix([1, 0])
    with pytest.raises(ValueError):
        check_approval_matrix([[2, 0]])
    with pytest.raises(ValueError):
        check_approval_matrix([["a"]])
    with pytest.raises(ValueError):
        check_approval_matrix([[1, 0]], n_projects=3)
    with pytest.raises(ValueError):
        check_instance([1, 1.5], 2)
    with pytest.raises(ValueError):
        check_instance([1, 1], 2, project_ids=["a"])
    inst = check_instance({"x": 1, "y": 2}, 3)
    prof = profile_from_matrix(np.array([[1, 1], [0, 0]]), inst)
    assert prof.format(inst) == "x,y|-"
    np.testing.assert_array_equal(matrix_from_profile(prof, inst), [[True, True], [False, False]])
