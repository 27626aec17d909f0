"""scikit-learn style wrappers: rules as estimators of the ground-truth allocation.

Input ``X`` is a binary approval matrix of shape (n_agents, n_projects);
the instance (costs, budget, optional project ids) is given as estimator
parameters. After ``fit``, ``outcome_`` holds the exact
:class:`~pbmle.model.RuleOutcome` and ``winners_`` its indicator matrix.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .mle import check_space, mle
from .noise import check_model, ballot_probability, likelihood, sample_profile
from .proportional import method_of_equal_shares, sequential_phragmen
from .validation import (
    check_approval_matrix,
    check_instance,
    matrix_from_profile,
    outcome_matrix,
    profile_from_matrix,
)
from .welfare import argmax_rule, check_kind, greedy_cost_approval


class _RuleEstimator(BaseEstimator):
    def _run(self, inst, prof):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Run the rule on the approval matrix ``X``; ``y`` is ignored."""
        inst = check_instance(self.costs, self.budget, self.project_ids)
        X = check_approval_matrix(X, len(inst))
        prof = profile_from_matrix(X, inst)
        self.instance_ = inst
        self.n_features_in_ = X.shape[1]
        self.n_agents_ = X.shape[0]
        self.outcome_ = self._run(inst, prof)
        self.winners_ = outcome_matrix(self.outcome_, inst)
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).winners_

    @property
    def winning_sets_(self) -> list[list[str]]:
        check_is_fitted(self, "outcome_")
        return self.outcome_.to_lists()


class WelfareRule(_RuleEstimator):
    """Argmax rule for one of the eight welfare scores (e.g. ``"nash-norm-cost"``)."""

    def __init__(self, kind="util-card", costs=(1,), budget=1, project_ids=None):
        self.kind = kind
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids

    def _run(self, inst, prof):
        return argmax_rule(check_kind(self.kind), inst, prof)


class GreedyCostApproval(_RuleEstimator):
    def __init__(self, costs=(1,), budget=1, project_ids=None, branch_cap=None):
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids
        self.branch_cap = branch_cap

    def _run(self, inst, prof):
        return greedy_cost_approval(inst, prof, self.branch_cap)


class SequentialPhragmen(_RuleEstimator):
    def __init__(self, costs=(1,), budget=1, project_ids=None, branch_cap=None):
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids
        self.branch_cap = branch_cap

    def _run(self, inst, prof):
        return sequential_phragmen(inst, prof, self.branch_cap)


class EqualShares(_RuleEstimator):
    """Method of Equal Shares with ``satisfaction`` ``"card"``, ``"cost"`` or a mapping."""

    def __init__(self, satisfaction="card", costs=(1,), budget=1, project_ids=None, branch_cap=None):
        self.satisfaction = satisfaction
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids
        self.branch_cap = branch_cap

    def _run(self, inst, prof):
        return method_of_equal_shares(inst, prof, self.satisfaction, self.branch_cap)


class MaximumLikelihood(_RuleEstimator):
    """Brute-force MLE of the ground truth under a noise model.

    Attributes
    ----------
    likelihood_ : Fraction
        Exact likelihood of the fitted profile under any winner.
    """

    def __init__(self, model="m-ncost", space="all", costs=(1,), budget=1, project_ids=None):
        self.model = model
        self.space = space
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids

    def _run(self, inst, prof):
        outcome = mle(check_model(self.model), inst, prof, check_space(self.space))
        self.likelihood_ = likelihood(self.model, inst, outcome.winners[0], prof)
        return outcome

    def score(self, X, y=None) -> float:
        """Log-likelihood of ``X`` under the first fitted winner (``-inf`` if impossible)."""
        check_is_fitted(self, "outcome_")
        prof = profile_from_matrix(X, self.instance_)
        value = likelihood(self.model, self.instance_, self.outcome_.winners[0], prof)
        if value == 0:
            return -math.inf
        return math.log(value.numerator) - math.log(value.denominator)


class NoiseModel(BaseEstimator):
    """Generative ballot model with a fixed ground truth; ``sample`` draws approval matrices."""

    def __init__(self, model="m-app", truth=(), costs=(1,), budget=1, project_ids=None):
        self.model = model
        self.truth = truth
        self.costs = costs
        self.budget = budget
        self.project_ids = project_ids

    def _instance(self):
        return check_instance(self.costs, self.budget, self.project_ids)

    def sample(self, n_samples=1, random_state=0) -> np.ndarray:
        inst = self._instance()
        prof = sample_profile(check_model(self.model), inst, frozenset(self.truth), int(n_samples), random_state)
        return matrix_from_profile(prof, inst)

    def ballot_proba(self, X) -> list:
        """Exact probability of each row of ``X``."""
        inst = self._instance()
        prof = profile_from_matrix(X, inst)
        return [ballot_probability(self.model, inst, frozenset(self.truth), b) for b in prof]

    def likelihood(self, X):
        inst = self._instance()
        return likelihood(self.model, inst, frozenset(self.truth), profile_from_matrix(X, inst))
