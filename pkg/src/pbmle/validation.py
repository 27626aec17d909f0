"""Input validation and conversion between approval matrices and profiles."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .model import Instance, Profile, RuleOutcome


def check_instance(costs, budget, project_ids: Sequence[str] | None = None) -> Instance:
    """Build a validated Instance from estimator parameters."""
    if isinstance(costs, dict):
        if project_ids is not None:
            raise ValueError("give project ids either as cost-mapping keys or as project_ids, not both")
        return Instance.from_costs({str(k): _as_int(v, "cost") for k, v in costs.items()}, _as_int(budget, "budget"))
    costs = [_as_int(c, "cost") for c in np.asarray(costs).ravel().tolist()]
    if project_ids is not None:
        ids = [str(p) for p in project_ids]
        if len(ids) != len(costs):
            raise ValueError(f"{len(ids)} project ids for {len(costs)} costs")
        return Instance.from_costs(dict(zip(ids, costs)), _as_int(budget, "budget"))
    return Instance.from_costs(costs, _as_int(budget, "budget"))


def _as_int(value, what: str) -> int:
    if isinstance(value, (bool, np.bool_)):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)) and float(value).is_integer():
        return int(value)
    raise ValueError(f"{what} must be an integer, got {value!r}")


def check_approval_matrix(X, n_projects: int | None = None) -> np.ndarray:
    """Validate a binary (n_agents, n_projects) approval matrix and return it as bool."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D approval matrix, got {X.ndim}-D input")
    if n_projects is not None and X.shape[1] != n_projects:
        raise ValueError(f"X has {X.shape[1]} columns but the instance has {n_projects} projects")
    if X.dtype != bool:
        if not np.issubdtype(X.dtype, np.number):
            raise ValueError(f"approval matrix must be numeric or boolean, got dtype {X.dtype}")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("approval matrix entries must be 0 or 1")
        X = X.astype(bool)
    return X


def profile_from_matrix(X, inst: Instance) -> Profile:
    X = check_approval_matrix(X, len(inst))
    ids = inst.ids
    return Profile(tuple(frozenset(ids[j] for j in np.flatnonzero(row)) for row in X))


def matrix_from_profile(prof: Profile, inst: Instance) -> np.ndarray:
    prof.validate(inst)
    X = np.zeros((len(prof), len(inst)), dtype=bool)
    for i, ballot in enumerate(prof.ballots):
        for p in ballot:
            X[i, inst.index[p]] = True
    return X


def outcome_matrix(outcome: RuleOutcome, inst: Instance) -> np.ndarray:
    """Indicator rows of the winning allocations, in canonical order."""
    M = np.zeros((len(outcome), len(inst)), dtype=bool)
    for i, alloc in enumerate(outcome):
        for p in alloc.projects:
            M[i, inst.index[p]] = True
    return M
