"""Welfare-maximising argmax rules and the greedy cost approval rule.

Nash scores live in product space: an allocation leaving some agent with
zero satisfaction scores exactly 0, which is the minimum of every Nash
score, so degenerate allocations can only win when all allocations are
degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import prod

from .errors import BranchLimitError, StructuralError
from .model import (
    Allocation,
    Instance,
    Profile,
    RuleOutcome,
    enumerate_allocations,
    resolve_branch_cap,
)

SCORE_KINDS = (
    "util-card",
    "util-cost",
    "util-norm-card",
    "util-norm-cost",
    "nash-card",
    "nash-cost",
    "nash-norm-card",
    "nash-norm-cost",
)


@total_ordering
@dataclass(frozen=True)
class Score:
    """Exact score of an allocation; ordered by ``value`` only."""

    value: Fraction
    degenerate: bool = False

    def __eq__(self, other):
        if not isinstance(other, Score):
            return NotImplemented
        return self.value == other.value

    def __lt__(self, other):
        if not isinstance(other, Score):
            return NotImplemented
        return self.value < other.value

    def __hash__(self):
        return hash(self.value)


def check_kind(kind: str) -> str:
    if kind not in SCORE_KINDS:
        raise ValueError(f"unknown score kind {kind!r}; expected one of {', '.join(SCORE_KINDS)}")
    return kind


def _satisfactions(kind: str, inst: Instance, ballots, projects: frozenset[str]) -> list[int]:
    if kind.endswith("card"):
        return [len(a & projects) for a in ballots]
    costs = inst.costs
    return [sum(costs[p] for p in a & projects) for a in ballots]


def score_value(kind: str, inst: Instance, ballots, projects: frozenset[str]) -> Score:
    """Score of the project set ``projects`` on a sequence of ballots."""
    sats = _satisfactions(kind, inst, ballots, projects)
    normalised = "-norm-" in kind
    if normalised:
        size = len(projects) if kind.endswith("card") else inst.cost_of(projects)
        if size == 0:
            return Score(Fraction(0), True)
    if kind.startswith("util"):
        total = sum(sats)
        return Score(Fraction(total, size) if normalised else Fraction(total))
    product = prod(sats)
    if product == 0:
        return Score(Fraction(0), True)
    return Score(Fraction(product, size ** len(sats)) if normalised else Fraction(product))


def score(kind: str, inst: Instance, prof: Profile, alloc) -> Score:
    """Score of a feasible allocation under one of the eight welfare functions."""
    check_kind(kind)
    projects = alloc.projects if isinstance(alloc, Allocation) else inst.allocation(alloc).projects
    return score_value(kind, inst, prof.ballots, projects)


def argmax_rule(
    kind: str,
    inst: Instance,
    prof: Profile,
    candidates=None,
    cap: int | None = None,
) -> RuleOutcome:
    """All allocations of maximal score among ``candidates`` (default: every feasible one)."""
    check_kind(kind)
    prof.validate(inst)
    if candidates is None:
        candidates = enumerate_allocations(inst, cap=cap)
    best = None
    winners: list[Allocation] = []
    ballots = prof.ballots
    for alloc in candidates:
        s = score_value(kind, inst, ballots, alloc.projects).value
        if best is None or s > best:
            best, winners = s, [alloc]
        elif s == best:
            winners.append(alloc)
    return RuleOutcome(tuple(winners))


def approval_score(prof: Profile, p: str, inst: Instance | None = None) -> int:
    """Number of ballots approving ``p``."""
    if inst is not None and p not in inst.costs:
        raise StructuralError(f"unknown project id {p!r}")
    return sum(1 for ballot in prof.ballots if p in ballot)


def greedy_cost_approval(inst: Instance, prof: Profile, branch_cap: int | None = None) -> RuleOutcome:
    """GREED over every strict ranking consistent with approval scores.

    Projects are scanned best-first and selected whenever they still fit; a
    project that does not fit is skipped and the scan continues. Ties in
    approval score are branched on, exploring each distinct intermediate
    state once.
    """
    prof.validate(inst)
    cap = resolve_branch_cap(branch_cap)
    budget = inst.budget
    costs = inst.costs
    scores = {p: approval_score(prof, p) for p in inst.ids}
    groups = [
        tuple(p for p in inst.ids if scores[p] == s)
        for s in sorted(set(scores.values()), reverse=True)
    ]

    results: set[frozenset[str]] = set()
    seen: set = set()
    stack = [(0, frozenset(groups[0]), frozenset(), 0)]
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        if len(seen) > cap:
            raise BranchLimitError(f"greedy tie branching exceeded {cap} states")
        gi, remaining, selected, spent = state
        if not remaining:
            if gi + 1 == len(groups):
                results.add(selected)
            else:
                stack.append((gi + 1, frozenset(groups[gi + 1]), selected, spent))
            continue
        slack = budget - spent
        fitting = [p for p in remaining if costs[p] <= slack]
        if not fitting:
            # scan order within the group is irrelevant: nothing fits
            stack.append((gi, frozenset(), selected, spent))
            continue
        if sum(costs[p] for p in fitting) <= slack:
            # every fitting project is taken whatever the order
            stack.append((gi, frozenset(), selected | frozenset(fitting),
                          spent + sum(costs[p] for p in fitting)))
            continue
        for p in inst.ordered(fitting):
            stack.append((gi, remaining - {p}, selected | {p}, spent + costs[p]))
    return RuleOutcome(tuple(inst.allocation(s) for s in results))
