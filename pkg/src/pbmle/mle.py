"""Brute-force maximum-likelihood estimation of the ground-truth allocation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import StructuralError
from .model import Allocation, Instance, Profile, RuleOutcome, enumerate_allocations
from .noise import check_model, is_degenerate, likelihood

TRUTH_SPACES = ("all", "exhaustive", "nondegenerate")
_SPACE_ALIASES = {
    "all-feasible": "all",
    "exhaustive-only": "exhaustive",
    "nondegenerate-only": "nondegenerate",
}


def check_space(space: str) -> str:
    space = _SPACE_ALIASES.get(space, space)
    if space not in TRUTH_SPACES:
        raise ValueError(f"unknown truth space {space!r}; expected one of {', '.join(TRUTH_SPACES)}")
    return space


def truth_space(kind: str, inst: Instance, space: str = "all", cap: int | None = None) -> tuple[Allocation, ...]:
    """Candidate ground truths: all feasible, exhaustive only, or those the model can condition on."""
    check_model(kind)
    space = check_space(space)
    if space == "exhaustive":
        candidates = enumerate_allocations(inst, exhaustive_only=True, cap=cap)
    else:
        candidates = enumerate_allocations(inst, cap=cap)
        if space == "nondegenerate":
            candidates = tuple(a for a in candidates if not is_degenerate(kind, inst, a))
    if not candidates:
        raise StructuralError(f"the {space} truth space of this instance is empty")
    return candidates


def mle(kind: str, inst: Instance, prof: Profile, space: str = "all", cap: int | None = None) -> RuleOutcome:
    """Every candidate ground truth of maximal likelihood.

    If every candidate has likelihood 0 the whole space is returned, the
    same convention the Nash welfare rules use for all-degenerate profiles.
    """
    prof.validate(inst)
    best = None
    winners: list[Allocation] = []
    for alloc in truth_space(kind, inst, space, cap):
        value = likelihood(kind, inst, alloc, prof)
        if best is None or value > best:
            best, winners = value, [alloc]
        elif value == best:
            winners.append(alloc)
    return RuleOutcome(tuple(winners))


@dataclass
class MatchReport:
    """Comparison of an MLE with a rule restricted to the same truth space.

    ``only_mle`` and ``only_rule`` map each differing allocation (as an
    instance-ordered id tuple) to ``(likelihood, rule score or None)``.
    ``outside_space`` lists rule winners that the truth space excludes.
    """

    equal: bool
    mle: RuleOutcome
    rule: RuleOutcome
    only_mle: dict[tuple[str, ...], tuple[Fraction, object]] = field(default_factory=dict)
    only_rule: dict[tuple[str, ...], tuple[Fraction, object]] = field(default_factory=dict)
    outside_space: list[tuple[str, ...]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equal


def mle_matches_rule(
    kind: str,
    rule,
    inst: Instance,
    prof: Profile,
    space: str = "all",
    cap: int | None = None,
) -> MatchReport:
    """Check whether ``rule`` returns exactly the MLE winners on ``(inst, prof)``.

    The rule's winners are intersected with the truth space before comparing,
    so a restricted space asks whether the rule is the MLE *under the
    assumption* that the truth lies in that space.
    """
    from .rules import get_rule, rule_score

    rule_fn = get_rule(rule)
    estimate = mle(kind, inst, prof, space, cap)
    outcome = rule_fn(inst, prof)
    allowed = {a.projects for a in truth_space(kind, inst, space, cap)}
    inside = {a.projects for a in outcome if a.projects in allowed}
    mle_sets = estimate.as_sets()

    def describe(projects):
        alloc = inst.allocation(projects)
        return tuple(alloc.ids), (likelihood(kind, inst, alloc, prof), rule_score(rule, inst, prof, alloc))

    report = MatchReport(
        equal=bool(inside) and inside == mle_sets,
        mle=estimate,
        rule=outcome,
        only_mle=dict(describe(s) for s in mle_sets - inside),
        only_rule=dict(describe(s) for s in inside - mle_sets),
        outside_space=[tuple(a.ids) for a in outcome if a.projects not in allowed],
    )
    return report
