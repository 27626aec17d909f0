"""Name-based registry of every rule, shared by the checks, experiments and CLI."""

from __future__ import annotations

from collections.abc import Callable
from functools import partial

from .model import Instance, Profile, RuleOutcome
from .proportional import method_of_equal_shares, sequential_phragmen
from .welfare import SCORE_KINDS, argmax_rule, greedy_cost_approval, score

Rule = Callable[[Instance, Profile], RuleOutcome]

PROPORTIONAL_RULES = ("phragmen", "mes-card", "mes-cost")
RULE_NAMES = SCORE_KINDS + ("greedy",) + PROPORTIONAL_RULES


def get_rule(rule) -> Rule:
    """Resolve a rule name (or pass a callable through)."""
    if callable(rule):
        return rule
    if rule in SCORE_KINDS:
        return partial(argmax_rule, rule)
    if rule == "greedy":
        return greedy_cost_approval
    if rule == "phragmen":
        return sequential_phragmen
    if rule in ("mes-card", "mes-cost"):
        return partial(method_of_equal_shares, satisfaction=rule.split("-")[1])
    raise ValueError(f"unknown rule {rule!r}; expected one of {', '.join(RULE_NAMES)}")


def rule_name(rule) -> str:
    if isinstance(rule, str):
        return rule
    return getattr(rule, "__name__", repr(rule))


def rule_score(rule, inst: Instance, prof: Profile, alloc):
    """Welfare score of ``alloc`` for argmax rules; None for procedural rules."""
    if rule in SCORE_KINDS:
        return score(rule, inst, prof, alloc)
    return None
