"""Sequential Phragmén and the Method of Equal Shares, irresolute and exact.

Both rules branch on every tie and explore each distinct intermediate state
once; ``runs`` functions expose one purchase log per distinct terminal state
so money flows can be audited.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import BranchLimitError, EmptyProfileError, StructuralError
from .model import Instance, Profile, RuleOutcome, resolve_branch_cap


@dataclass(frozen=True)
class Purchase:
    """One selected project with what each approver paid.

    ``at`` is the elapsed time for Phragmén and the minimal alpha for MES.
    """

    project: str
    at: Fraction
    payments: tuple[tuple[int, Fraction], ...]

    @property
    def total(self) -> Fraction:
        return sum((amount for _, amount in self.payments), Fraction(0))


@dataclass(frozen=True)
class Run:
    purchases: tuple[Purchase, ...]
    balances: tuple[Fraction, ...]
    stopped_on_overflow: bool = False

    @property
    def selected(self) -> frozenset[str]:
        return frozenset(p.project for p in self.purchases)


def _approvers(inst: Instance, prof: Profile) -> dict[str, tuple[int, ...]]:
    return {
        p: tuple(i for i, ballot in enumerate(prof.ballots) if p in ballot)
        for p in inst.ids
    }


def _check_profile(inst: Instance, prof: Profile) -> None:
    if len(prof) == 0:
        raise EmptyProfileError("the rule needs at least one agent")
    prof.validate(inst)


def phragmen_runs(inst: Instance, prof: Profile, branch_cap: int | None = None) -> list[Run]:
    """Simulate the continuous virtual-money process event by event.

    Every agent earns money at rate 1. A project with approvers ``N`` and
    approver balance ``s`` at time ``t`` becomes affordable at
    ``t + (c - s) / |N|``. At the earliest such time the process stops if any
    of the affordable projects would overflow the budget; otherwise each of
    them is tried in turn, its approvers' balances being reset to zero.
    """
    _check_profile(inst, prof)
    cap = resolve_branch_cap(branch_cap)
    approvers = _approvers(inst, prof)
    costs = inst.costs
    zero = Fraction(0)
    start = (frozenset(), (zero,) * len(prof), zero, ())
    seen: set = set()
    runs: dict[frozenset[str], Run] = {}
    stack = [start]
    while stack:
        selected, balances, t, log = stack.pop()
        key = (selected, balances, t)
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > cap:
            raise BranchLimitError(f"Phragmén tie branching exceeded {cap} states")

        events: dict[str, Fraction] = {}
        for p in inst.ids:
            if p in selected or not approvers[p]:
                continue
            need = costs[p] - sum(balances[i] for i in approvers[p])
            events[p] = t + max(need, zero) / len(approvers[p])
        if not events:
            runs.setdefault(selected, Run(log, balances))
            continue
        t_next = min(events.values())
        ready = [p for p in inst.ids if events.get(p) == t_next]
        spent = inst.cost_of(selected)
        elapsed = t_next - t
        grown = tuple(x + elapsed for x in balances)
        if any(spent + costs[p] > inst.budget for p in ready):
            runs.setdefault(selected, Run(log, grown, stopped_on_overflow=True))
            continue
        for p in reversed(ready):
            paid = tuple((i, grown[i]) for i in approvers[p])
            after = list(grown)
            for i in approvers[p]:
                after[i] = zero
            stack.append((selected | {p}, tuple(after), t_next, log + (Purchase(p, t_next, paid),)))
    return [runs[s] for s in sorted(runs, key=lambda s: sorted(inst.index[p] for p in s))]


def sequential_phragmen(inst: Instance, prof: Profile, branch_cap: int | None = None) -> RuleOutcome:
    """Sequential Phragmén over all tie-breaking branches."""
    runs = phragmen_runs(inst, prof, branch_cap)
    return RuleOutcome(tuple(inst.allocation(r.selected) for r in runs))


@dataclass(frozen=True)
class SatisfactionFunction:
    """Positive per-project satisfaction levels ``mu(p)``."""

    kind: str
    values: Mapping[str, Fraction]

    def __post_init__(self):
        bad = {p: v for p, v in self.values.items() if not v > 0}
        if bad:
            raise ValueError(f"satisfaction levels must be positive, got {bad}")

    @classmethod
    def card(cls, inst: Instance) -> SatisfactionFunction:
        return cls("card", {p: Fraction(1) for p in inst.ids})

    @classmethod
    def cost(cls, inst: Instance) -> SatisfactionFunction:
        return cls("cost", {p.id: Fraction(p.cost) for p in inst.projects})

    @classmethod
    def custom(cls, values: Mapping[str, int | Fraction]) -> SatisfactionFunction:
        return cls("custom", {p: Fraction(v) for p, v in values.items()})

    @classmethod
    def resolve(cls, choice, inst: Instance) -> SatisfactionFunction:
        if isinstance(choice, SatisfactionFunction):
            return choice
        if choice == "card":
            return cls.card(inst)
        if choice == "cost":
            return cls.cost(inst)
        if isinstance(choice, Mapping):
            return cls.custom(choice)
        raise ValueError(f"unknown satisfaction function {choice!r}; use 'card', 'cost' or a mapping")


def minimal_alpha(budgets: list[Fraction], cost: int, mu: Fraction) -> Fraction | None:
    """Smallest alpha with ``sum(min(b_i, alpha * mu)) >= cost``, or None if unaffordable.

    With budgets sorted ascending, if the ``k`` poorest agents pay everything
    they have and the rest pay ``alpha * mu`` each, then
    ``alpha = (cost - sum of the k smallest) / ((m - k) * mu)``; the first
    ``k`` for which this share does not exceed the next budget is the answer.
    """
    budgets = sorted(budgets)
    if sum(budgets, Fraction(0)) < cost:
        return None
    paid = Fraction(0)
    m = len(budgets)
    for k, b in enumerate(budgets):
        share = (cost - paid) / (m - k)
        if share <= b:
            return share / mu
        paid += b
    raise AssertionError("unreachable: total budget covers the cost")


def mes_runs(
    inst: Instance,
    prof: Profile,
    satisfaction="card",
    branch_cap: int | None = None,
) -> list[Run]:
    """Run MES with budgets ``b / n``, branching over every minimal-alpha tie."""
    _check_profile(inst, prof)
    mu = SatisfactionFunction.resolve(satisfaction, inst)
    missing = set(inst.ids) - set(mu.values)
    if missing:
        raise StructuralError(f"satisfaction function lacks projects {sorted(missing)}")
    cap = resolve_branch_cap(branch_cap)
    approvers = _approvers(inst, prof)
    costs = inst.costs
    start = (frozenset(), (Fraction(inst.budget, len(prof)),) * len(prof), ())
    seen: set = set()
    runs: dict[frozenset[str], Run] = {}
    stack = [start]
    while stack:
        selected, budgets, log = stack.pop()
        key = (selected, budgets)
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > cap:
            raise BranchLimitError(f"MES tie branching exceeded {cap} states")

        alphas: dict[str, Fraction] = {}
        for p in inst.ids:
            if p in selected or not approvers[p]:
                continue
            a = minimal_alpha([budgets[i] for i in approvers[p]], costs[p], mu.values[p])
            if a is not None:
                alphas[p] = a
        if not alphas:
            runs.setdefault(selected, Run(log, budgets))
            continue
        best = min(alphas.values())
        for p in reversed([p for p in inst.ids if alphas.get(p) == best]):
            share = best * mu.values[p]
            paid = tuple((i, min(budgets[i], share)) for i in approvers[p])
            after = list(budgets)
            for i, amount in paid:
                after[i] -= amount
            stack.append((selected | {p}, tuple(after), log + (Purchase(p, best, paid),)))
    return [runs[s] for s in sorted(runs, key=lambda s: sorted(inst.index[p] for p in s))]


def method_of_equal_shares(
    inst: Instance,
    prof: Profile,
    satisfaction="card",
    branch_cap: int | None = None,
) -> RuleOutcome:
    """MES for the satisfaction function ``satisfaction`` ('card', 'cost' or a mapping)."""
    runs = mes_runs(inst, prof, satisfaction, branch_cap)
    return RuleOutcome(tuple(inst.allocation(r.selected) for r in runs))


mes = method_of_equal_shares
