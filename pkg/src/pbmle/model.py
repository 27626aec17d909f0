"""Instances, ballots, profiles and budget allocations.

Every quantity here is an integer; rational quantities elsewhere in the
package are :class:`fractions.Fraction`, never floats.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import EnumerationLimitError, InfeasibleAllocationError, StructuralError

DEFAULT_ENUMERATION_CAP = 20

Ballot = frozenset  # frozenset[str] of approved project ids


@dataclass(frozen=True)
class Project:
    id: str
    cost: int

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise StructuralError(f"project id must be a non-empty string, got {self.id!r}")
        if isinstance(self.cost, bool) or not isinstance(self.cost, int):
            raise StructuralError(f"cost of {self.id!r} must be an integer, got {self.cost!r}")
        if self.cost < 1:
            raise StructuralError(f"cost of {self.id!r} must be >= 1, got {self.cost}")


@dataclass(frozen=True)
class Instance:
    """A participatory budgeting instance: projects with costs and a budget limit."""

    projects: tuple[Project, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(self.projects))
        if not self.projects:
            raise StructuralError("an instance needs at least one project")
        ids = [p.id for p in self.projects]
        if len(set(ids)) != len(ids):
            raise StructuralError(f"duplicate project ids in {ids}")
        if isinstance(self.budget, bool) or not isinstance(self.budget, int):
            raise StructuralError(f"budget must be an integer, got {self.budget!r}")
        if self.budget < 1:
            raise StructuralError(f"budget must be >= 1, got {self.budget}")

    @classmethod
    def from_costs(cls, costs: Sequence[int] | Mapping[str, int], budget: int) -> Instance:
        """Build an instance from a cost list (ids ``p1..pn``) or an id->cost mapping."""
        if isinstance(costs, Mapping):
            items = list(costs.items())
        else:
            items = [(f"p{i + 1}", c) for i, c in enumerate(costs)]
        return cls(tuple(Project(pid, c) for pid, c in items), budget)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.projects)

    @cached_property
    def costs(self) -> dict[str, int]:
        return {p.id: p.cost for p in self.projects}

    @cached_property
    def index(self) -> dict[str, int]:
        return {pid: i for i, pid in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.projects)

    def check_ids(self, ids: Iterable[str]) -> frozenset[str]:
        ids = frozenset(ids)
        unknown = ids - self.costs.keys()
        if unknown:
            raise StructuralError(f"unknown project id(s): {sorted(unknown)}")
        return ids

    def cost_of(self, ids: Iterable[str]) -> int:
        costs = self.costs
        try:
            return sum(costs[p] for p in ids)
        except KeyError as exc:
            raise StructuralError(f"unknown project id: {exc.args[0]!r}") from None

    def ordered(self, ids: Iterable[str]) -> list[str]:
        """Return ``ids`` in instance order."""
        index = self.index
        return sorted(ids, key=index.__getitem__)

    def allocation(self, ids: Iterable[str] = ()) -> Allocation:
        return Allocation(self, frozenset(ids))


@dataclass(frozen=True)
class Profile:
    """An ordered sequence of approval ballots, one per agent."""

    ballots: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ballots", tuple(frozenset(b) for b in self.ballots))

    @classmethod
    def parse(cls, text: str) -> Profile:
        """Parse the inline form ``"p1|p2|p1,p2"``; ``-`` or an empty field is an empty ballot."""
        ballots = []
        for field_ in text.split("|"):
            field_ = field_.strip()
            if field_ in ("", "-", "{}"):
                ballots.append(frozenset())
            else:
                ballots.append(frozenset(s.strip() for s in field_.split(",") if s.strip()))
        return cls(tuple(ballots))

    def __add__(self, other: Profile) -> Profile:
        if not isinstance(other, Profile):
            return NotImplemented
        return Profile(self.ballots + other.ballots)

    def __len__(self) -> int:
        return len(self.ballots)

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.ballots)

    def __getitem__(self, i):
        return self.ballots[i]

    def __mul__(self, k: int) -> Profile:
        return Profile(self.ballots * k)

    def validate(self, inst: Instance) -> Profile:
        for i, ballot in enumerate(self.ballots):
            unknown = ballot - inst.costs.keys()
            if unknown:
                raise StructuralError(f"ballot {i} approves unknown project(s) {sorted(unknown)}")
        return self

    def format(self, inst: Instance | None = None) -> str:
        parts = []
        for b in self.ballots:
            ids = inst.ordered(b) if inst is not None else sorted(b)
            parts.append(",".join(ids) if ids else "-")
        return "|".join(parts)


@dataclass(frozen=True)
class Allocation:
    """A feasible set of projects. Equality and hashing use the project set only."""

    instance: Instance = field(compare=False, repr=False)
    projects: frozenset[str] = frozenset()

    def __post_init__(self):
        ids = self.instance.check_ids(self.projects)
        object.__setattr__(self, "projects", ids)
        if self.cost > self.instance.budget:
            raise InfeasibleAllocationError(
                f"allocation {self.ids} costs {self.cost} > budget {self.instance.budget}"
            )

    @cached_property
    def cost(self) -> int:
        return self.instance.cost_of(self.projects)

    @cached_property
    def ids(self) -> list[str]:
        return self.instance.ordered(self.projects)

    @cached_property
    def sort_key(self) -> tuple[int, ...]:
        index = self.instance.index
        return tuple(sorted(index[p] for p in self.projects))

    def is_exhaustive(self) -> bool:
        slack = self.instance.budget - self.cost
        return not any(p.cost <= slack for p in self.instance.projects if p.id not in self.projects)

    def __len__(self) -> int:
        return len(self.projects)

    def __iter__(self) -> Iterator[str]:
        return iter(self.ids)

    def __contains__(self, pid) -> bool:
        return pid in self.projects


@dataclass(frozen=True)
class RuleOutcome:
    """The nonempty, duplicate-free set of winning allocations of an irresolute rule.

    Winners are kept in canonical order: lexicographic on the instance-order
    index sequences of the allocations, so equal outcomes compare equal and
    serialise identically.
    """

    winners: tuple[Allocation, ...]

    def __post_init__(self):
        winners = tuple(sorted(set(self.winners), key=lambda a: a.sort_key))
        if not winners:
            raise StructuralError("a rule outcome must contain at least one allocation")
        object.__setattr__(self, "winners", winners)

    def as_sets(self) -> frozenset[frozenset[str]]:
        return frozenset(a.projects for a in self.winners)

    def to_lists(self) -> list[list[str]]:
        return [a.ids for a in self.winners]

    def __contains__(self, item) -> bool:
        projects = item.projects if isinstance(item, Allocation) else frozenset(item)
        return any(a.projects == projects for a in self.winners)

    def __len__(self) -> int:
        return len(self.winners)

    def __iter__(self) -> Iterator[Allocation]:
        return iter(self.winners)

    def __repr__(self) -> str:
        return "RuleOutcome(" + repr([set(a.ids) or "{}" for a in self.winners]) + ")"


def _as_projects(alloc) -> Iterable[str]:
    return alloc.projects if isinstance(alloc, Allocation) else alloc


def total_cost(alloc, inst: Instance) -> int:
    """Sum of the costs of the projects in ``alloc`` (an Allocation or iterable of ids)."""
    return inst.cost_of(_as_projects(alloc))


def is_exhaustive(alloc, inst: Instance) -> bool:
    """True iff no unselected project fits in the remaining budget."""
    selected = frozenset(_as_projects(alloc))
    slack = inst.budget - inst.cost_of(selected)
    return not any(p.cost <= slack for p in inst.projects if p.id not in selected)


def is_unit_cost(inst: Instance) -> bool:
    """True iff all projects share one cost ``l`` and the budget is a multiple of ``l``."""
    costs = {p.cost for p in inst.projects}
    return len(costs) == 1 and inst.budget % costs.pop() == 0


def check_enumeration_cap(inst: Instance, cap: int | None = None) -> None:
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if len(inst) > cap:
        raise EnumerationLimitError(
            f"{len(inst)} projects exceed the enumeration cap of {cap}"
        )


def enumerate_allocations(
    inst: Instance, exhaustive_only: bool = False, cap: int | None = None
) -> tuple[Allocation, ...]:
    """All feasible (or all exhaustive) allocations of ``inst`` in canonical order."""
    check_enumeration_cap(inst, cap)
    return _enumerate(inst, exhaustive_only)


@lru_cache(maxsize=4096)
def _enumerate(inst: Instance, exhaustive_only: bool) -> tuple[Allocation, ...]:
    projects = inst.projects
    budget = inst.budget
    found: list[tuple[int, ...]] = []

    # depth-first over include/exclude decisions, pruning infeasible branches
    def walk(i: int, chosen: tuple[int, ...], spent: int) -> None:
        if i == len(projects):
            found.append(chosen)
            return
        cost = projects[i].cost
        if spent + cost <= budget:
            walk(i + 1, chosen + (i,), spent + cost)
        walk(i + 1, chosen, spent)

    walk(0, (), 0)
    found.sort()
    allocs = (Allocation(inst, frozenset(projects[i].id for i in idx)) for idx in found)
    if exhaustive_only:
        return tuple(a for a in allocs if a.is_exhaustive())
    return tuple(allocs)


def enumerate_ballots(inst: Instance) -> Iterator[frozenset[str]]:
    """Every subset of the project set (2^|P| ballots), in bitmask order."""
    ids = inst.ids
    for mask in range(1 << len(ids)):
        yield frozenset(ids[i] for i in range(len(ids)) if mask >> i & 1)


DEFAULT_BRANCH_CAP = 10_000
BRANCH_CAP_ENV = "PB_EPISTEMIC_BRANCH_CAP"


def resolve_branch_cap(cap: int | None = None) -> int:
    """Explicit cap, else the ``PB_EPISTEMIC_BRANCH_CAP`` environment variable, else 10,000."""
    if cap is not None:
        return cap
    import os

    env = os.environ.get(BRANCH_CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise StructuralError(f"{BRANCH_CAP_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_BRANCH_CAP
