"""Counterexample instances behind the impossibility results, as executable data."""

from __future__ import annotations

from dataclasses import dataclass, field

from .checks import (
    VIOLATION,
    Refutation,
    ViolationReport,
    check_weak_reinforcement,
    normalisation_refutation,
)
from .model import Instance, Profile
from .rules import get_rule

Outcome = frozenset  # frozenset[frozenset[str]]


def _outcome(*allocs: str) -> Outcome:
    """``_outcome("p1,p3", "")`` -> {{p1, p3}, {}}."""
    return frozenset(frozenset(x for x in a.split(",") if x) for a in allocs)


def _by_score(counts: dict[str, int]) -> Profile:
    """Single-project ballots replicating the given approval scores."""
    return Profile(tuple(frozenset({p}) for p, k in counts.items() for _ in range(k)))


@dataclass(frozen=True)
class Fixture:
    """A counterexample instance with the profiles that refute a rule.

    ``argument`` is ``"weak-reinforcement"`` (``profiles[0]`` and
    ``profiles[1]`` agree but their concatenation does not) or
    ``"normalisation"`` (single-ballot outcomes force contradictory
    probabilities between ``truths[0]`` and ``truths[1]``).
    """

    name: str
    instance: Instance
    profiles: tuple[Profile, ...]
    refutes: tuple[str, ...]
    argument: str
    expected: dict[str, tuple[Outcome, ...]]
    expected_joint: dict[str, Outcome] = field(default_factory=dict)
    truths: tuple[frozenset[str], ...] = ()

    @property
    def joint(self) -> Profile:
        return self.profiles[0] + self.profiles[1]


def phragmen_fixture() -> Fixture:
    # The second profile has five agents; the {p1,p4} agent is required for
    # the stated purchase prices (p1 at 1/4 per voter) and final outcome.
    inst = Instance.from_costs([1, 1, 1, 1], 3)
    a1 = Profile.parse("p1|p1,p3,p4|p2,p3,p4|p2,p3,p4|p2,p3,p4")
    a2 = Profile.parse("p2|p1,p3|p1,p3|p1,p4|p1,p3,p4")
    return Fixture(
        name="phragmen",
        instance=inst,
        profiles=(a1, a2),
        refutes=("phragmen",),
        argument="weak-reinforcement",
        expected={"phragmen": (_outcome("p1,p3,p4"), _outcome("p1,p3,p4"))},
        expected_joint={"phragmen": _outcome("p1,p2,p3")},
    )


def mes_fixture() -> Fixture:
    inst = Instance.from_costs([1, 1], 2)
    a1 = Profile.parse("p1|p2")
    a2 = Profile.parse("p1,p2|p1,p2")
    both = _outcome("p1,p2")
    return Fixture(
        name="mes",
        instance=inst,
        profiles=(a1, a2),
        refutes=("mes-card", "mes-cost"),
        argument="weak-reinforcement",
        expected={"mes-card": (both, both), "mes-cost": (both, both)},
        expected_joint={"mes-card": _outcome("p1", "p2"), "mes-cost": _outcome("p1", "p2")},
    )


def greedy_fixture() -> Fixture:
    inst = Instance.from_costs([2, 2, 3], 4)
    a = _by_score({"p1": 10, "p2": 1, "p3": 9})
    b = _by_score({"p1": 1, "p2": 10, "p3": 9})
    return Fixture(
        name="greedy",
        instance=inst,
        profiles=(a, b),
        refutes=("greedy",),
        argument="weak-reinforcement",
        expected={"greedy": (_outcome("p1,p2"), _outcome("p1,p2"))},
        expected_joint={"greedy": _outcome("p3")},
    )


def two_project_fixture() -> Fixture:
    inst = Instance.from_costs([1, 1], 2)
    profiles = tuple(Profile.parse(s) for s in ("-", "p1", "p2", "p1,p2"))
    outcomes = (
        _outcome("", "p1", "p2", "p1,p2"),
        _outcome("p1", "p1,p2"),
        _outcome("p2", "p1,p2"),
        _outcome("p1,p2"),
    )
    rules = ("nash-card", "nash-cost", "util-card", "util-cost")
    return Fixture(
        name="two-project",
        instance=inst,
        profiles=profiles,
        refutes=rules,
        argument="normalisation",
        expected={r: outcomes for r in rules},
        truths=(frozenset({"p1"}), frozenset({"p1", "p2"})),
    )


def builtin_fixtures() -> list[Fixture]:
    return [phragmen_fixture(), mes_fixture(), greedy_fixture(), two_project_fixture()]


@dataclass
class FixtureCheck:
    """Result of replaying one fixture against one rule."""

    fixture: str
    rule: str
    reproduced: bool
    violation: ViolationReport | None = None
    refutation: Refutation | None = None

    @property
    def refuted(self) -> bool:
        if self.violation is not None:
            return True
        return self.refutation is not None and self.refutation.contradiction


def verify_fixture(fx: Fixture) -> list[FixtureCheck]:
    checks = []
    for rule in fx.refutes:
        fn = get_rule(rule)
        got = tuple(fn(fx.instance, p).as_sets() for p in fx.profiles)
        reproduced = got == fx.expected[rule]
        if fx.argument == "weak-reinforcement":
            result = check_weak_reinforcement(rule, fx.instance, fx.profiles[0], fx.profiles[1])
            joint = result.outcome_joint.as_sets() if result.outcome_joint is not None else None
            reproduced = reproduced and joint == fx.expected_joint[rule]
            violation = result.report if result.status == VIOLATION else None
            checks.append(FixtureCheck(fx.name, rule, reproduced, violation=violation))
        else:
            ref = normalisation_refutation(rule, fx.instance, *fx.truths)
            checks.append(FixtureCheck(fx.name, rule, reproduced, refutation=ref))
    return checks


def verify_counterexamples() -> list[FixtureCheck]:
    return [c for fx in builtin_fixtures() for c in verify_fixture(fx)]
