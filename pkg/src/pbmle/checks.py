"""Weak reinforcement, monotonicity of argmax scores, and MLE refutations.

Weak reinforcement is necessary for a rule to be a maximum likelihood
estimator under any noise model, so a single violating profile pair rules a
rule out; ``normalisation_refutation`` is the second refutation route,
deriving contradictory probability constraints from single-ballot outcomes.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .model import Instance, Profile, RuleOutcome, enumerate_ballots
from .noise import make_rng
from .rules import get_rule, rule_name
from .welfare import SCORE_KINDS, score

PASS = "pass"
VIOLATION = "violation"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class ViolationReport:
    rule: str
    instance: Instance
    profile_a: Profile
    profile_b: Profile
    outcome_a: RuleOutcome
    outcome_b: RuleOutcome
    outcome_joint: RuleOutcome

    def to_dict(self) -> dict:
        inst = self.instance
        return {
            "rule": self.rule,
            "instance": {"costs": inst.costs, "budget": inst.budget},
            "profile_a": self.profile_a.format(inst),
            "profile_b": self.profile_b.format(inst),
            "outcome_a": self.outcome_a.to_lists(),
            "outcome_b": self.outcome_b.to_lists(),
            "outcome_joint": self.outcome_joint.to_lists(),
        }


@dataclass(frozen=True)
class ReinforcementResult:
    """Outcome of one weak-reinforcement test.

    ``status`` is ``"not-applicable"`` when the two profiles already disagree
    (the implication holds vacuously); ``report`` is set only on violation.
    """

    status: str
    outcome_a: RuleOutcome
    outcome_b: RuleOutcome
    outcome_joint: RuleOutcome | None = None
    report: ViolationReport | None = None


def check_weak_reinforcement(rule, inst: Instance, prof_a: Profile, prof_b: Profile) -> ReinforcementResult:
    fn = get_rule(rule)
    out_a = fn(inst, prof_a)
    out_b = fn(inst, prof_b)
    if out_a != out_b:
        return ReinforcementResult(NOT_APPLICABLE, out_a, out_b)
    joint = fn(inst, prof_a + prof_b)
    if joint == out_a:
        return ReinforcementResult(PASS, out_a, out_b, joint)
    report = ViolationReport(rule_name(rule), inst, prof_a, prof_b, out_a, out_b, joint)
    return ReinforcementResult(VIOLATION, out_a, out_b, joint, report)


@dataclass(frozen=True)
class FuzzSpace:
    """Random instance/profile-pair generator parameters.

    Project counts are drawn from ``[min_projects, max_projects]``, costs from
    ``[1, max_cost]`` (``max_cost=1`` gives unit-cost instances), and the
    *combined* number of agents of the two profiles from ``[2, max_agents]``.
    Each ballot approves each project with probability ``density``.
    """

    min_projects: int = 1
    max_projects: int = 4
    max_cost: int = 1
    max_agents: int = 9
    density: float = 0.5

    def draw(self, rng: np.random.Generator) -> tuple[Instance, Profile, Profile]:
        m = int(rng.integers(self.min_projects, self.max_projects + 1))
        costs = [int(c) for c in rng.integers(1, self.max_cost + 1, size=m)]
        budget = int(rng.integers(1, sum(costs) + 1))
        inst = Instance.from_costs(costs, budget)
        n = int(rng.integers(2, self.max_agents + 1))
        n_a = int(rng.integers(1, n))
        approvals = rng.random((n, m)) < self.density
        ballots = [frozenset(inst.ids[j] for j in range(m) if row[j]) for row in approvals]
        return inst, Profile(tuple(ballots[:n_a])), Profile(tuple(ballots[n_a:]))


@dataclass
class FuzzSummary:
    rule: str
    trials: int
    applicable: int = 0
    violations: int = 0
    first_report: ViolationReport | None = None
    first_trial: int | None = None

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "trials": self.trials,
            "applicable": self.applicable,
            "violations": self.violations,
            "first_trial": self.first_trial,
            "first_report": self.first_report.to_dict() if self.first_report else None,
        }


def _fuzz_chunk(rule, space: FuzzSpace, seed: int, trials: range) -> list[tuple[int, str, ViolationReport | None]]:
    out = []
    for t in trials:
        inst, a, b = space.draw(make_rng(seed, t))
        result = check_weak_reinforcement(rule, inst, a, b)
        out.append((t, result.status, result.report))
    return out


def fuzz_weak_reinforcement(
    rule,
    trials: int,
    seed: int = 0,
    space: FuzzSpace | None = None,
    n_jobs: int = 1,
) -> FuzzSummary:
    """Test ``trials`` random profile pairs; trial ``t`` is drawn from stream ``(seed, t)``.

    The summary does not depend on ``n_jobs``: chunks are merged in trial order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    space = space or FuzzSpace()
    if n_jobs == 1:
        results = _fuzz_chunk(rule, space, seed, range(trials))
    else:
        from joblib import Parallel, cpu_count, delayed

        workers = cpu_count() if n_jobs < 0 else n_jobs
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        chunks = Parallel(n_jobs=workers)(
            delayed(_fuzz_chunk)(rule, space, seed, range(lo, hi))
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
        )
        results = [r for chunk in chunks for r in chunk]
    summary = FuzzSummary(rule_name(rule), trials)
    for t, status, report in results:
        if status != NOT_APPLICABLE:
            summary.applicable += 1
        if status == VIOLATION:
            summary.violations += 1
            if summary.first_report is None:
                summary.first_report, summary.first_trial = report, t
    return summary


ScoreFn = Callable[[Instance, Profile, object], object]


def _as_score_fn(kind) -> ScoreFn:
    if callable(kind):
        return kind
    if kind in SCORE_KINDS:
        return lambda inst, prof, alloc: score(kind, inst, prof, alloc)
    raise ValueError(f"unknown score kind {kind!r}")


def check_monotonic_conditions(kind, inst: Instance, prof_a: Profile, prof_b: Profile, x, y) -> str:
    """Test both monotonicity conditions on one (A, A', x, y) quadruple, in both orders.

    Returns ``"pass"``, ``"condition-1-violation"`` (strict preference agreed
    on by both profiles is lost on their concatenation) or
    ``"condition-2-violation"`` (agreed ties are broken).
    """
    f = _as_score_fn(kind)
    joint = prof_a + prof_b
    for first, second in ((x, y), (y, x)):
        if f(inst, prof_a, first) < f(inst, prof_a, second) and f(inst, prof_b, first) < f(inst, prof_b, second):
            if not f(inst, joint, first) < f(inst, joint, second):
                return "condition-1-violation"
    if f(inst, prof_a, x) == f(inst, prof_a, y) and f(inst, prof_b, x) == f(inst, prof_b, y):
        if f(inst, joint, x) != f(inst, joint, y):
            return "condition-2-violation"
    return PASS


def indicator_score(rule) -> ScoreFn:
    """Score 1 on the rule's winners and 0 elsewhere: turns any rule into an argmax rule."""
    fn = get_rule(rule)

    def f(inst, prof, alloc):
        return 1 if alloc in fn(inst, prof) else 0

    return f


@dataclass
class Refutation:
    """Constraints on ``P(A | truth_a)`` versus ``P(A | truth_b)`` implied by single-ballot outcomes.

    ``relations`` maps each ballot (instance-ordered id tuple) to ``"="``,
    ``"<"`` (truth_b strictly more likely), ``">"``, or ``"?"`` (no
    information). Both columns sum to 1, so all-known relations that are
    equalities plus strict inequalities in a single direction are
    contradictory: no noise model can make the rule its MLE.
    """

    rule: str
    truth_a: tuple[str, ...]
    truth_b: tuple[str, ...]
    relations: dict[tuple[str, ...], str] = field(default_factory=dict)

    @property
    def contradiction(self) -> bool:
        rels = set(self.relations.values())
        if "?" in rels:
            return False
        strict = rels - {"="}
        return len(strict) == 1


def normalisation_refutation(rule, inst: Instance, truth_a, truth_b) -> Refutation:
    fn = get_rule(rule)
    a = inst.allocation(truth_a)
    b = inst.allocation(truth_b)
    out = Refutation(rule_name(rule), tuple(a.ids), tuple(b.ids))
    for ballot in enumerate_ballots(inst):
        winners = fn(inst, Profile((ballot,)))
        in_a, in_b = a in winners, b in winners
        rel = "=" if in_a and in_b else "<" if in_b else ">" if in_a else "?"
        out.relations[tuple(inst.ordered(ballot))] = rel
    return out
