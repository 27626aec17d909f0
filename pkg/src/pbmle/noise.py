"""Ballot noise models conditioned on a ground-truth allocation.

Three models are provided, each with ballot weight ``w(A)`` and
normaliser ``Z = sum_A w(A)``:

========  ======================  ==============================
kind      weight ``w(A)``         closed-form ``Z``
========  ======================  ==============================
m-app     ``2^|A & truth|``       ``2^|P| * (3/2)^|truth|``
m-ncost   ``c(A & truth)``        ``2^(|P|-1) * c(truth)``
m-napp    ``|A & truth|``         ``2^(|P|-1) * |truth|``
========  ======================  ==============================

Samplers are exact constructive schemes drawing integers from a numpy
``Generator``, so no floating point enters the sampled distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod

import numpy as np

from .errors import UndefinedDistributionError
from .model import Allocation, Instance, Profile, check_enumeration_cap, enumerate_ballots

MODEL_KINDS = ("m-app", "m-ncost", "m-napp")
BRUTE_FORCE_CAP = 12


def check_model(kind: str) -> str:
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown noise model {kind!r}; expected one of {', '.join(MODEL_KINDS)}")
    return kind


def _truth_set(inst: Instance, truth) -> frozenset[str]:
    if isinstance(truth, Allocation):
        return truth.projects
    return inst.allocation(truth).projects


def is_degenerate(kind: str, inst: Instance, truth) -> bool:
    """True when the model has a zero normaliser for ``truth``."""
    check_model(kind)
    truth = _truth_set(inst, truth)
    if kind == "m-ncost":
        return inst.cost_of(truth) == 0
    if kind == "m-napp":
        return len(truth) == 0
    return False


def _require_nondegenerate(kind, inst, truth):
    if is_degenerate(kind, inst, truth):
        raise UndefinedDistributionError(
            f"{kind} is undefined for ground truth {inst.ordered(truth)}: normaliser is 0"
        )


def ballot_weight(kind: str, inst: Instance, truth, ballot) -> int:
    """Unnormalised weight of ``ballot``; always a nonnegative integer."""
    check_model(kind)
    common = frozenset(ballot) & _truth_set(inst, truth)
    if kind == "m-app":
        return 2 ** len(common)
    if kind == "m-ncost":
        return inst.cost_of(common)
    return len(common)


def closed_form_normaliser(kind: str, inst: Instance, truth) -> Fraction:
    check_model(kind)
    truth = _truth_set(inst, truth)
    _require_nondegenerate(kind, inst, truth)
    m = len(inst)
    if kind == "m-app":
        return Fraction(2) ** m * Fraction(3, 2) ** len(truth)
    if kind == "m-ncost":
        return Fraction(2 ** (m - 1) * inst.cost_of(truth))
    return Fraction(2 ** (m - 1) * len(truth))


def brute_force_normaliser(kind: str, inst: Instance, truth, cap: int | None = None) -> Fraction:
    """Sum of ballot weights over all 2^|P| ballots."""
    check_model(kind)
    check_enumeration_cap(inst, BRUTE_FORCE_CAP if cap is None else cap)
    truth = _truth_set(inst, truth)
    return Fraction(sum(ballot_weight(kind, inst, truth, a) for a in enumerate_ballots(inst)))


def normalisation_factor(kind: str, inst: Instance, truth, cross_check: bool = True,
                         cap: int | None = None) -> Fraction:
    """Closed-form normaliser, checked against enumeration when ``|P| <= cap``.

    Raises
    ------
    UndefinedDistributionError
        If the normaliser is zero for ``truth``.
    AssertionError
        If the cross-check disagrees.
    """
    z = closed_form_normaliser(kind, inst, truth)
    cap = BRUTE_FORCE_CAP if cap is None else cap
    if cross_check and len(inst) <= cap:
        brute = brute_force_normaliser(kind, inst, truth, cap)
        if brute != z:
            raise AssertionError(f"closed-form Z={z} differs from enumerated Z={brute}")
    return z


def ballot_probability(kind: str, inst: Instance, truth, ballot) -> Fraction:
    """Exact probability that the model generates ``ballot`` given ``truth``."""
    ballot = inst.check_ids(ballot)
    z = closed_form_normaliser(kind, inst, truth)
    return ballot_weight(kind, inst, truth, ballot) / z


def likelihood(kind: str, inst: Instance, truth, prof: Profile) -> Fraction:
    """Product of ballot probabilities; 0 for a ground truth the model cannot condition on."""
    check_model(kind)
    prof.validate(inst)
    if is_degenerate(kind, inst, truth):
        return Fraction(0)
    z = closed_form_normaliser(kind, inst, truth)
    truth = _truth_set(inst, truth)
    weights = prod(ballot_weight(kind, inst, truth, a) for a in prof.ballots)
    return Fraction(weights) / z ** len(prof)


@dataclass(frozen=True)
class SamplerScheme:
    """Constructive description of a model's sampler.

    An anchor project is drawn from ``anchor`` (if any) and always included;
    every other project ``p`` is then included independently with
    probability ``inclusion[p]``.
    """

    anchor: dict[str, Fraction] | None
    inclusion: dict[str, Fraction]


def sampler_scheme(kind: str, inst: Instance, truth) -> SamplerScheme:
    check_model(kind)
    truth = _truth_set(inst, truth)
    _require_nondegenerate(kind, inst, truth)
    half = Fraction(1, 2)
    if kind == "m-app":
        return SamplerScheme(
            None, {p: Fraction(2, 3) if p in truth else half for p in inst.ids}
        )
    if kind == "m-ncost":
        total = inst.cost_of(truth)
        anchor = {p: Fraction(inst.costs[p], total) for p in inst.ordered(truth)}
    else:
        anchor = {p: Fraction(1, len(truth)) for p in inst.ordered(truth)}
    return SamplerScheme(anchor, {p: half for p in inst.ids})


def scheme_ballot_probability(scheme: SamplerScheme, ballot) -> Fraction:
    """Probability that ``scheme`` outputs exactly ``ballot``, from its construction alone."""
    ballot = frozenset(ballot)

    def independent(skip=None) -> Fraction:
        out = Fraction(1)
        for p, q in scheme.inclusion.items():
            if p == skip:
                continue
            out *= q if p in ballot else 1 - q
        return out

    if scheme.anchor is None:
        return independent()
    return sum(
        (w * independent(skip=p) for p, w in scheme.anchor.items() if p in ballot),
        Fraction(0),
    )


def _bernoulli(rng: np.random.Generator, q: Fraction) -> bool:
    return int(rng.integers(0, q.denominator)) < q.numerator


def _draw(rng: np.random.Generator, weights: dict[str, Fraction]) -> str:
    den = lcm(*(w.denominator for w in weights.values()))
    ticket = int(rng.integers(0, den))
    acc = 0
    for p, w in weights.items():
        acc += int(w * den)
        if ticket < acc:
            return p
    raise AssertionError("anchor weights do not sum to 1")


def sample_ballot(kind: str, inst: Instance, truth, rng) -> frozenset[str]:
    """Draw one ballot exactly from the model. ``rng`` is a numpy Generator or a seed."""
    scheme = sampler_scheme(kind, inst, truth)
    return _sample(scheme, inst, make_rng(rng))


def _sample(scheme: SamplerScheme, inst: Instance, rng: np.random.Generator) -> frozenset[str]:
    chosen = set()
    anchor = None
    if scheme.anchor is not None:
        anchor = _draw(rng, scheme.anchor)
        chosen.add(anchor)
    for p in inst.ids:
        if p != anchor and _bernoulli(rng, scheme.inclusion[p]):
            chosen.add(p)
    return frozenset(chosen)


def make_rng(seed, *key: int) -> np.random.Generator:
    """Counter-based Philox stream for ``(seed, *key)``; a Generator is passed through.

    Distinct keys give independent streams, so ``make_rng(seed, trial, agent)``
    reproduces a draw regardless of execution order.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def sample_profile(kind: str, inst: Instance, truth, n_agents: int, seed, *key: int) -> Profile:
    """``n_agents`` i.i.d. ballots; agent ``i`` uses the stream ``(seed, *key, i)``."""
    scheme = sampler_scheme(kind, inst, truth)
    return Profile(tuple(_sample(scheme, inst, make_rng(seed, *key, i)) for i in range(n_agents)))
