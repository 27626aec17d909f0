"""Seeded truth-recovery experiments: plant a ground truth, sample profiles, score rules."""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .errors import UndefinedDistributionError
from .mle import check_space, mle
from .model import Instance
from .noise import check_model, is_degenerate, sample_profile
from .rules import get_rule

CSV_HEADER = ("rule", "n_agents", "exact_recovery", "hit_rate", "mean_winners")


@dataclass(frozen=True)
class ExperimentConfig:
    """One recovery experiment.

    ``rules`` are rule names; ``"mle"`` is the brute-force MLE for ``model``
    over ``space``. Trial ``t`` at ``n`` agents samples agent ``i`` from the
    random stream ``(seed, n, t, i)``.
    """

    model: str
    instance: Instance
    truth: frozenset[str]
    rules: tuple[str, ...]
    n_grid: tuple[int, ...]
    trials: int
    seed: int = 0
    space: str = "all"

    def __post_init__(self):
        check_model(self.model)
        check_space(self.space)
        object.__setattr__(self, "truth", self.instance.allocation(self.truth).projects)
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.rules:
            raise ValueError("at least one rule is required")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("agent counts must be >= 1")
        if is_degenerate(self.model, self.instance, self.truth):
            raise UndefinedDistributionError(f"{self.model} is undefined for ground truth {sorted(self.truth)}")
        for r in self.rules:
            if r != "mle":
                get_rule(r)


@dataclass(frozen=True)
class RecoveryRow:
    rule: str
    n_agents: int
    exact_recovery: Fraction
    hit_rate: Fraction
    mean_winners: Fraction


def _cell(cfg: ExperimentConfig, n: int, t: int) -> dict[str, tuple[bool, bool, int]]:
    prof = sample_profile(cfg.model, cfg.instance, cfg.truth, n, cfg.seed, n, t)
    out = {}
    for r in cfg.rules:
        if r == "mle":
            winners = mle(cfg.model, cfg.instance, prof, cfg.space)
        else:
            winners = get_rule(r)(cfg.instance, prof)
        sets = winners.as_sets()
        out[r] = (sets == {cfg.truth}, cfg.truth in sets, len(sets))
    return out


def run_recovery(cfg: ExperimentConfig, n_jobs: int = 1) -> list[RecoveryRow]:
    """One row per (rule, n) in config order; identical for any ``n_jobs``."""
    tasks = [(n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    if n_jobs == 1:
        cells = [_cell(cfg, n, t) for n, t in tasks]
    else:
        from joblib import Parallel, delayed

        cells = Parallel(n_jobs=n_jobs)(delayed(_cell)(cfg, n, t) for n, t in tasks)
    by_n: dict[int, list] = {}
    for (n, _), cell in zip(tasks, cells):
        by_n.setdefault(n, []).append(cell)
    rows = []
    for r in cfg.rules:
        for n in cfg.n_grid:
            results = [cell[r] for cell in by_n[n]]
            rows.append(
                RecoveryRow(
                    r,
                    n,
                    Fraction(sum(e for e, _, _ in results), cfg.trials),
                    Fraction(sum(h for _, h, _ in results), cfg.trials),
                    Fraction(sum(k for _, _, k in results), cfg.trials),
                )
            )
    return rows


def format_rate(x: Fraction, places: int = 12) -> str:
    """Exact decimal when ``x`` terminates, otherwise rounded to ``places`` digits."""
    den = x.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        value = Decimal(x.numerator) / Decimal(x.denominator)
        text = format(value, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    return format(round(Decimal(x.numerator) / Decimal(x.denominator), places), "f")


def emit_csv(rows: Sequence[RecoveryRow]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(CSV_HEADER)
    for row in rows:
        out.writerow([
            row.rule,
            row.n_agents,
            format_rate(row.exact_recovery),
            format_rate(row.hit_rate),
            format_rate(row.mean_winners),
        ])
    return buf.getvalue()
