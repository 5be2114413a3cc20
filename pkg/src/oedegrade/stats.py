"""Pearson correlation with t-test p-values, Fisher-Z intervals and run ensembles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats


class StatsError(ValueError):
    pass


class LengthMismatch(StatsError):
    pass


class DegenerateSeries(StatsError):
    pass


class DegenerateR(StatsError):
    pass


class TooFewRuns(StatsError):
    pass


def student_t_cdf(t: float, dof: float) -> float:
    return float(special.stdtr(dof, t))


def student_t_two_sided_p(t: float, dof: float) -> float:
    if math.isinf(t):
        return 0.0
    return float(min(1.0, 2.0 * special.stdtr(dof, -abs(t))))


def normal_quantile(q: float) -> float:
    return float(stats.norm.ppf(q))


# the conventional rounded constant is used at the 95% level
_Z_CRIT = {0.95: 1.96}


def z_critical(level: float) -> float:
    """Two-sided standard-normal critical value; 1.96 at the 95% level."""
    if not 0.0 < level < 1.0:
        raise StatsError(f"level must lie in (0, 1), got {level}")
    return _Z_CRIT.get(level, normal_quantile(0.5 + level / 2))


@dataclass(frozen=True)
class CorrelationReport:
    r: float
    n: int
    t_stat: float
    p_value: float
    ci_low: float
    ci_high: float
    ci_level: float = 0.95

    def as_dict(self) -> dict:
        return asdict(self)


def fisher_ci(r: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Confidence interval for a correlation via ``z = atanh(r)``, ``SE = 1/sqrt(n-3)``."""
    if abs(r) >= 1:
        raise DegenerateR(f"|r| must be < 1, got {r}")
    if n < 4:
        raise StatsError(f"need n >= 4, got {n}")
    z = math.atanh(r)
    half = z_critical(level) / math.sqrt(n - 3)
    return math.tanh(z - half), math.tanh(z + half)


def pearson(x: Sequence[float], y: Sequence[float], level: float = 0.95) -> CorrelationReport:
    """Sample correlation, two-sided t-test with ``n - 2`` dof, and Fisher-Z interval.

    Three points are accepted; the interval is then the whole of ``[-1, 1]``
    unless ``|r| = 1``.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise LengthMismatch(f"series shapes differ: {xs.shape} vs {ys.shape}")
    n = xs.size
    if n < 3:
        raise StatsError(f"need at least 3 points, got {n}")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx / n <= 1e-30 or syy / n <= 1e-30:
        raise DegenerateSeries("a series is constant")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return CorrelationReport(r, n, math.copysign(math.inf, r), 0.0, r, r, level)
    t = r * math.sqrt((n - 2) / (1 - r * r))
    lo, hi = fisher_ci(r, n, level) if n > 3 else (-1.0, 1.0)
    return CorrelationReport(r, n, t, student_t_two_sided_p(t, n - 2), lo, hi, level)


@dataclass(frozen=True)
class EnsembleReport:
    run_count: int
    mean_r: float
    sd_r: float
    ci_low: float
    ci_high: float
    mean_p: float
    t_stat_vs_zero: float
    p_of_t: float

    def as_dict(self) -> dict:
        return asdict(self)


def _mean_sd(v: np.ndarray) -> tuple[float, float]:
    """Mean and sample sd; exactly ``(v[0], 0)`` for a constant series."""
    if np.all(v == v[0]):
        return float(v[0]), 0.0
    mean = math.fsum(v) / v.size
    return mean, math.sqrt(math.fsum((v - mean) ** 2) / (v.size - 1))


def ensemble_summary(r_values: Sequence[float], per_run_n: int, level: float = 0.95) -> EnsembleReport:
    """Summarize per-run correlations.

    The interval is built in Fisher-Z space, ``mean(z) +/- t* sd(z)/sqrt(m)``
    with ``t*`` from Student-t on ``m - 1`` dof, then mapped back by tanh.
    ``mean_p`` averages the per-run t-test p-values implied by each ``r``
    and ``per_run_n``.
    """
    r = np.asarray(r_values, dtype=float)
    m = r.size
    if m < 2:
        raise TooFewRuns(f"need at least 2 runs, got {m}")
    if np.any(np.abs(r) >= 1):
        raise DegenerateR("every |r| must be < 1")
    mean_r, sd_r = _mean_sd(r)
    z = np.arctanh(r)
    z_bar, sd_z = _mean_sd(z)
    half = float(stats.t.ppf(0.5 + level / 2, m - 1)) * sd_z / math.sqrt(m)
    if sd_z == 0.0:
        ci_low = ci_high = mean_r
    else:
        ci_low, ci_high = math.tanh(z_bar - half), math.tanh(z_bar + half)

    p_values = []
    for ri in r:
        t_i = ri * math.sqrt((per_run_n - 2) / (1 - ri * ri))
        p_values.append(student_t_two_sided_p(t_i, per_run_n - 2))

    if sd_r == 0.0:
        t_stat = math.copysign(math.inf, mean_r) if mean_r != 0 else math.nan
        p_of_t = 0.0 if mean_r != 0 else 1.0
    else:
        t_stat = mean_r / (sd_r / math.sqrt(m))
        p_of_t = student_t_two_sided_p(t_stat, m - 1)
    return EnsembleReport(m, mean_r, sd_r, ci_low, ci_high, float(np.mean(p_values)), t_stat, p_of_t)
