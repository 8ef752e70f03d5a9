"""Goodness of fit, Monte Carlo moments, tail-exponent fits and gamma oracles."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import special as sp
from scipy import stats as sps

from . import _csv
from . import special
from .lamperti import WeightedSample
from .levy_models import DomainError
from .rng import RngState, fill_gamma


@dataclass(frozen=True)
class GoodnessOfFit:
    ks_statistic: float
    p_value: float
    n_effective: float


def _kolmogorov_pvalue(d: float, n_eff: float) -> float:
    return float(min(max(sp.kolmogorov(math.sqrt(n_eff) * d), 0.0), 1.0))


def weighted_ecdf(points, weights=None):
    """Jump locations and right-continuous ECDF values at them (ties merged)."""
    x = np.asarray(points, dtype=np.float64)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    cum = np.cumsum(w) / w.sum()
    last = np.append(x[1:] != x[:-1], True)
    return x[last], cum[last]


def ks_test(sample, cdf: Callable) -> GoodnessOfFit:
    """Sup distance between the (weighted) empirical CDF and ``cdf``.

    The p-value is the asymptotic Kolmogorov tail at the effective sample size
    ``(sum w)^2 / sum w^2``; for weighted input it is only indicative.
    """
    if isinstance(sample, WeightedSample):
        pts, wts = sample.points, sample.weights
    else:
        pts, wts = np.asarray(sample, dtype=np.float64), None
    if pts.size == 0:
        raise DomainError("empty sample")
    if wts is None:
        n_eff = float(pts.size)
    else:
        n_eff = float(wts.sum() ** 2 / np.sum(wts ** 2))
    xs, upper = weighted_ecdf(pts, wts)
    lower = np.concatenate([[0.0], upper[:-1]])
    f = np.asarray(cdf(xs), dtype=np.float64)
    d = float(max(np.max(upper - f), np.max(f - lower), 0.0))
    return GoodnessOfFit(d, _kolmogorov_pvalue(d, n_eff), n_eff)


def ks_two_sample(a, b) -> GoodnessOfFit:
    """Two-sample KS via scipy; ``n_effective = n m / (n + m)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise DomainError("empty sample")
    res = sps.ks_2samp(a, b)
    return GoodnessOfFit(float(res.statistic), float(res.pvalue), a.size * b.size / (a.size + b.size))


def write_gof_csv(path: str | os.PathLike, rows: Iterable[tuple[str, GoodnessOfFit]]) -> None:
    _csv.write_csv(path, ("test_id", "ks", "pvalue", "n_effective"),
                   ((tid, g.ks_statistic, g.p_value, g.n_effective) for tid, g in rows))


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    std_error: float

    def z_score(self, target: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.estimate == target else math.inf
        return abs(self.estimate - target) / self.std_error


def jackknife_mean(y) -> MomentEstimate:
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n < 2:
        raise DomainError("need at least two samples")
    loo = (y.sum() - y) / (n - 1)
    se = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return MomentEstimate(float(y.mean()), se)


def mc_moment(samples, k: int, sign: str = "plain") -> MomentEstimate:
    """Mean of ``x^k`` (``sign="plain"``) or ``x^{-k}`` (``"inverse"``) with a jackknife error."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise DomainError("need at least two samples")
    if sign not in ("plain", "inverse"):
        raise DomainError(f"sign must be 'plain' or 'inverse', got {sign!r}")
    if sign == "inverse":
        if np.any(x <= 0):
            raise DomainError("inverse moments need positive samples")
        x = 1.0 / x
    if k == 0:
        return MomentEstimate(1.0, 0.0)
    return jackknife_mean(x ** k)


@dataclass(frozen=True)
class TailFit:
    coefficient: float
    intercept: float
    residual: float


def fit_tail_exponent(ts, probs, transform: str = "loglog_quadratic") -> TailFit:
    """Least-squares tail coefficient, with an intercept.

    ``loglog_quadratic``: ``-log p = c0 + coefficient (log 1/t)^2``.
    ``loglog_linear``: ``log p = c0 + coefficient log t``.
    """
    t = np.asarray(ts, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    if t.shape != p.shape or t.ndim != 1:
        raise DomainError("ts and probs must be 1-d arrays of equal length")
    if np.any(t <= 0) or np.any((p <= 0) | (p >= 1)):
        raise DomainError("need t > 0 and p in (0, 1)")
    if transform == "loglog_quadratic":
        x, y = np.log(1.0 / t) ** 2, -np.log(p)
    elif transform == "loglog_linear":
        x, y = np.log(t), np.log(p)
    else:
        raise DomainError(f"unknown transform {transform!r}")
    if np.unique(x).size < 2:
        raise DomainError("degenerate design: fewer than two distinct abscissae")
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.linalg.norm(design @ coef - y))
    return TailFit(float(coef[1]), float(coef[0]), resid)


def empirical_lower_tail(samples, ts) -> np.ndarray:
    """``P(X < t)`` estimated from sorted samples."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    return np.searchsorted(s, np.asarray(ts, dtype=np.float64), side="left") / s.size


@dataclass(frozen=True)
class GammaTools:
    shape: float
    rate: float

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
        return special.regularized_lower(self.shape, self.rate * x)

    def sf(self, x):
        x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
        return special.regularized_upper(self.shape, self.rate * x)

    def sample(self, rng: RngState, n: int = 1) -> np.ndarray:
        return fill_gamma(rng.state, self.shape, int(n)) / self.rate

    @property
    def mean(self) -> float:
        return self.shape / self.rate


def gamma_tools(shape: float, rate: float) -> GammaTools:
    shape, rate = float(shape), float(rate)
    if not (shape > 0 and rate > 0 and math.isfinite(shape) and math.isfinite(rate)):
        raise DomainError("shape and rate must be positive and finite")
    return GammaTools(shape, rate)
