"""Numerical classifier for integral tests ``int_{0+} f(t) dt`` (or ``int^{inf} f(t) dt``).

Finiteness of an improper integral cannot be decided from finitely many
evaluations, so the classifier only commits when two pieces of evidence agree:

* the tail of the integrand, written in ``w = |log t|`` as
  ``W(w) = f(t) |dt/dw|``, is fitted by ``log W = A - p w - q log w``; the
  integral converges iff ``p > 0``, or ``p = 0`` and ``q > 1``.  The verdict
  needs the decisive exponent to clear its boundary by ``margin``;
* the partial integrals over the nested windows ``(lam 10^-j, lam]`` behave
  accordingly: increments ``d_j`` with ``j d_j`` decreasing (faster than the
  harmonic rate) for convergence, ``j d_j`` not decreasing for divergence.

Anything else is ``Inconclusive``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

CONVERGES = "Converges"
DIVERGES = "Diverges"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ClassifierControls:
    lam: float = 0.1
    windows: int = 40
    margin: float = 0.05
    fit_points: int = 200
    quad_rtol: float = 1e-10


@dataclass(frozen=True, eq=False)
class IntegralTestVerdict:
    verdict: str
    fitted_exponent: float
    partial_integrals: np.ndarray
    log_exponent: float = math.nan
    diagnostics: dict = field(default_factory=dict)


def _w_integrand(f: Callable[[float], float], endpoint: str):
    if endpoint == "zero":
        return lambda w: f(math.exp(-w)) * math.exp(-w)
    if endpoint == "infinity":
        return lambda w: f(math.exp(w)) * math.exp(w)
    raise ValueError(f"endpoint must be 'zero' or 'infinity', got {endpoint!r}")


def integral_test_classify(integrand: Callable[[float], float], endpoint: str = "zero",
                           controls: ClassifierControls | None = None) -> IntegralTestVerdict:
    c = controls or ClassifierControls()
    W = _w_integrand(integrand, endpoint)
    w0 = -math.log(c.lam) if endpoint == "zero" else math.log(c.lam)
    if not w0 > 0:
        raise ValueError("need lam < 1 at zero and lam > 1 at infinity")
    step = math.log(10.0)
    edges = w0 + step * np.arange(c.windows + 1)

    pieces = np.empty(c.windows)
    for j in range(c.windows):
        val, _ = integrate.quad(W, edges[j], edges[j + 1], epsabs=0.0, epsrel=c.quad_rtol,
                                limit=200)
        pieces[j] = val
    if np.any(pieces < 0) or not np.all(np.isfinite(pieces)):
        raise ValueError("integrand must be positive and finite on the windows")
    partial = np.cumsum(pieces)

    # local exponents from the far half of the windows
    grid = np.linspace(edges[c.windows // 2], edges[-1], c.fit_points)
    vals = np.array([W(w) for w in grid])
    pos = vals > 0
    if pos.sum() < 3:
        # integrand vanishes in the tail: numerically zero contribution
        p, q = math.inf, 0.0
    else:
        design = np.column_stack([np.ones(pos.sum()), -grid[pos], -np.log(grid[pos])])
        coef, *_ = np.linalg.lstsq(design, np.log(vals[pos]), rcond=None)
        p, q = float(coef[1]), float(coef[2])

    if p > c.margin:
        exp_says = CONVERGES
    elif p < -c.margin:
        exp_says = DIVERGES
    elif q > 1.0 + c.margin:
        exp_says = CONVERGES
    elif q < 1.0 - c.margin:
        exp_says = DIVERGES
    else:
        exp_says = INCONCLUSIVE

    j = np.arange(1, c.windows + 1, dtype=np.float64)
    half = slice(c.windows // 2, None)
    scaled = (j * pieces)[half]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = scaled[1:] / scaled[:-1]
    shrinking = bool(np.all((ratios < 1.0) | (scaled[1:] == 0.0)))
    not_shrinking = bool(np.all(ratios >= 1.0))

    if exp_says == CONVERGES and shrinking:
        verdict = CONVERGES
    elif exp_says == DIVERGES and not_shrinking:
        verdict = DIVERGES
    else:
        verdict = INCONCLUSIVE
    # the decisive exponent: p unless it sits inside the margin band, then q - 1
    decisive = p if abs(p) > c.margin else q - 1.0
    return IntegralTestVerdict(verdict, decisive, partial, log_exponent=q,
                               diagnostics={"p": p, "q": q, "exponent_verdict": exp_says,
                                            "increments_shrinking": shrinking,
                                            "increments_not_shrinking": not_shrinking})
