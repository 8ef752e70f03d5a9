"""Lamperti representation: exponential functionals, time change, PSSMP paths.

A PSSMP started at ``x0 > 0`` with index ``alpha`` is
``X_t = x0 exp(xi_{tau(t x0^-alpha)})`` where ``tau`` inverts the clock
``I_s = int_0^s exp(alpha xi_u) du``.  On a Lamperti grid the clock is the
left-endpoint sum, i.e. the exact clock of the piecewise-constant path, so the
natural real-time image of a grid path has points ``(x0^alpha I_k, x0 e^{xi_k})``.

Compound Poisson models can also be simulated jump by jump (``method="jumps"``);
their paths are piecewise constant, so the event construction is exact.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from . import _csv
from .levy_models import (
    DomainError,
    LevyModel,
    LevyPath,
    MAX_GRID_POINTS,
    ResourceLimitError,
    check_condition_h,
    drift_mean,
    increment,
    is_compound_poisson,
    jump_size,
)
from .rng import RngState, derive_key, derive_keys, std_exponential

#: ``alpha * xi`` above this aborts (``exp`` overflows near 709.78)
EXPONENT_CAP = 700.0
#: multiplier on ``1 / (alpha m)`` in the truncation reserve
RESERVE_SAFETY = 10.0
#: default cap on Lamperti steps (or jumps) per exponential-functional draw
MAX_STEPS = 20_000_000

_OK, _HORIZON, _OVERFLOW = 0, 1, 2


class ExponentOverflowError(ArithmeticError):
    """``alpha * xi`` exceeded the configured exponent cap."""


class HorizonExceededError(RuntimeError):
    """The simulation cap was hit before the stopping rule was met.

    ``partial`` carries the state at the point of failure.
    """

    def __init__(self, message: str, partial: dict):
        super().__init__(message)
        self.partial = partial


class OutOfHorizonError(DomainError):
    """A requested time lies beyond the simulated clock."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpFunctionalSample:
    value: float
    truncation_bound: float
    horizon_used: float


@dataclass(frozen=True, eq=False)
class ExpFunctionalBatch:
    values: np.ndarray
    truncation_bounds: np.ndarray
    horizons: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> ExpFunctionalSample:
        return ExpFunctionalSample(float(self.values[i]), float(self.truncation_bounds[i]),
                                   float(self.horizons[i]))

    def to_csv(self, path: str | os.PathLike) -> None:
        _csv.write_csv(path, ("value", "truncation_bound", "horizon"),
                       zip(self.values, self.truncation_bounds, self.horizons))


@dataclass(frozen=True, eq=False)
class WeightedSample:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.points.shape != self.weights.shape:
            raise DomainError("points and weights need equal lengths")
        if np.any(self.weights < 0):
            raise DomainError("weights must be nonnegative")

    @classmethod
    def normalized(cls, points, weights) -> "WeightedSample":
        w = np.asarray(weights, dtype=np.float64)
        return cls(np.asarray(points, dtype=np.float64), w / w.sum())

    def __len__(self) -> int:
        return len(self.points)

    def mean(self) -> float:
        return float(np.dot(self.weights, self.points) / self.weights.sum())

    def mean_std_error(self) -> float:
        """Delta-method standard error of the self-normalised mean."""
        w = self.weights / self.weights.sum()
        mu = np.dot(w, self.points)
        return float(math.sqrt(np.sum((w * (self.points - mu)) ** 2)))

    @property
    def n_effective(self) -> float:
        return float(self.weights.sum() ** 2 / np.sum(self.weights ** 2))


@dataclass(frozen=True, eq=False)
class PssmpPath:
    """Real-time path ``(t_k, X_k)`` with ``t_0 = 0``.

    ``valid`` flags the points on which a derived statistic (future infimum)
    is exact; ``None`` means every point.  ``levy``/``clock`` keep the Lamperti
    path and its clock when the path is a natural image.
    """

    times: np.ndarray
    values: np.ndarray
    x0: float
    alpha: float
    valid: np.ndarray | None = None
    levy: LevyPath | None = field(default=None, repr=False)
    clock: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.times.shape != self.values.shape or self.times.ndim != 1 or len(self.times) == 0:
            raise DomainError("times and values must be nonempty 1-d arrays of equal length")
        if self.times[0] != 0.0:
            raise DomainError("paths start at t = 0")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise DomainError("times must be strictly increasing")
        if not np.all(self.values > 0):
            raise DomainError("PSSMP values must be positive")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def at(self, t) -> np.ndarray:
        """Càdlàg step evaluation: value of the last point at or before ``t``."""
        idx = np.searchsorted(self.times, np.asarray(t, dtype=np.float64), side="right") - 1
        if np.any(idx < 0):
            raise DomainError("negative times")
        return self.values[idx]

    def to_csv(self, path: str | os.PathLike) -> None:
        _csv.write_csv(path, ("t", "X"), zip(self.times, self.values))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _left_sum(values, grid, alpha, cap):
    n = values.shape[0]
    out = np.empty(n)
    out[0] = 0.0
    for k in range(1, n):
        e = alpha * values[k - 1]
        if e > cap:
            return out, k - 1
        out[k] = out[k - 1] + math.exp(e) * (grid[k] - grid[k - 1])
    return out, -1


@nb.njit
def _functional_grid(code, p, alpha, ds, rel_tol, reserve, max_steps, cap, state):
    xi = 0.0
    total = 0.0
    e = 1.0
    for k in range(1, max_steps + 1):
        total += e * ds
        xi -= increment(code, p, ds, state)
        ax = alpha * xi
        if ax > cap:
            return total, math.inf, k * ds, _OVERFLOW
        e = math.exp(ax)
        if e * reserve <= rel_tol * total:
            return total, e * reserve, k * ds, _OK
    return total, e * reserve, max_steps * ds, _HORIZON


@nb.njit
def _functional_jumps(code, p, alpha, rel_tol, reserve, max_steps, state):
    # dual of a driftless compound Poisson subordinator: constant between jumps
    rate = p[0]
    xi = 0.0
    total = 0.0
    s = 0.0
    e = 1.0
    for k in range(max_steps):
        hold = std_exponential(state) / rate
        total += e * hold
        s += hold
        xi -= jump_size(code, p, state)
        e = math.exp(alpha * xi)
        if e * reserve <= rel_tol * total:
            return total, e * reserve, s, _OK
    return total, e * reserve, s, _HORIZON


@nb.njit(cache=True, parallel=True)
def _functional_batch(code, p, alpha, ds, rel_tol, reserve, max_steps, cap, keys, jumps):
    # draws own their streams, so the split across threads cannot change results
    n = keys.shape[0]
    values = np.empty(n)
    bounds = np.empty(n)
    horizons = np.empty(n)
    status = np.zeros(n, dtype=np.int64)
    for i in nb.prange(n):
        state = np.zeros(2, dtype=np.uint64)
        state[0] = keys[i]
        if jumps:
            v, b, h, st = _functional_jumps(code, p, alpha, rel_tol, reserve, max_steps, state)
        else:
            v, b, h, st = _functional_grid(code, p, alpha, ds, rel_tol, reserve, max_steps,
                                           cap, state)
        values[i] = v
        bounds[i] = b
        horizons[i] = h
        status[i] = st
    return values, bounds, horizons, status


@nb.njit(cache=True)
def _run_forward(code, p, ds, alpha, state, xi, clock, start, clock_target, level_target, cap):
    """Extend a grid path in place until ``clock > clock_target`` and ``xi >= level_target``.

    Returns ``(filled, status)``; ``filled == len(xi)`` with status OK means the
    buffer ran out before the stopping rule was met.
    """
    n = xi.shape[0]
    for k in range(start, n):
        ax = alpha * xi[k - 1]
        if ax > cap:
            return k, _OVERFLOW
        clock[k] = clock[k - 1] + math.exp(ax) * ds
        xi[k] = xi[k - 1] + increment(code, p, ds, state)
        if clock[k] > clock_target and xi[k] >= level_target:
            return k + 1, _OK
    return n, _OK


@nb.njit(cache=True)
def _run_forward_jumps(code, p, alpha, state, s, xi, clock, start, clock_target,
                       level_target, cap):
    # point k is the k-th jump: Lamperti time s[k], post-jump level xi[k], clock at s[k]
    rate = p[0]
    n = xi.shape[0]
    for k in range(start, n):
        ax = alpha * xi[k - 1]
        if ax > cap:
            return k, _OVERFLOW
        hold = std_exponential(state) / rate
        s[k] = s[k - 1] + hold
        clock[k] = clock[k - 1] + math.exp(ax) * hold
        xi[k] = xi[k - 1] + jump_size(code, p, state)
        if clock[k] > clock_target and xi[k] >= level_target:
            return k + 1, _OK
    return n, _OK


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def partial_exponential_functional(path: LevyPath, alpha: float,
                                   exponent_cap: float = EXPONENT_CAP) -> np.ndarray:
    """``I_{s_k} = sum_{j<k} exp(alpha xi_j) (s_{j+1} - s_j)``, with ``I_0 = 0``."""
    alpha = float(alpha)
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    out, bad = _left_sum(path.values, path.grid, alpha, float(exponent_cap))
    if bad >= 0:
        raise ExponentOverflowError(
            f"alpha*xi = {alpha * path.values[bad]:.6g} at s = {path.grid[bad]:.6g} "
            f"exceeds the exponent cap {exponent_cap}")
    return out


def truncation_reserve(model: LevyModel, alpha: float) -> float:
    """Safety factor times ``1 / (alpha m)``, the drift-rate size of a fresh residual integral."""
    return RESERVE_SAFETY / (alpha * drift_mean(model))


def _resolve_method(model: LevyModel, method: str) -> bool:
    if method == "auto":
        return is_compound_poisson(model)
    if method == "jumps":
        if not is_compound_poisson(model):
            raise DomainError(f"jump-by-jump simulation needs a compound Poisson model, "
                              f"got {model.family}")
        return True
    if method == "grid":
        return False
    raise DomainError(f"unknown method {method!r}")


def _require_h(model: LevyModel) -> None:
    h = check_condition_h(model)
    if not (h.mean_positive and h.mean_finite):
        raise DomainError(f"{model.family} does not drift to +infinity")


def sample_exponential_functionals(model: LevyModel, alpha: float, ds: float, rel_tol: float,
                                   n: int, seed: int, *, method: str = "auto",
                                   max_steps: int = MAX_STEPS, offset: int = 0,
                                   exponent_cap: float = EXPONENT_CAP) -> ExpFunctionalBatch:
    """``n`` independent draws of ``I(xi_hat)``; draw ``i`` uses stream ``(seed, offset + i)``.

    Each draw is run until ``exp(alpha xi_hat_s) * reserve <= rel_tol * I_s``.
    ``method`` is ``"grid"`` (step ``ds``), ``"jumps"`` (exact, compound Poisson
    only) or ``"auto"`` (jumps whenever possible).
    """
    alpha, ds, rel_tol = float(alpha), float(ds), float(rel_tol)
    for name, v in (("alpha", alpha), ("ds", ds), ("rel_tol", rel_tol)):
        if not v > 0.0:
            raise DomainError(f"{name} must be positive, got {v!r}")
    _require_h(model)
    jumps = _resolve_method(model, method)
    code, p = model.kernel_args()
    keys = derive_keys(seed, int(n), offset)
    values, bounds, horizons, status = _functional_batch(
        code, p, alpha, ds, rel_tol, truncation_reserve(model, alpha), int(max_steps),
        float(exponent_cap), keys, jumps)
    bad = np.flatnonzero(status)
    if bad.size:
        i = int(bad[0])
        partial = {"index": offset + i, "value": float(values[i]),
                   "bound": float(bounds[i]), "horizon": float(horizons[i])}
        if status[i] == _OVERFLOW:
            raise ExponentOverflowError(f"draw {offset + i}: alpha*xi exceeded {exponent_cap}")
        raise HorizonExceededError(
            f"draw {offset + i}: {bad.size} draw(s) hit the cap of {max_steps} steps before "
            f"reaching rel_tol={rel_tol}", partial)
    return ExpFunctionalBatch(values, bounds, horizons)


def total_exponential_functional(model: LevyModel, alpha: float, ds: float, rel_tol: float,
                                 seed: int, *, method: str = "auto",
                                 max_steps: int = MAX_STEPS) -> ExpFunctionalSample:
    """One draw of ``I(xi_hat)``; identical to element 0 of the batch with the same seed."""
    return sample_exponential_functionals(model, alpha, ds, rel_tol, 1, seed, method=method,
                                          max_steps=max_steps)[0]


def invert_time_change(partial_I: np.ndarray, grid: np.ndarray, t):
    """``tau_t = inf{s : I_s > t}``, linear in ``I`` inside the bracketing cell."""
    partial_I = np.asarray(partial_I, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    tt = np.asarray(t, dtype=np.float64)
    if np.any(tt < 0):
        raise DomainError("time must be nonnegative")
    if np.any(tt >= partial_I[-1]):
        raise OutOfHorizonError(
            f"time {float(np.max(tt)):.6g} is beyond the simulated clock {partial_I[-1]:.6g}")
    k = np.searchsorted(partial_I, tt, side="right") - 1
    lo, hi = partial_I[k], partial_I[k + 1]
    tau = grid[k] + (tt - lo) / (hi - lo) * (grid[k + 1] - grid[k])
    return float(tau) if tau.ndim == 0 else tau


def _simulate_forward(model, ds, alpha, state, clock_target, level_target, jumps,
                      max_points, exponent_cap):
    code, p = model.kernel_args()
    size = 1 << 12
    s = np.zeros(size)
    xi = np.zeros(size)
    clock = np.zeros(size)
    start = 1
    while True:
        if jumps:
            filled, status = _run_forward_jumps(code, p, alpha, state, s, xi, clock, start,
                                                clock_target, level_target, exponent_cap)
        else:
            filled, status = _run_forward(code, p, ds, alpha, state, xi, clock, start,
                                          clock_target, level_target, exponent_cap)
        if status == _OVERFLOW:
            raise ExponentOverflowError(
                f"alpha*xi exceeded {exponent_cap} at Lamperti step {filled}")
        if filled < len(xi):
            break
        if len(xi) >= max_points:
            raise ResourceLimitError(f"path needs more than {max_points} points")
        start = len(xi)
        size = min(2 * len(xi), max_points)
        s, xi, clock = (np.concatenate([a, np.zeros(size - len(a))]) for a in (s, xi, clock))
    xi, clock = xi[:filled], clock[:filled]
    s = s[:filled] if jumps else ds * np.arange(filled, dtype=np.float64)
    return s, xi, clock


def build_pssmp_path(model: LevyModel, x0: float, alpha: float, t_max: float, ds: float,
                     seed: int, *, stream: int = 0, times=None, until_level: float | None = None,
                     method: str = "auto", max_points: int = MAX_GRID_POINTS,
                     exponent_cap: float = EXPONENT_CAP) -> PssmpPath:
    """Simulate ``X^{(x0)}`` until real time ``t_max`` (and level ``until_level``).

    Without ``times`` the natural image of the Lamperti path is returned,
    otherwise ``X`` evaluated on ``times`` (which must not exceed ``t_max``):
    grid paths interpolate ``xi`` linearly at ``tau``, jump paths are exact
    step functions.
    """
    x0, alpha, t_max, ds = float(x0), float(alpha), float(t_max), float(ds)
    if not x0 > 0.0:
        raise DomainError(f"x0 must be positive, got {x0!r}")
    if not alpha > 0.0 or not ds > 0.0 or not t_max >= 0.0:
        raise DomainError("need alpha > 0, ds > 0, t_max >= 0")
    jumps = _resolve_method(model, method)
    if t_max == 0.0 and until_level is None:
        return PssmpPath(np.zeros(1), np.array([x0]), x0, alpha)
    clock_target = t_max * x0 ** (-alpha)
    level_target = -math.inf if until_level is None else math.log(until_level / x0)
    state = RngState(derive_key(seed, stream)).state
    s, xi, clock = _simulate_forward(model, ds, alpha, state, clock_target, level_target, jumps,
                                     int(max_points), float(exponent_cap))
    levy = LevyPath(grid=s, values=xi, model=model, sign="forward")
    scale = x0 ** alpha
    if times is None:
        return PssmpPath(scale * clock, x0 * np.exp(xi), x0, alpha, levy=levy, clock=clock)
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or len(times) == 0:
        raise DomainError("times must be a nonempty 1-d array")
    if times[0] != 0.0:
        times = np.concatenate([[0.0], times])
    if np.any(times > t_max * (1 + 1e-12)):
        raise OutOfHorizonError("requested times exceed t_max")
    u = times / scale
    if jumps:
        idx = np.searchsorted(clock, u, side="right") - 1
        values = x0 * np.exp(xi[idx])
    else:
        tau = invert_time_change(clock, s, u)
        values = x0 * np.exp(np.interp(tau, s, xi))
    return PssmpPath(times, values, x0, alpha, levy=levy, clock=clock)


def sample_entrance_marginal(model: LevyModel, t: float, n: int, ds: float, rel_tol: float,
                             seed: int, *, alpha: float = 1.0, method: str = "auto",
                             max_steps: int = MAX_STEPS) -> WeightedSample:
    """Weighted sample of ``X_t`` under ``P_0``.

    With ``I_i`` draws of ``I(xi_hat)``, the points are ``t / I_i`` and the
    weights are proportional to ``1 / I_i``; the factor ``1/m`` cancels on
    normalisation.  For ``alpha != 1`` the weighted law is that of ``X^alpha``
    (an index-1 PSSMP driven by ``alpha xi``) and points are mapped back by the
    ``1/alpha`` power.
    """
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    batch = sample_exponential_functionals(model, alpha, ds, rel_tol, n, seed, method=method,
                                           max_steps=max_steps)
    inv = 1.0 / batch.values
    points = t * inv
    if alpha != 1.0:
        points = points ** (1.0 / alpha)
    return WeightedSample.normalized(points, inv)
