"""Future infimum, last passage and first passage times on discretized PSSMP paths.

These functionals are defined over an infinite horizon.  A finite path is only
trusted below a guard level: once the path has climbed well above the guard
and stays there, the truncated suffix minimum equals the untruncated one at
every time where it is at most the guard.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import _csv
from .levy_models import DomainError
from .lamperti import PssmpPath

#: levels below this multiple of the starting point carry small-start bias
SMALL_START_FACTOR = 10.0


class HorizonTooShortError(RuntimeError):
    """The path does not end above the guard level, so infinite-horizon functionals are unknown."""


class SmallStartBiasWarning(UserWarning):
    """A level lies inside the region distorted by starting at a small positive point."""


@dataclass(frozen=True, eq=False)
class EnvelopeSeries:
    times: np.ndarray
    ratios: np.ndarray
    test_function_id: str

    def __post_init__(self):
        if self.times.shape != self.ratios.shape:
            raise DomainError("times and ratios need equal lengths")
        if np.any(self.ratios < 0):
            raise DomainError("ratios must be nonnegative")

    def __len__(self) -> int:
        return len(self.times)

    def max(self) -> float:
        return float(np.max(self.ratios)) if len(self.ratios) else float("nan")

    def to_csv(self, path: str | os.PathLike) -> None:
        _csv.write_csv(path, ("t", "ratio", "test_function_id"),
                       ((t, r, self.test_function_id) for t, r in zip(self.times, self.ratios)))


def _check_guard(path: PssmpPath, guard_level: float) -> None:
    if not guard_level > 0:
        raise DomainError(f"guard level must be positive, got {guard_level!r}")
    if not path.values[-1] > guard_level:
        raise HorizonTooShortError(
            f"path ends at {path.values[-1]:.6g}, not above the guard level {guard_level:.6g}")


def future_infimum(path: PssmpPath, guard_level: float) -> PssmpPath:
    """``J_t = min_{s >= t} X_s`` over the simulated horizon, valid where ``J_t <= guard_level``."""
    _check_guard(path, guard_level)
    j = np.minimum.accumulate(path.values[::-1])[::-1]
    return PssmpPath(path.times, j, path.x0, path.alpha, valid=j <= guard_level)


def _warn_small_start(path: PssmpPath, x: float) -> None:
    if x < SMALL_START_FACTOR * path.x0:
        warnings.warn(f"level {x:.6g} is below {SMALL_START_FACTOR:g} x0 = "
                      f"{SMALL_START_FACTOR * path.x0:.6g}; small-start bias applies",
                      SmallStartBiasWarning, stacklevel=3)


def last_passage(path: PssmpPath, x: float) -> float:
    """``U(x)``: last grid time with ``X <= x``, or 0 (with a warning) if there is none.

    The path must end above ``x``; otherwise the level may still be revisited.
    """
    _check_guard(path, x)
    _warn_small_start(path, x)
    below = np.flatnonzero(path.values <= x)
    if below.size == 0:
        warnings.warn(f"path never goes below {x:.6g}; U is reported as 0",
                      SmallStartBiasWarning, stacklevel=2)
        return 0.0
    return float(path.times[below[-1]])


def last_passages(path: PssmpPath, levels) -> np.ndarray:
    """``U`` at several levels in one right-to-left sweep; levels must be at most the endpoint."""
    levels = np.asarray(levels, dtype=np.float64)
    _check_guard(path, float(np.max(levels)))
    j = np.minimum.accumulate(path.values[::-1])[::-1]
    # last index with X <= x equals last index with J <= x, since J is nondecreasing
    idx = np.searchsorted(j, levels, side="right") - 1
    return np.where(idx >= 0, path.times[np.maximum(idx, 0)], 0.0)


def first_passage(path: PssmpPath, y: float) -> float:
    """``S_y``: first grid time with ``X >= y``."""
    hit = np.flatnonzero(path.values >= y)
    if hit.size == 0:
        raise HorizonTooShortError(f"level {y:.6g} is never reached (path max "
                                   f"{path.values.max():.6g})")
    return float(path.times[hit[0]])


def envelope_ratios(functional, family, grid, *, test_function_id: str | None = None,
                    evaluator=None) -> EnvelopeSeries:
    """Pointwise ``functional / family(grid)``.

    ``family`` is a :class:`~pssmp.closed_forms.TestFunctionFamily` or any
    callable; ``evaluator`` overrides how it is evaluated.
    """
    from .closed_forms import eval_test_function, family_id

    functional = np.asarray(functional, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if functional.shape != grid.shape:
        raise DomainError("functional and grid need equal lengths")
    if evaluator is None:
        evaluator = family if callable(family) else (lambda t: eval_test_function(family, t))
    denom = np.array([evaluator(float(t)) for t in grid])
    if test_function_id is None:
        test_function_id = family_id(family)
    return EnvelopeSeries(grid, functional / denom, test_function_id)
