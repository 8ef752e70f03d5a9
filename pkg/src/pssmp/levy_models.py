"""Lévy process families, their Laplace exponents, and exact increment samplers.

Each family is a frozen dataclass.  Numba kernels see a model as an integer
family code plus a float parameter vector (``model.kernel_args()``); all the
sampling work happens in those kernels so that Python-level calls and batch
simulations share one code path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar, Union

import numba as nb
import numpy as np
from scipy import integrate

from .rng import RngState, poisson, std_exponential, std_gamma, std_normal, std_stable, uniform

# family codes shared with the kernels
BROWNIAN = 0
STABLE = 1
POISSON = 2
CPOISSON_EXP = 3
LAMPERTI_STABLE = 4
DRIFT = 5

#: default cap on the number of grid points of one simulated path
MAX_GRID_POINTS = 50_000_000


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded."""


@dataclass(frozen=True)
class _Model:
    family: ClassVar[str]
    code: ClassVar[int]

    def kernel_args(self) -> tuple[int, np.ndarray]:
        cached = self.__dict__.get("_kargs")
        if cached is None:
            cached = np.asarray(self._params(), dtype=np.float64)
            object.__setattr__(self, "_kargs", cached)
        return self.code, cached.copy()

    def _params(self) -> list[float]:
        return [getattr(self, f.name) for f in fields(self) if f.init]

    def to_config(self) -> str:
        """Key-value text form, e.g. ``model = brownian_drift`` / ``a = 1.0``."""
        lines = [f"model = {self.family}"]
        lines += [f"{f.name} = {getattr(self, f.name)!r}" for f in fields(self) if f.init]
        return "\n".join(lines) + "\n"


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite real, got {value!r}")
    return value


@dataclass(frozen=True)
class BrownianWithDrift(_Model):
    """``xi_t = 2 (B_t + a t)``; its Lamperti image is a squared Bessel process."""

    a: float
    family: ClassVar[str] = "brownian_drift"
    code: ClassVar[int] = BROWNIAN

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))


@dataclass(frozen=True)
class StablePlusDrift(_Model):
    """Spectrally negative ``beta``-stable process plus drift ``c``.

    Normalised so that ``E exp(lam Y_t) = exp(t lam**beta)``.
    """

    beta: float
    c: float
    family: ClassVar[str] = "stable_plus_drift"
    code: ClassVar[int] = STABLE

    def __post_init__(self):
        beta = float(self.beta)
        if not 1.0 < beta < 2.0:
            raise DomainError(f"beta must lie in (1, 2), got {beta!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c", _positive("c", self.c))

    def _params(self):
        # scale making the Laplace exponent exactly lam**beta
        sigma = abs(math.cos(0.5 * math.pi * self.beta)) ** (1.0 / self.beta)
        return [self.beta, self.c, sigma]


@dataclass(frozen=True)
class StandardPoisson(_Model):
    """Unit-rate Poisson process (arithmetic; flagged by :func:`check_condition_h`)."""

    family: ClassVar[str] = "poisson"
    code: ClassVar[int] = POISSON

    def _params(self):
        return [1.0]


@dataclass(frozen=True)
class CompoundPoissonExp(_Model):
    """Compound Poisson subordinator with Lévy measure ``a b exp(-b x) dx``."""

    a: float
    b: float
    family: ClassVar[str] = "compound_poisson_exp"
    code: ClassVar[int] = CPOISSON_EXP

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))


@dataclass(frozen=True)
class LampertiStableSubordinator(_Model):
    """Driftless subordinator whose Lamperti image is a ``beta``-stable subordinator.

    Lévy measure ``beta e^x / (Gamma(1-beta) (e^x - 1)^(1+beta)) dx`` with tail
    ``Pi((x, inf)) = (e^x - 1)^(-beta) / Gamma(1-beta)``.  Jumps below ``eps``
    are replaced by their mean drift; ``eps`` defaults to the largest cutoff
    whose neglected variance per unit time is below ``1e-6``.
    """

    beta: float
    eps: float | None = field(default=None, compare=True)
    family: ClassVar[str] = "lamperti_stable"
    code: ClassVar[int] = LAMPERTI_STABLE

    def __post_init__(self):
        beta = float(self.beta)
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
        object.__setattr__(self, "beta", beta)
        eps = self.eps
        if eps is None:
            eps = _default_cutoff(beta)
        object.__setattr__(self, "eps", _positive("eps", eps))

    def tail(self, x: float) -> float:
        b = self.beta
        return math.exp(-b * x) * (-math.expm1(-x)) ** (-b) / math.gamma(1.0 - b)

    def density(self, x: float) -> float:
        return _lamperti_stable_density(self.beta, x)

    def small_jump_drift(self) -> float:
        """``int_0^eps x Pi(dx)`` by parts: ``int_0^eps tail - eps tail(eps)``."""
        eps = self.eps
        head, _ = integrate.quad(lambda x: self.tail(x), 0.0, eps, epsabs=0.0, epsrel=1e-10)
        return head - eps * self.tail(eps)

    def small_jump_variance(self) -> float:
        return _small_jump_variance(self.beta, self.eps)

    def _params(self):
        return [self.beta, self.eps, self.tail(self.eps), self.small_jump_drift(),
                math.expm1(self.eps)]


@dataclass(frozen=True)
class DeterministicDrift(_Model):
    """``xi_s = rate * s``; a degenerate test model with closed-form Lamperti image."""

    rate: float = 1.0
    family: ClassVar[str] = "deterministic_drift"
    code: ClassVar[int] = DRIFT

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))


LevyModel = Union[BrownianWithDrift, StablePlusDrift, StandardPoisson, CompoundPoissonExp,
                  LampertiStableSubordinator, DeterministicDrift]

FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (BrownianWithDrift, StablePlusDrift, StandardPoisson, CompoundPoissonExp,
                LampertiStableSubordinator, DeterministicDrift)
}


def _lamperti_stable_density(beta: float, x: float) -> float:
    # beta e^x / (Gamma(1-beta) (e^x - 1)^(1+beta)), written to avoid overflow
    return (beta * math.exp(-beta * x)
            / (math.gamma(1.0 - beta) * (-math.expm1(-x)) ** (1.0 + beta)))


def _small_jump_variance(beta: float, eps: float) -> float:
    f = lambda x: x * x * _lamperti_stable_density(beta, x)
    val, _ = integrate.quad(f, 0.0, eps, epsabs=0.0, epsrel=1e-10)
    return val


def _default_cutoff(beta: float, target: float = 1e-6) -> float:
    # small-x form of the neglected variance: beta eps^(2-beta) / ((2-beta) Gamma(1-beta))
    g = math.gamma(1.0 - beta)
    eps = (target * (2.0 - beta) * g / beta) ** (1.0 / (2.0 - beta))
    for _ in range(60):
        if _small_jump_variance(beta, eps) < target:
            return eps
        eps *= 0.9
    raise RuntimeError("could not choose a small-jump cutoff")


def is_subordinator(model: LevyModel) -> bool:
    return isinstance(model, (StandardPoisson, CompoundPoissonExp, LampertiStableSubordinator,
                              DeterministicDrift))


def is_compound_poisson(model: LevyModel) -> bool:
    """Pure-jump finite-activity models whose paths can be simulated jump by jump."""
    return isinstance(model, (StandardPoisson, CompoundPoissonExp))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def laplace_exponent(model: LevyModel, lam: float) -> float:
    """``psi(lam)`` with ``E exp(lam xi_t) = exp(t psi(lam))``; ``inf`` when divergent."""
    lam = float(lam)
    if not lam >= 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    if lam == 0.0:
        return 0.0
    if isinstance(model, BrownianWithDrift):
        return 2.0 * lam * lam + 2.0 * model.a * lam
    if isinstance(model, StablePlusDrift):
        return lam ** model.beta + model.c * lam
    if isinstance(model, StandardPoisson):
        return math.expm1(lam)
    if isinstance(model, CompoundPoissonExp):
        if lam >= model.b:
            return math.inf
        return model.a * lam / (model.b - lam)
    if isinstance(model, LampertiStableSubordinator):
        if lam >= model.beta:
            return math.inf
        return _lamperti_stable_psi(model, lam)
    if isinstance(model, DeterministicDrift):
        return model.rate * lam
    raise TypeError(f"unknown model {model!r}")


def _lamperti_stable_psi(model: LampertiStableSubordinator, lam: float) -> float:
    b = model.beta
    g = math.gamma(1.0 - b)

    def f(x):
        # (e^{lam x} - 1) times the density, kept finite for large x
        return (b * (math.exp((lam - b) * x) - math.exp(-b * x))
                / (g * (-math.expm1(-x)) ** (1.0 + b)))

    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-8, limit=200)
    tail, _ = integrate.quad(f, 1.0, math.inf, epsabs=0.0, epsrel=1e-8, limit=200)
    return head + tail


def drift_mean(model: LevyModel) -> float:
    """``m = E xi_1``."""
    if isinstance(model, BrownianWithDrift):
        return 2.0 * model.a
    if isinstance(model, StablePlusDrift):
        return model.c
    if isinstance(model, StandardPoisson):
        return 1.0
    if isinstance(model, CompoundPoissonExp):
        return model.a / model.b
    if isinstance(model, LampertiStableSubordinator):
        f = lambda x: x * model.density(x)
        head, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
        tail, _ = integrate.quad(f, 1.0, math.inf, epsabs=0.0, epsrel=1e-10, limit=200)
        return head + tail
    if isinstance(model, DeterministicDrift):
        return model.rate
    raise TypeError(f"unknown model {model!r}")


@dataclass(frozen=True)
class ConditionH:
    mean_positive: bool
    mean_finite: bool
    arithmetic_flag: bool

    @property
    def holds(self) -> bool:
        return self.mean_positive and self.mean_finite and not self.arithmetic_flag


def check_condition_h(model: LevyModel) -> ConditionH:
    m = drift_mean(model)
    arithmetic = isinstance(model, (StandardPoisson, DeterministicDrift))
    return ConditionH(mean_positive=m > 0.0, mean_finite=math.isfinite(m),
                      arithmetic_flag=arithmetic)


# ---------------------------------------------------------------------------
# sampling kernels
# ---------------------------------------------------------------------------

@nb.njit
def increment(code, p, ds, state):
    """One exact draw of ``xi_{s+ds} - xi_s``."""
    if code == BROWNIAN:
        return 2.0 * (math.sqrt(ds) * std_normal(state) + p[0] * ds)
    if code == STABLE:
        beta = p[0]
        return ds ** (1.0 / beta) * p[2] * -std_stable(state, beta, 1.0) + p[1] * ds
    if code == POISSON:
        return float(poisson(state, p[0] * ds))
    if code == CPOISSON_EXP:
        k = poisson(state, p[0] * ds)
        if k == 0:
            return 0.0
        return std_gamma(state, float(k)) / p[1]
    if code == LAMPERTI_STABLE:
        beta, rate, drift, em1 = p[0], p[2], p[3], p[4]
        k = poisson(state, rate * ds)
        total = drift * ds
        for _ in range(k):
            total += math.log1p(em1 * uniform(state) ** (-1.0 / beta))
        return total
    if code == DRIFT:
        return p[0] * ds
    return math.nan


@nb.njit
def jump_size(code, p, state):
    """Jump law of the compound Poisson families (unit jumps or Exp(b))."""
    if code == POISSON:
        return 1.0
    return std_exponential(state) / p[1]


@nb.njit(cache=True)
def fill_increments(code, p, ds, state, out, start, sign):
    """Write cumulative values ``out[start:] = out[start-1] + sign * increments``."""
    x = out[start - 1]
    for k in range(start, out.shape[0]):
        x += sign * increment(code, p, ds, state)
        out[k] = x


@nb.njit(cache=True)
def _draw_increments(code, p, ds, state, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = increment(code, p, ds, state)
    return out


def sample_increment(model: LevyModel, ds: float, rng: RngState) -> float:
    """One exact draw of a Lévy increment over a step of length ``ds``."""
    ds = float(ds)
    if not ds > 0.0:
        raise DomainError(f"ds must be positive, got {ds!r}")
    code, p = model.kernel_args()
    return float(_draw_increments(code, p, ds, rng.state, 1)[0])


def sample_increments(model: LevyModel, ds: float, n: int, rng: RngState) -> np.ndarray:
    """``n`` consecutive draws of :func:`sample_increment` in one kernel call."""
    ds = float(ds)
    if not ds > 0.0:
        raise DomainError(f"ds must be positive, got {ds!r}")
    code, p = model.kernel_args()
    return _draw_increments(code, p, ds, rng.state, int(n))


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LevyPath:
    grid: np.ndarray
    values: np.ndarray
    model: LevyModel
    sign: str = "forward"

    def __post_init__(self):
        if self.sign not in ("forward", "dual"):
            raise DomainError(f"sign must be 'forward' or 'dual', got {self.sign!r}")
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise DomainError("grid and values must be 1-d arrays of equal length")
        if self.grid[0] != 0.0 or self.values[0] != 0.0:
            raise DomainError("paths start at s=0 with value 0")

    @property
    def ds(self) -> float:
        return float(self.grid[1] - self.grid[0]) if len(self.grid) > 1 else 0.0


def uniform_grid(ds: float, s_max: float) -> np.ndarray:
    n = int(math.floor(s_max / ds + 1e-9))
    return ds * np.arange(n + 1, dtype=np.float64)


def simulate_path(model: LevyModel, ds: float, s_max: float, sign: str = "forward",
                  seed: int = 0, max_points: int = MAX_GRID_POINTS) -> LevyPath:
    """Exact-increment path on the grid ``0, ds, 2 ds, ..., <= s_max``."""
    ds, s_max = float(ds), float(s_max)
    if not ds > 0.0:
        raise DomainError(f"ds must be positive, got {ds!r}")
    if not ds <= s_max * (1.0 + 1e-12):
        raise DomainError("need ds <= s_max")
    n = int(math.floor(s_max / ds + 1e-9)) + 1
    if n > max_points:
        raise ResourceLimitError(f"{n} grid points exceeds the cap of {max_points}")
    if sign not in ("forward", "dual"):
        raise DomainError(f"sign must be 'forward' or 'dual', got {sign!r}")
    code, p = model.kernel_args()
    values = np.zeros(n)
    rng = RngState.from_seed(seed)
    fill_increments(code, p, ds, rng.state, values, 1, 1.0 if sign == "forward" else -1.0)
    return LevyPath(grid=ds * np.arange(n, dtype=np.float64), values=values, model=model,
                    sign=sign)


# ---------------------------------------------------------------------------
# key-value descriptors
# ---------------------------------------------------------------------------

def model_from_mapping(mapping: dict[str, str]) -> LevyModel:
    """Build a model from ``{'model': family, param: value, ...}`` string pairs."""
    mapping = dict(mapping)
    try:
        family = mapping.pop("model")
    except KeyError:
        raise DomainError("model descriptor needs a 'model' key") from None
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown model family {family!r}; known: {sorted(FAMILIES)}") from None
    names = {f.name for f in fields(cls) if f.init}
    unknown = set(mapping) - names
    if unknown:
        raise DomainError(f"unknown keys for {family}: {sorted(unknown)}")
    kwargs = {}
    for k, v in mapping.items():
        kwargs[k] = None if v in ("None", "none", "") else float(v)
    return cls(**kwargs)


def model_from_config(text: str) -> LevyModel:
    mapping = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DomainError(f"expected 'key = value', got {raw!r}")
        mapping[key.strip()] = value.strip()
    return model_from_mapping(mapping)
