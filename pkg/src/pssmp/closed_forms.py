"""Closed-form laws, moments, tail estimates, envelope functions and LIL constants.

Notation: ``I = I(xi_hat)`` is the exponential functional of the dual process,
``Fbar(t) = P(I < t)`` its distribution function near zero, ``m = E xi_1``,
and ``psi`` the Laplace exponent of ``xi`` (not to be confused with the rate
function of the log-regular tests, exposed as :class:`LogRegularPsiRate`).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import special
from .levy_models import (
    BrownianWithDrift,
    CompoundPoissonExp,
    DomainError,
    LampertiStableSubordinator,
    LevyModel,
    StablePlusDrift,
    StandardPoisson,
    drift_mean,
    laplace_exponent,
)

BISECTION_RTOL = 1e-13
_MAX_BISECTION = 400


class NumericalError(ArithmeticError):
    """A root search failed; the message reports the last bracket."""


class FlaggedValue(NamedTuple):
    """A value from an asymptotic form plus whether its argument is inside the regime."""

    value: float
    in_regime: bool


# ---------------------------------------------------------------------------
# moments and the rate inverse
# ---------------------------------------------------------------------------

def _psi_products(model: LevyModel, k: int) -> list[float]:
    vals = []
    for j in range(1, k + 1):
        v = laplace_exponent(model, float(j))
        if not math.isfinite(v):
            raise DomainError(f"psi({j}) is infinite for {model.family}: the exponential "
                              f"moment of order {j} diverges")
        vals.append(v)
    return vals


def _positive_int(k) -> int:
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return int(k)


def negative_moment(model: LevyModel, k: int) -> float:
    """``E I^{-k} = m psi(1)...psi(k-1) / (k-1)!`` (equal to ``m`` for ``k = 1``)."""
    k = _positive_int(k)
    prod = math.prod(_psi_products(model, k - 1))
    return drift_mean(model) * prod / math.factorial(k - 1)


def entrance_moment(model: LevyModel, k: int) -> float:
    """``E_0 X_1^k = psi(1)...psi(k) / k!``."""
    k = _positive_int(k)
    return math.prod(_psi_products(model, k)) / math.factorial(k)


def rate_inverse_H(model, x: float) -> float:
    """``inf{s > 0 : psi(s)/s > x}`` by bisection.

    ``model`` is a Lévy model or a callable ``psi``.  ``psi(s)/s`` is
    increasing, so the inverse exists for ``x`` above its limit at ``0+``.
    """
    psi = model if callable(model) else (lambda s: laplace_exponent(model, s))
    x = float(x)

    def ratio(s):
        v = psi(s)
        return math.inf if not math.isfinite(v) else v / s

    floor = ratio(1e-300) if not callable(model) else ratio(1e-12)
    if not x > floor:
        raise DomainError(f"x = {x!r} is not above the limit {floor:.6g} of psi(s)/s at 0+")
    lo, hi = 0.0, 1.0
    while not ratio(hi) > x:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericalError(f"no upper bracket for x = {x!r} (last bracket [{lo}, {hi}])")
    for _ in range(_MAX_BISECTION):
        mid = 0.5 * (lo + hi)
        if ratio(mid) > x:
            hi = mid
        else:
            lo = mid
        if hi - lo <= BISECTION_RTOL * hi:
            return hi
    raise NumericalError(f"bisection did not converge for x = {x!r}: bracket [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# Fbar: distribution function of I near zero
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailForm:
    """``-log Fbar(1/s)`` for large ``s``, exact or asymptotic with a regime lower bound."""

    neg_log: Callable[[float], float]
    exact: bool
    regime_min_s: float = 0.0
    description: str = ""

    def __call__(self, s: float) -> FlaggedValue:
        return FlaggedValue(self.neg_log(s), self.exact or s >= self.regime_min_s)


def _log_upper(a: float, x: float) -> float:
    q = special.gammainc_upper(a, x)
    if q > 1e-280:
        return math.log(q)
    # Q(a, x) = e^{-x} x^{a-1} r / Gamma(a)
    return -x + (a - 1.0) * math.log(x) + math.log(special.upper_tail_ratio(a, x)) - math.lgamma(a)


def tail_form(model: LevyModel) -> TailForm:
    if isinstance(model, BrownianWithDrift):
        a = model.a
        return TailForm(lambda s: -_log_upper(a, 0.5 * s), True,
                        description=f"P(I < x) = P(gamma_{a:g} > 1/(2x))")
    if isinstance(model, CompoundPoissonExp):
        a, b = model.a, model.b
        return TailForm(lambda s: -math.log(special.gammainc_lower(b + 1.0, a / s)), True,
                        description=f"I ~ Gamma({b + 1:g}, rate {a:g})")
    if isinstance(model, StandardPoisson):
        return TailForm(lambda s: 0.5 * math.log(s) ** 2 if s > 1 else 0.0, False, 5.0,
                        "-log P(I < 1/s) ~ (log s)^2 / 2")
    if isinstance(model, StablePlusDrift):
        beta = model.beta
        m = drift_mean(model)

        def neg_log(s):
            return (beta - 1.0) * rate_inverse_H(model, s) if s > m else 0.0

        return TailForm(neg_log, False, 10.0 * (1.0 + m),
                        "-log P(I < 1/s) ~ (beta - 1) H(s)")
    raise DomainError(f"no log-regular tail estimate for {model.family}")


def log_regular_inner(model: LevyModel, level: float) -> float:
    """``inf{s : 1/Fbar(1/s) > level}``; needs ``level > 1``."""
    level = float(level)
    if not level > 1.0:
        raise DomainError(f"level must exceed 1, got {level!r}")
    form = tail_form(model)
    target = math.log(level)
    lo, hi = 0.0, 1.0
    while not form.neg_log(hi) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericalError(f"no upper bracket at level {level!r}")
    for _ in range(_MAX_BISECTION):
        mid = 0.5 * (lo + hi)
        if form.neg_log(mid) > target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= BISECTION_RTOL * hi:
            break
    return hi


# ---------------------------------------------------------------------------
# envelope test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogRegularPhi:
    """``phi(t) = t inf{s : 1/Fbar(1/s) > |log t|}``."""
    model: LevyModel


@dataclass(frozen=True)
class LogRegularPsiRate:
    """``t / inf{s : 1/Fbar(1/s) > |log t|}``."""
    model: LevyModel


@dataclass(frozen=True)
class PsiOverLogLog:
    """``f(t) = psi(L) / L`` with ``L = log|log t|``."""
    model: LevyModel


@dataclass(frozen=True)
class LogLogOverPsi:
    """``h(t) = L / psi(L)`` with ``L = log|log t|``."""
    model: LevyModel


@dataclass(frozen=True)
class BesselLIL:
    """``2 t log|log t|``."""


@dataclass(frozen=True)
class PoissonF:
    """``t exp(-sqrt(2 log|log t|))``."""


@dataclass(frozen=True)
class WatanabeG:
    """``t log|log t| / a``."""
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"a must be positive, got {self.a!r}")


@dataclass(frozen=True)
class StableConditionedPhi:
    """``t^{1/alpha} (log|log t|)^{1 - 1/alpha}``."""
    alpha: float

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (1, 2], got {self.alpha!r}")


TestFunctionFamily = (LogRegularPhi | LogRegularPsiRate | PsiOverLogLog | LogLogOverPsi
                      | BesselLIL | PoissonF | WatanabeG | StableConditionedPhi)


def family_id(family) -> str:
    if isinstance(family, BesselLIL):
        return "bessel_lil"
    if isinstance(family, PoissonF):
        return "poisson_f"
    if isinstance(family, WatanabeG):
        return f"watanabe_g(a={family.a!r})"
    if isinstance(family, StableConditionedPhi):
        return f"stable_conditioned_phi(alpha={family.alpha!r})"
    for cls, name in ((LogRegularPhi, "log_regular_phi"), (LogRegularPsiRate, "log_regular_psi"),
                      (PsiOverLogLog, "psi_over_loglog"), (LogLogOverPsi, "loglog_over_psi")):
        if isinstance(family, cls):
            return f"{name}({family.model.family})"
    return getattr(family, "__name__", type(family).__name__)


def _abs_log(t: float) -> float:
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    return abs(math.log(t))


def _loglog(t: float) -> float:
    # log|log t| is positive exactly when t lies outside [1/e, e]
    v = _abs_log(t)
    if not v > 1.0:
        raise DomainError(f"log|log t| is not positive at t = {t!r} (need |log t| > 1)")
    return math.log(v)


def eval_test_function(family, t: float) -> float:
    """Value of the named envelope function at ``t``.

    Raises :class:`DomainError` wherever the function is not positive and
    finite: ``t`` in ``[1/e, e]`` for every family (this contains both 1 and e).
    """
    if isinstance(family, BesselLIL):
        return 2.0 * t * _loglog(t)
    if isinstance(family, PoissonF):
        return t * math.exp(-math.sqrt(2.0 * _loglog(t)))
    if isinstance(family, WatanabeG):
        return t * _loglog(t) / family.a
    if isinstance(family, StableConditionedPhi):
        a = family.alpha
        return t ** (1.0 / a) * _loglog(t) ** (1.0 - 1.0 / a)
    if isinstance(family, (PsiOverLogLog, LogLogOverPsi)):
        L = _loglog(t)
        psi = laplace_exponent(family.model, L)
        if not math.isfinite(psi):
            raise DomainError(f"psi({L:.6g}) is infinite for {family.model.family}")
        return psi / L if isinstance(family, PsiOverLogLog) else L / psi
    if isinstance(family, (LogRegularPhi, LogRegularPsiRate)):
        inner = log_regular_inner(family.model, _abs_log(t))
        return t * inner if isinstance(family, LogRegularPhi) else t / inner
    if callable(family):
        return float(family(t))
    raise TypeError(f"unknown test function family {family!r}")


# ---------------------------------------------------------------------------
# constants catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    statement_id: str
    formula: str
    params: tuple[str, ...]
    evaluate: Callable[..., float] | None
    paper_anchor: str


def _check_beta(beta):
    if not 1.0 < beta < 2.0:
        raise DomainError(f"beta must lie in (1, 2), got {beta!r}")


def _check_alpha_pos(alpha):
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")


def _stable_conditioned_j(alpha):
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha!r}")
    return alpha * (alpha - 1.0) ** (-(alpha - 1.0) / alpha)


def _stable_conditioned_u(alpha):
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha!r}")
    return (1.0 / alpha) * (1.0 - 1.0 / alpha) ** (alpha - 1.0)


def _logregular_u(beta):
    _check_beta(beta)
    return (beta - 1.0) ** (beta - 1.0)


def _logregular_j(beta):
    _check_beta(beta)
    return (beta - 1.0) ** (-(beta - 1.0))


def _stable_plus_drift_u(alpha, beta):
    _check_alpha_pos(alpha)
    _check_beta(beta)
    return alpha ** (-beta * alpha) * (beta - 1.0) ** (alpha * (beta - 1.0))


def _stable_plus_drift_j(alpha, beta):
    _check_alpha_pos(alpha)
    _check_beta(beta)
    return alpha ** (beta / alpha) * (beta - 1.0) ** (-(beta - 1.0) / alpha)


_CATALOG: dict[str, CatalogEntry] = {e.statement_id: e for e in (
    CatalogEntry("stable_conditioned_J", "alpha (alpha-1)^(-(alpha-1)/alpha)", ("alpha",),
                 _stable_conditioned_j, "stable-conditioned-future-infimum-lil"),
    CatalogEntry("stable_conditioned_U", "(1/alpha) (1-1/alpha)^(alpha-1)", ("alpha",),
                 _stable_conditioned_u, "stable-conditioned-last-passage-lil"),
    CatalogEntry("logregular_U", "(beta-1)^(beta-1)", ("beta",), _logregular_u,
                 "log-regular-last-passage-lil"),
    CatalogEntry("logregular_J", "(beta-1)^(-(beta-1))", ("beta",), _logregular_j,
                 "log-regular-future-infimum-lil"),
    CatalogEntry("stable_plus_drift_U", "alpha^(-beta alpha) (beta-1)^(alpha(beta-1))",
                 ("alpha", "beta"), _stable_plus_drift_u, "stable-plus-drift-last-passage-lil"),
    CatalogEntry("stable_plus_drift_J", "alpha^(beta/alpha) (beta-1)^(-(beta-1)/alpha)",
                 ("alpha", "beta"), _stable_plus_drift_j, "stable-plus-drift-future-infimum-lil"),
    CatalogEntry("bessel_J", "limsup J_t / (2 t log|log t|)", (), lambda: 1.0,
                 "bessel-future-infimum-lil"),
    CatalogEntry("bessel_U", "liminf U(x) 2 log|log x| / x", (), lambda: 1.0,
                 "bessel-last-passage-lil"),
    CatalogEntry("poisson_X", "limsup X_t f(t) / t^2", (), lambda: 1.0,
                 "poisson-upper-envelope-lil"),
    CatalogEntry("watanabe_X", "limsup X_t g(t) / t^2", (), lambda: 1.0,
                 "watanabe-upper-envelope-lil"),
)}

#: identities checked by the harness; listed so every report anchor resolves
_IDENTITIES: tuple[tuple[str, str, str], ...] = (
    ("bessel_exp_functional", "P(I <= x) = P(gamma_a >= 1/(2x))", "bessel-exp-functional"),
    ("watanabe_exp_functional", "I ~ Gamma(b+1, rate a)", "watanabe-exp-functional"),
    ("negative_moments", "E I^-k = m psi(1)...psi(k-1)/(k-1)!", "negative-moments"),
    ("entrance_moments", "E_0 X_1^k = psi(1)...psi(k)/k!", "entrance-moments"),
    ("entrance_law", "E_0 f(X_t) = E(I^-1 f(t/I)) / m", "entrance-law"),
    ("bessel_entrance", "X_1 under P_0 ~ 2 gamma_(a+1)", "bessel-entrance-law"),
    ("last_passage_identity", "U(1) ~ I for continuous paths", "last-passage-identity"),
    ("scaling_property", "k X^(x)_(t k^-alpha) ~ X^(kx)_t", "scaling-property"),
    ("lamperti_closed_form", "X_t = 1 + t for xi_s = s", "lamperti-representation"),
    ("integral_test", "finite or infinite integral decides i.o. events", "integral-test"),
    ("poisson_tail", "-log P(I < t) ~ (log 1/t)^2 / 2", "poisson-tail"),
    ("lamperti_stable_tail", "P(I < x) ~ m k beta x^(beta+1) / (beta+1)", "lamperti-stable-tail"),
    ("incomplete_gamma_sandwich", "c e^-x x^(a-1) <= Gamma(a, x) <= C e^-x x^(a-1)",
     "incomplete-gamma-sandwich"),
    ("lil_reciprocity", "logregular_U(beta) logregular_J(beta) = 1", "log-regular-reciprocity"),
)


def catalog_ids() -> list[str]:
    return list(_CATALOG)


def catalog_anchors() -> set[str]:
    return {e.paper_anchor for e in _CATALOG.values()} | {a for _, _, a in _IDENTITIES}


def lil_constant(statement: str, **params: float) -> float:
    """The limiting constant of a catalogued law of the iterated logarithm."""
    try:
        entry = _CATALOG[statement]
    except KeyError:
        raise DomainError(f"unknown statement {statement!r}; known: {sorted(_CATALOG)}") from None
    if set(params) != set(entry.params):
        raise DomainError(f"{statement} takes parameters {entry.params}, got {tuple(params)}")
    return float(entry.evaluate(**{k: float(v) for k, v in params.items()}))


def catalog_records() -> list[dict]:
    recs = []
    for e in _CATALOG.values():
        value = e.evaluate() if not e.params else None
        recs.append({"statement_id": e.statement_id, "formula": e.formula, "value": value,
                     "paper_anchor": e.paper_anchor})
    for sid, formula, anchor in _IDENTITIES:
        recs.append({"statement_id": sid, "formula": formula, "value": None,
                     "paper_anchor": anchor})
    return recs


def export_catalog(path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(catalog_records(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Bessel case
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BesselClosedForms:
    a: float

    @property
    def dim_delta(self) -> float:
        return 2.0 * (self.a + 1.0)

    def I_cdf(self, x):
        """``P(I <= x) = P(gamma_a >= 1/(2x))``."""
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore"):
            z = np.where(x > 0, 0.5 / np.where(x > 0, x, 1.0), np.inf)
        out = special.regularized_upper(self.a, z)
        return out

    def X1_cdf(self, x):
        """``P_0(X_1 <= x)`` for ``X_1 = 2 gamma_{a+1}``."""
        x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
        return special.regularized_lower(self.a + 1.0, 0.5 * x)

    def U_scaled_cdf(self, x):
        """``P(U(1) <= x)``; equal to the law of ``I`` since paths are continuous."""
        return self.I_cdf(x)


def bessel_closed_forms(a: float) -> BesselClosedForms:
    if not a > 0:
        raise DomainError(f"a must be positive, got {a!r}")
    return BesselClosedForms(float(a))


def bessel_future_infimum_integrand(delta: float, h: Callable[[float], float]):
    """``t -> (h(t)/2t)^{(delta-4)/2} exp(-h(t)/2t) / t``, the ``dt`` integrand of the J-test."""
    e = 0.5 * (delta - 4.0)

    def f(t):
        r = h(t) / (2.0 * t)
        return r ** e * math.exp(-r) / t

    return f


def bessel_lil_candidate(c: float):
    """``h_c(t) = 2 c t log log(1/t)`` for ``t < 1/e``."""
    return lambda t: 2.0 * c * t * math.log(math.log(1.0 / t))


# ---------------------------------------------------------------------------
# increasing processes: densities and tail asymptotics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticForm:
    """``f(x) ~ k * coefficient * x^exponent`` (power) or ``-log f(x) ~ coefficient log(x)^2``.

    ``regime`` is ``("<=", bound)`` or ``(">=", bound)``; values outside it
    are returned flagged rather than rejected.
    """

    kind: str
    coefficient: float
    exponent: float
    regime: tuple[str, float]
    needs_k: bool = False

    def in_regime(self, x: float) -> bool:
        op, bound = self.regime
        return x <= bound if op == "<=" else x >= bound

    def __call__(self, x: float, k: float | None = None) -> FlaggedValue:
        x = float(x)
        if not x > 0:
            raise DomainError(f"x must be positive, got {x!r}")
        if self.kind == "power":
            if self.needs_k and k is None:
                raise DomainError("this asymptotic form carries an unknown constant k; pass k")
            v = (k if self.needs_k else 1.0) * self.coefficient * x ** self.exponent
        else:
            v = self.coefficient * math.log(x) ** 2
        return FlaggedValue(v, self.in_regime(x))


@dataclass(frozen=True)
class DensityBundle:
    """``rho`` (density of ``I``), ``rho_1`` (entrance density at time 1) and tails.

    Exact members are plain callables; asymptotic members are
    :class:`AsymptoticForm` objects.  For the log-quadratic forms the value is
    the negative logarithm of the named quantity.
    """

    model: LevyModel
    m: float
    rho: Callable | AsymptoticForm
    rho_1: Callable | AsymptoticForm
    I_cdf: Callable | AsymptoticForm
    X1_survival: Callable | AsymptoticForm
    exact: bool


def entrance_density(rho: Callable[[float], float], m: float) -> Callable[[float], float]:
    """``rho_1(x) = rho(1/x) / (m x)``."""
    return lambda x: rho(1.0 / x) / (m * x)


def density_bundle(model: LevyModel) -> DensityBundle:
    m = drift_mean(model)
    if isinstance(model, CompoundPoissonExp):
        a, b = model.a, model.b
        lognorm = (1.0 + b) * math.log(a) - math.lgamma(1.0 + b)

        def rho(x):
            return math.exp(lognorm + b * math.log(x) - a * x) if x > 0 else 0.0

        return DensityBundle(
            model, m, rho, entrance_density(rho, m),
            I_cdf=lambda x: special.gammainc_lower(b + 1.0, a * x),
            # X_1 under P_0 is a / gamma_b
            X1_survival=lambda y: special.gammainc_lower(b, a / y),
            exact=True)
    if isinstance(model, StandardPoisson):
        small = ("<=", 0.2)
        large = (">=", 5.0)
        return DensityBundle(
            model, m,
            rho=AsymptoticForm("logquad", 0.5, 2.0, small),
            rho_1=AsymptoticForm("logquad", 0.5, 2.0, large),
            I_cdf=AsymptoticForm("logquad", 0.5, 2.0, small),
            X1_survival=AsymptoticForm("logquad", 0.5, 2.0, large),
            exact=False)
    if isinstance(model, LampertiStableSubordinator):
        beta = model.beta
        small = ("<=", 0.1)
        large = (">=", 10.0)
        return DensityBundle(
            model, m,
            rho=AsymptoticForm("power", m * beta, beta, small, needs_k=True),
            rho_1=AsymptoticForm("power", beta, -beta - 1.0, large, needs_k=True),
            # integrating rho ~ m k beta x^beta from 0
            I_cdf=AsymptoticForm("power", m * beta / (beta + 1.0), beta + 1.0, small,
                                 needs_k=True),
            X1_survival=AsymptoticForm("power", 1.0, -beta, large, needs_k=True),
            exact=False)
    raise DomainError(f"no density bundle for {model.family}")


# ---------------------------------------------------------------------------
# incomplete gamma sandwich and the stable-conditioned tail
# ---------------------------------------------------------------------------

def sandwich_domain_start(a: float, C: float) -> float:
    return max(C * (a - 1.0) / (C - 1.0), 0.0)


def incomplete_gamma_sandwich(a: float, x: float, c: float, C: float, slack: float = 0.0) -> bool:
    """Whether ``c e^{-x} x^{a-1} <= Gamma(a, x) <= C e^{-x} x^{a-1}`` holds at ``x``.

    The ratio ``Gamma(a, x) / (e^{-x} x^{a-1})`` is computed directly, so the
    check is scale free; ``slack`` is an absolute tolerance on that ratio.
    """
    a, x, c, C = float(a), float(x), float(c), float(C)
    if not (a > 0 and c > 0 and C > 1):
        raise DomainError("need a > 0, c > 0 and C > 1")
    if not x > 0 or x < sandwich_domain_start(a, C):
        raise DomainError(f"x = {x!r} is below the domain start {sandwich_domain_start(a, C):.6g}")
    r = special.upper_tail_ratio(a, x)
    return c - slack <= r <= C + slack


def verified_sandwich_pairs(a: float) -> list[tuple[float, float]]:
    """``(c, C)`` pairs valid on the whole domain.

    For ``a >= 1`` the ratio lies in ``[1, x / (x - a + 1)]``, which is at most
    ``C`` exactly on ``x >= C(a-1)/(C-1)``; so ``c = 1`` works with any ``C``.
    """
    if a < 1.0:
        raise DomainError("pairs are only derived for a >= 1")
    return [(1.0, 1.5), (1.0, 2.0), (1.0, 4.0)]


def de_bruijn_tail(alpha: float, x: float) -> float:
    """``((alpha-1)/alpha) (1/alpha)^{1/(alpha-1)} x^{-1/(alpha-1)}``, asymptotic to ``-log Fbar(x)`` as ``x -> 0``."""
    alpha, x = float(alpha), float(x)
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha!r}")
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    e = 1.0 / (alpha - 1.0)
    return (alpha - 1.0) / alpha * (1.0 / alpha) ** e * x ** (-e)


def passage_laplace_exponent(alpha: float, lam: float) -> float:
    """``Phi(lam) = lam^{1/alpha}``: the passage-time subordinator of a spectrally negative stable process."""
    return float(lam) ** (1.0 / float(alpha))
