"""Experiment runners: each kind maps a config to report rows and artifact files."""
from __future__ import annotations

import json
import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import closed_forms as cf
from .. import stats
from ..lamperti import (
    build_pssmp_path,
    sample_entrance_marginal,
    sample_exponential_functionals,
)
from ..levy_models import (
    BrownianWithDrift,
    CompoundPoissonExp,
    DeterministicDrift,
    DomainError,
    LampertiStableSubordinator,
    StablePlusDrift,
    StandardPoisson,
    laplace_exponent,
)
from ..path_statistics import (
    EnvelopeSeries,
    SmallStartBiasWarning,
    future_infimum,
    last_passage,
)
from .classifier import CONVERGES, DIVERGES, ClassifierControls, integral_test_classify
from .config import ExperimentConfig

log = logging.getLogger(__name__)

DEFAULTS = {"ds": 1e-3, "rel_tol": 1e-4, "seed": 0, "alpha": 1.0, "method": "auto"}


@dataclass(frozen=True)
class ReportRow:
    check_id: str
    paper_anchor: str
    value: object
    threshold: object
    passed: bool

    def to_dict(self) -> dict:
        return {"check_id": self.check_id, "paper_anchor": self.paper_anchor,
                "value": self.value, "threshold": self.threshold, "pass": self.passed}


@dataclass
class Report:
    experiment_id: str
    rows: list[ReportRow] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"experiment_id": self.experiment_id, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _c(cfg: ExperimentConfig, name: str, default=None):
    return cfg.controls.get(name, DEFAULTS.get(name, default))


def _num(v):
    """JSON-friendly scalar: nan/inf become None."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


class _Rows:
    """Collects rows; a failing check becomes a failed row instead of aborting."""

    def __init__(self, report: Report):
        self.report = report
        self._anchors = cf.catalog_anchors()

    def add(self, check_id, anchor, value, threshold, passed):
        if anchor not in self._anchors:
            raise KeyError(f"anchor {anchor!r} is not in the constants catalog")
        if isinstance(threshold, (tuple, list)):
            threshold = [_num(t) for t in threshold]
        else:
            threshold = _num(threshold)
        self.report.rows.append(ReportRow(check_id, anchor, _num(value), threshold, bool(passed)))

    def fail(self, check_id, anchor, threshold, exc):
        log.error("%s/%s failed: %s", self.report.experiment_id, check_id, exc)
        self.add(check_id, anchor, None, threshold, False)


def _out_path(out_dir, cfg, suffix):
    if out_dir is None:
        return None
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    return os.path.join(out_dir, f"{cfg.experiment_id}{suffix}")


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def _functional_cdf(model):
    if isinstance(model, BrownianWithDrift):
        return "bessel-exp-functional", cf.bessel_closed_forms(model.a).I_cdf
    if isinstance(model, CompoundPoissonExp):
        return "watanabe-exp-functional", stats.gamma_tools(model.b + 1.0, model.a).cdf
    raise DomainError(f"no closed-form law of the exponential functional for {model.family}")


def _entrance_cdf(model, t):
    if isinstance(model, BrownianWithDrift):
        base = cf.bessel_closed_forms(model.a).X1_cdf
        return "bessel-entrance-law", lambda x: base(np.asarray(x) / t)
    if isinstance(model, CompoundPoissonExp):
        surv = cf.density_bundle(model).X1_survival
        return "entrance-law", lambda x: np.array([1.0 - surv(v / t) if v > 0 else 0.0
                                                   for v in np.atleast_1d(x)])
    return None, None


def _moment_variance_finite(model, k):
    # Var(I^-k) < inf needs E I^-2k, i.e. psi(j) finite for j <= 2k - 1
    return all(math.isfinite(laplace_exponent(model, float(j))) for j in range(1, 2 * k))


# ---------------------------------------------------------------------------
# kinds
# ---------------------------------------------------------------------------

def _verify_distribution(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    alpha = _c(cfg, "alpha")
    if alpha != 1.0:
        raise DomainError("closed-form laws are stated for alpha = 1")
    anchor, cdf = _functional_cdf(model)
    n = int(_c(cfg, "n", 100_000))
    rel_tol = _c(cfg, "rel_tol")
    thr = _c(cfg, "threshold", 0.02)
    batch = sample_exponential_functionals(model, alpha, _c(cfg, "ds"), rel_tol, n,
                                           _c(cfg, "seed"), method=_c(cfg, "method"))
    gof = stats.ks_test(batch.values, cdf)
    rows.add("ks_statistic", anchor, gof.ks_statistic, thr, gof.ks_statistic < thr)
    worst = float(np.max(batch.truncation_bounds / batch.values))
    rows.add("truncation_bound_ratio", anchor, worst, rel_tol, worst <= rel_tol)
    path = _out_path(out_dir, cfg, "_samples.csv")
    if path:
        batch.to_csv(path)
        stats.write_gof_csv(_out_path(out_dir, cfg, "_gof.csv"), [(cfg.experiment_id, gof)])
        rows.report.artifacts += [path, _out_path(out_dir, cfg, "_gof.csv")]


def _verify_moments(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    alpha = _c(cfg, "alpha")
    if alpha != 1.0:
        raise DomainError("the moment formula is stated for alpha = 1")
    n = int(_c(cfg, "n", 100_000))
    k_max = int(_c(cfg, "k_max", 4))
    thr = _c(cfg, "threshold", 3.0)
    batch = sample_exponential_functionals(model, alpha, _c(cfg, "ds"), _c(cfg, "rel_tol"), n,
                                           _c(cfg, "seed"), method=_c(cfg, "method"))
    table = []
    for k in range(1, k_max + 1):
        cid = f"negative_moment_k{k}"
        if not _moment_variance_finite(model, k):
            log.info("%s: skipping k=%d, the Monte Carlo variance is infinite", cfg.experiment_id, k)
            continue
        try:
            target = cf.negative_moment(model, k)
            est = stats.mc_moment(batch.values, k, "inverse")
            z = est.z_score(target)
            rows.add(cid, "negative-moments", z, thr, z <= thr)
            table.append((k, est.estimate, est.std_error, target, z))
        except (DomainError, ArithmeticError) as exc:
            rows.fail(cid, "negative-moments", thr, exc)
    path = _out_path(out_dir, cfg, "_moments.csv")
    if path:
        from .. import _csv
        _csv.write_csv(path, ("k", "estimate", "std_error", "formula", "z"), table)
        rows.report.artifacts.append(path)


def _verify_entrance(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    t = float(_c(cfg, "t", 1.0))
    alpha = _c(cfg, "alpha")
    n = int(_c(cfg, "n", 100_000))
    ws = sample_entrance_marginal(model, t, n, _c(cfg, "ds"), _c(cfg, "rel_tol"), _c(cfg, "seed"),
                                  alpha=alpha, method=_c(cfg, "method"))
    thr = _c(cfg, "threshold", 0.03)
    anchor, cdf = _entrance_cdf(model, t) if alpha == 1.0 else (None, None)
    if cdf is not None:
        gof = stats.ks_test(ws, cdf)
        rows.add("weighted_ks_statistic", anchor, gof.ks_statistic, thr, gof.ks_statistic < thr)
        path = _out_path(out_dir, cfg, "_gof.csv")
        if path:
            stats.write_gof_csv(path, [(cfg.experiment_id, gof)])
            rows.report.artifacts.append(path)
    # the self-normalised standard error needs E I^-4, i.e. psi(1..3) finite
    if alpha == 1.0 and not _moment_variance_finite(model, 2):
        log.info("%s: weighted-mean check skipped, its variance is infinite", cfg.experiment_id)
    elif alpha == 1.0:
        try:
            target = t * cf.entrance_moment(model, 1)
            se = ws.mean_std_error()
            z = abs(ws.mean() - target) / se
            rows.add("weighted_mean_z", "entrance-moments", z, 3.0, z <= 3.0)
        except DomainError as exc:
            rows.fail("weighted_mean_z", "entrance-moments", 3.0, exc)


def _verify_last_passage(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    if not isinstance(model, (BrownianWithDrift, StablePlusDrift)):
        raise DomainError("the last-passage identity is checked only without positive jumps")
    n = int(_c(cfg, "n", 5000))
    x0 = float(_c(cfg, "x0_small", 1e-4))
    level = float(_c(cfg, "level", 1.0))
    guard_factor = float(_c(cfg, "guard_factor", 1e4))
    ds, seed = _c(cfg, "ds"), _c(cfg, "seed")
    thr = _c(cfg, "threshold", 0.05)
    u = np.empty(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallStartBiasWarning)
        for i in range(n):
            path = build_pssmp_path(model, x0, 1.0, 0.0, ds, seed, stream=i,
                                    until_level=level * guard_factor)
            u[i] = last_passage(path, level)
    direct = sample_exponential_functionals(model, 1.0, ds, _c(cfg, "rel_tol"), n, seed,
                                            offset=n, method=_c(cfg, "method"))
    gof = stats.ks_two_sample(u / level, direct.values)
    rows.add("ks_two_sample", "last-passage-identity", gof.ks_statistic, thr,
             gof.ks_statistic < thr)
    path = _out_path(out_dir, cfg, "_last_passage.csv")
    if path:
        from .. import _csv
        _csv.write_csv(path, ("U", "I"), zip(u, direct.values))
        rows.report.artifacts.append(path)


def _marginal(model, x0, alpha, t, ds, seed, stream, method):
    p = build_pssmp_path(model, x0, alpha, t, ds, seed, stream=stream, times=np.array([t]),
                         method=method)
    return float(p.values[-1])


def _verify_scaling(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    k = float(_c(cfg, "k", 2.0))
    x0 = float(_c(cfg, "x0", 1.0))
    t = float(_c(cfg, "t", 1.0))
    alpha = _c(cfg, "alpha")
    n = int(_c(cfg, "n", 10_000))
    ds, seed, method = _c(cfg, "ds"), _c(cfg, "seed"), _c(cfg, "method")
    thr = _c(cfg, "threshold", 0.03)
    scaled = np.array([k * _marginal(model, x0, alpha, k ** -alpha * t, ds, seed, i, method)
                       for i in range(n)])
    direct = np.array([_marginal(model, k * x0, alpha, t, ds, seed, n + i, method)
                       for i in range(n)])
    gof = stats.ks_two_sample(scaled, direct)
    rows.add("ks_two_sample", "scaling-property", gof.ks_statistic, thr, gof.ks_statistic < thr)


def drift_closed_form(rate, x0, alpha, t):
    """``X_t`` for ``xi_s = rate s``: ``x0 (1 + alpha rate x0^-alpha t)^{1/alpha}``."""
    return x0 * (1.0 + alpha * rate * x0 ** -alpha * np.asarray(t)) ** (1.0 / alpha)


def drift_path_error(model: DeterministicDrift, ds, t_max=10.0, points=10_001, x0=1.0, alpha=1.0):
    times = np.linspace(0.0, t_max, int(points))
    p = build_pssmp_path(model, x0, alpha, t_max, ds, 0, times=times)
    return float(np.max(np.abs(p.values - drift_closed_form(model.rate, x0, alpha, p.times))))


def _verify_closed_form(cfg, rows, out_dir):
    model = cfg.model or DeterministicDrift(1.0)
    if not isinstance(model, DeterministicDrift):
        raise DomainError("the closed-form path check needs the deterministic drift model")
    ds = _c(cfg, "ds")
    t_max = float(_c(cfg, "t_max", 10.0))
    points = int(_c(cfg, "points", 10_001))
    e1 = drift_path_error(model, ds, t_max, points)
    e2 = drift_path_error(model, ds / 2, t_max, points)
    rows.add("max_abs_error", "lamperti-representation", e1, 3 * ds, e1 < 3 * ds)
    ratio = e1 / e2
    rows.add("refinement_ratio", "lamperti-representation", ratio, [1.7, 2.3],
             1.7 <= ratio <= 2.3)


def _integral_test(cfg, rows, out_dir):
    ctl = ClassifierControls(lam=float(_c(cfg, "lam", 0.1)),
                             windows=int(_c(cfg, "windows", 40)),
                             margin=float(_c(cfg, "margin", 0.05)))
    delta = float(_c(cfg, "delta", 4.0))
    c_text = _c(cfg, "c_values", "0.5,0.75,1.25,1.5,2")
    p_text = _c(cfg, "p_values", "-0.5,-0.1,0.1,0.5")
    table = []
    for c in (float(v) for v in c_text.split(",") if v.strip()):
        # (h/2t)^{(delta-4)/2} e^{-h/2t} dt/t ~ |log t|^{-c} dt/t up to slowly varying factors
        expected = CONVERGES if c > 1.0 else DIVERGES
        cid = f"bessel_h_c{c!r}"
        try:
            f = cf.bessel_future_infimum_integrand(delta, cf.bessel_lil_candidate(c))
            v = integral_test_classify(f, "zero", ctl)
            rows.add(cid, "integral-test", v.fitted_exponent, expected, v.verdict == expected)
            table.append((cid, v.verdict, expected, v.fitted_exponent))
        except (ValueError, ArithmeticError) as exc:
            rows.fail(cid, "integral-test", expected, exc)
    for p in (float(v) for v in p_text.split(",") if v.strip()):
        expected = CONVERGES if p > 0 else DIVERGES
        cid = f"power_p{p!r}"
        v = integral_test_classify(lambda t, p=p: t ** (p - 1.0), "zero", ctl)
        rows.add(cid, "integral-test", v.fitted_exponent, expected, v.verdict == expected)
        table.append((cid, v.verdict, expected, v.fitted_exponent))
    path = _out_path(out_dir, cfg, "_verdicts.csv")
    if path:
        from .. import _csv
        _csv.write_csv(path, ("case", "verdict", "expected", "fitted_exponent"), table)
        rows.report.artifacts.append(path)


def _tail_fit(cfg, rows, out_dir):
    model = cfg.model or StandardPoisson()
    n = int(_c(cfg, "n", 1_000_000))
    if isinstance(model, StandardPoisson):
        transform, anchor = "loglog_quadratic", "poisson-tail"
        lo, hi = _c(cfg, "t_lo", 0.02), _c(cfg, "t_hi", 0.2)
        band = (_c(cfg, "band_lo", 0.3), _c(cfg, "band_hi", 0.7))
    elif isinstance(model, LampertiStableSubordinator):
        transform, anchor = "loglog_linear", "lamperti-stable-tail"
        lo, hi = _c(cfg, "t_lo", 1e-3), _c(cfg, "t_hi", 0.05)
        band = (_c(cfg, "band_lo", model.beta + 0.7), _c(cfg, "band_hi", model.beta + 1.3))
    else:
        raise DomainError(f"no tail asymptotic to fit for {model.family}")
    batch = sample_exponential_functionals(model, 1.0, _c(cfg, "ds"), _c(cfg, "rel_tol"), n,
                                           _c(cfg, "seed"), method=_c(cfg, "method"))
    ts = np.geomspace(lo, hi, int(_c(cfg, "points", 12)))
    probs = stats.empirical_lower_tail(batch.values, ts)
    used = probs > 0
    if (~used).any():
        log.warning("%s: %d grid point(s) with no sample below t dropped from the fit",
                    cfg.experiment_id, int((~used).sum()))
    fit = stats.fit_tail_exponent(ts[used], probs[used], transform)
    rows.add("tail_coefficient", anchor, fit.coefficient, list(band),
             band[0] <= fit.coefficient <= band[1])
    path = _out_path(out_dir, cfg, "_tail.csv")
    if path:
        from .. import _csv
        _csv.write_csv(path, ("t", "probability"), zip(ts, probs))
        rows.report.artifacts.append(path)


def _simulate(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    x0 = float(_c(cfg, "x0", 1.0))
    t_max = float(_c(cfg, "t_max", 1.0))
    p = build_pssmp_path(model, x0, _c(cfg, "alpha"), t_max, _c(cfg, "ds"), _c(cfg, "seed"),
                         method=_c(cfg, "method"))
    rows.add("path_points", "lamperti-representation", len(p), None, True)
    path = _out_path(out_dir, cfg, "_path.csv")
    if path:
        p.to_csv(path)
        rows.report.artifacts.append(path)


# ---------------------------------------------------------------------------
# LIL sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LilSweepResult:
    series: list[EnvelopeSeries]
    horizons: tuple[float, ...]
    per_path_max: dict[float, np.ndarray]
    median_of_max: dict[float, float]
    overall_max: float
    overall_min: float
    excluded: int


def _family_for(model, name):
    if name is None:
        name = {BrownianWithDrift: "bessel_lil", CompoundPoissonExp: "watanabe_g",
                StandardPoisson: "poisson_f"}.get(type(model))
    if name == "bessel_lil":
        return name, cf.BesselLIL(), "bessel-future-infimum-lil", (0.3, 2.0)
    if name == "watanabe_g":
        if not isinstance(model, CompoundPoissonExp):
            raise DomainError("watanabe_g needs a compound_poisson_exp model")
        return name, cf.WatanabeG(model.a), "watanabe-upper-envelope-lil", (0.2, 3.0)
    if name == "poisson_f":
        return name, cf.PoissonF(), "poisson-upper-envelope-lil", (0.2, 3.0)
    raise DomainError(f"no LIL family {name!r} for {model.family}")


def _envelope(family, t):
    """Denominator of the ratio: ``phi(t)`` for J-type, ``t^2 / f(t)`` for X-type families."""
    v = cf.eval_test_function(family, t)
    return v if isinstance(family, cf.BesselLIL) else t * t / v


def lil_sweep(cfg: ExperimentConfig) -> LilSweepResult:
    """Simulate paths from a small start and record envelope ratios on ``t = e^k``."""
    model = cfg.model or BrownianWithDrift(1.0)
    name, family, _, _ = _family_for(model, _c(cfg, "family"))
    horizons = _c(cfg, "t_max", (1e4, 1e6))
    horizons = tuple(sorted(horizons if isinstance(horizons, tuple) else (horizons,)))
    T = horizons[-1]
    n = int(_c(cfg, "n", 200))
    x0 = float(_c(cfg, "x0_small", 1e-4))
    guard_factor = float(_c(cfg, "guard_factor", 1e4))
    ds, seed, method, alpha = _c(cfg, "ds"), _c(cfg, "seed"), _c(cfg, "method"), _c(cfg, "alpha")
    ks = np.arange(2, int(math.floor(math.log(T))) + 1)
    grid = np.exp(ks.astype(np.float64))
    denom = np.array([_envelope(family, t) for t in grid])
    monotone = isinstance(model, (StandardPoisson, CompoundPoissonExp))
    fid = cf.family_id(family)
    series, excluded = [], 0
    for i in range(n):
        try:
            if monotone:
                path = build_pssmp_path(model, x0, alpha, T, ds, seed, stream=i, method=method)
                vals = path.at(grid)
            else:
                first = build_pssmp_path(model, x0, alpha, T, ds, seed, stream=i, method=method)
                guard = float(np.max(first.values))
                # same stream, so this extends the same path until it is far above the guard
                path = build_pssmp_path(model, x0, alpha, T, ds, seed, stream=i, method=method,
                                        until_level=guard * guard_factor)
                j = future_infimum(path, guard)
                vals = j.at(grid)
        except (ArithmeticError, RuntimeError) as exc:
            log.warning("path %d excluded: %s", i, exc)
            excluded += 1
            continue
        series.append(EnvelopeSeries(grid.copy(), vals / denom, fid))
    per_path_max = {}
    for h in horizons:
        mask = grid <= h
        per_path_max[h] = np.array([s.ratios[mask].max() for s in series])
    ratios = np.concatenate([s.ratios for s in series]) if series else np.array([np.nan])
    return LilSweepResult(series, horizons, per_path_max,
                          {h: float(np.median(v)) for h, v in per_path_max.items()},
                          float(np.max(ratios)), float(np.min(ratios)), excluded)


def _lil(cfg, rows, out_dir):
    model = cfg.model or BrownianWithDrift(1.0)
    _, _, anchor, band = _family_for(model, _c(cfg, "family"))
    band = (_c(cfg, "band_lo", band[0]), _c(cfg, "band_hi", band[1]))
    res = lil_sweep(cfg)
    rows.add("envelope_min", anchor, res.overall_min, band[0], res.overall_min >= band[0])
    rows.add("envelope_max", anchor, res.overall_max, band[1], res.overall_max <= band[1])
    if len(res.horizons) > 1:
        lo, hi = res.horizons[0], res.horizons[-1]
        diff = res.median_of_max[hi] - res.median_of_max[lo]
        rows.add("median_of_max_increase", anchor, diff, 0.0, diff > 0.0)
    rows.add("excluded_paths", anchor, res.excluded, 0, res.excluded == 0)
    env = _out_path(out_dir, cfg, "_envelope.csv")
    if env:
        from .. import _csv
        _csv.write_csv(env, ("t", "ratio", "test_function_id"),
                       ((t, r, s.test_function_id) for s in res.series
                        for t, r in zip(s.times, s.ratios)))
        summ = _out_path(out_dir, cfg, "_summary.csv")
        _csv.write_csv(summ, ("horizon", "path", "max_ratio"),
                       ((h, i, m) for h in res.horizons for i, m in enumerate(res.per_path_max[h])))
        rows.report.artifacts += [env, summ]


RUNNERS = {
    "verify_distribution": _verify_distribution,
    "verify_moments": _verify_moments,
    "verify_entrance": _verify_entrance,
    "verify_last_passage": _verify_last_passage,
    "verify_scaling": _verify_scaling,
    "verify_closed_form": _verify_closed_form,
    "lil_sweep": _lil,
    "integral_test": _integral_test,
    "tail_fit": _tail_fit,
    "simulate": _simulate,
}


def run_experiment(cfg: ExperimentConfig, out_dir: str | os.PathLike | None = None) -> Report:
    """Run one experiment; failures become failed rows.  Writes ``<id>.json`` when ``out_dir`` is set."""
    out_dir = out_dir if out_dir is not None else cfg.out
    report = Report(cfg.experiment_id)
    rows = _Rows(report)
    try:
        RUNNERS[cfg.kind](cfg, rows, out_dir)
    except Exception as exc:  # a failed stage is a failed row, not a crashed batch
        rows.fail(f"{cfg.kind}_error", "integral-test" if cfg.kind == "integral_test"
                  else _default_anchor(cfg), None, exc)
    if out_dir is not None:
        path = _out_path(out_dir, cfg, ".json")
        with open(path, "w") as fh:
            fh.write(report.to_json())
        report.artifacts.append(path)
    return report


def _default_anchor(cfg):
    return {
        "verify_distribution": "bessel-exp-functional",
        "verify_moments": "negative-moments",
        "verify_entrance": "entrance-law",
        "verify_last_passage": "last-passage-identity",
        "verify_scaling": "scaling-property",
        "verify_closed_form": "lamperti-representation",
        "lil_sweep": "bessel-future-infimum-lil",
        "tail_fit": "poisson-tail",
        "simulate": "lamperti-representation",
    }[cfg.kind]


def run_all(configs, out_dir=None) -> list[Report]:
    return [run_experiment(c, out_dir) for c in configs]
