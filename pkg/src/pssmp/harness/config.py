"""Experiment configuration: flat ``key = value`` text, documents separated by ``---``.

Example::

    kind = verify_distribution
    id = bessel-exp-functional
    model = brownian_drift
    model.a = 1.0
    controls.n = 100000
    controls.ds = 1e-3
    controls.rel_tol = 1e-4
    controls.seed = 1
    out = results

Blank lines and ``#`` comments are ignored; unknown keys are rejected.
Model parameters are the constructor fields of the family
(``brownian_drift: a``, ``stable_plus_drift: beta, c``, ``poisson``,
``compound_poisson_exp: a, b``, ``lamperti_stable: beta, eps``,
``deterministic_drift: rate``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..levy_models import DomainError, LevyModel, model_from_mapping

KINDS = (
    "verify_distribution",
    "verify_moments",
    "verify_entrance",
    "verify_last_passage",
    "verify_scaling",
    "verify_closed_form",
    "lil_sweep",
    "integral_test",
    "tail_fit",
    "simulate",
)

#: numeric controls and their meaning; all must be positive (``seed`` may be 0)
NUMERIC_CONTROLS = {
    "ds": "Lamperti-time step",
    "rel_tol": "relative truncation tolerance of exponential functionals",
    "n": "number of samples or paths",
    "seed": "base seed; sample i uses stream (seed, i)",
    "t_max": "real-time horizon(s); several values separated by commas",
    "guard_level": "level below which infinite-horizon functionals are trusted",
    "guard_factor": "ratio between the final level of a path and its guard level",
    "x0_small": "starting point standing in for 0",
    "x0": "starting point",
    "alpha": "self-similarity index",
    "t": "time of a marginal",
    "level": "level of a passage time",
    "k": "scaling factor",
    "k_max": "largest moment order",
    "threshold": "acceptance threshold of the main statistic",
    "band_lo": "lower end of an acceptance band",
    "band_hi": "upper end of an acceptance band",
    "t_lo": "lower end of a fitting window",
    "t_hi": "upper end of a fitting window",
    "points": "number of grid points",
    "lam": "integral-test window end",
    "windows": "number of decades in the integral test",
    "margin": "integral-test exponent margin",
    "delta": "Bessel dimension",
    "max_steps": "cap on steps per draw",
}

#: text controls
TEXT_CONTROLS = {
    "method": "grid, jumps or auto",
    "family": "envelope family: bessel_lil, watanabe_g, poisson_f",
    "c_values": "comma-separated constants of the h_c test functions",
    "p_values": "comma-separated exponents of the t^(p-1) sanity family",
    "converges": "comma-separated constants expected to converge",
}

_INTEGER_CONTROLS = {"n", "seed", "k_max", "points", "windows", "max_steps"}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    experiment_id: str
    model: LevyModel | None = None
    controls: dict = field(default_factory=dict)
    out: str | None = None

    def control(self, name: str, default=None):
        return self.controls.get(name, default)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, controls={**self.controls, "seed": int(seed)})

    def to_text(self) -> str:
        lines = [f"kind = {self.kind}", f"id = {self.experiment_id}"]
        if self.model is not None:
            for ln in self.model.to_config().splitlines():
                key, val = (s.strip() for s in ln.split("=", 1))
                lines.append(f"model = {val}" if key == "model" else f"model.{key} = {val}")
        for key, val in self.controls.items():
            if isinstance(val, tuple):
                val = ",".join(repr(v) if isinstance(v, float) else str(v) for v in val)
            lines.append(f"controls.{key} = {val}")
        if self.out is not None:
            lines.append(f"out = {self.out}")
        return "\n".join(lines) + "\n"


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def _numeric(name: str, text: str):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    vals = []
    for p in parts:
        try:
            v = int(p) if name in _INTEGER_CONTROLS else float(p)
        except ValueError:
            # allow 1e5 style integers
            try:
                f = float(p)
            except ValueError:
                raise ConfigError(f"controls.{name}: not a number: {p!r}") from None
            if name in _INTEGER_CONTROLS and f != int(f):
                raise ConfigError(f"controls.{name}: expected an integer, got {p!r}")
            v = int(f) if name in _INTEGER_CONTROLS else f
        if not math.isfinite(v):
            raise ConfigError(f"controls.{name}: must be finite")
        if name == "seed":
            if v < 0:
                raise ConfigError("controls.seed must be nonnegative")
        elif not v > 0:
            raise ConfigError(f"controls.{name} must be positive, got {p!r}")
        vals.append(v)
    if not vals:
        raise ConfigError(f"controls.{name}: empty value")
    return vals[0] if len(vals) == 1 else tuple(vals)


def _parse_document(lines: list[tuple[int, str]]) -> ExperimentConfig:
    kind = exp_id = out = None
    model_name = None
    model_params: dict[str, str] = {}
    controls: dict = {}
    for lineno, line in lines:
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "kind":
            if val not in KINDS:
                raise ConfigError(f"line {lineno}: unknown kind {val!r}; known: {', '.join(KINDS)}")
            kind = val
        elif key == "id":
            exp_id = val
        elif key == "out":
            out = val
        elif key == "model":
            model_name = val
        elif key.startswith("model."):
            model_params[key[len("model."):]] = val
        elif key.startswith("controls."):
            name = key[len("controls."):]
            if name in NUMERIC_CONTROLS:
                controls[name] = _numeric(name, val)
            elif name in TEXT_CONTROLS:
                controls[name] = val
            else:
                raise ConfigError(f"line {lineno}: unknown control {name!r}")
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if kind is None:
        raise ConfigError("document without 'kind'")
    model = None
    if model_name is not None:
        try:
            model = model_from_mapping({"model": model_name, **model_params})
        except (DomainError, ValueError, TypeError) as exc:
            raise ConfigError(f"invalid model: {exc}") from exc
    elif model_params:
        raise ConfigError("model.* keys given without 'model'")
    return ExperimentConfig(kind, exp_id or kind, model, controls, out)


def parse_configs(text: str) -> list[ExperimentConfig]:
    """Parse every document in ``text``; an empty text gives an empty list."""
    docs: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line == "---":
            docs.append([])
        elif line:
            docs[-1].append((lineno, line))
    return [_parse_document(d) for d in docs if d]


def load_configs(path) -> list[ExperimentConfig]:
    with open(path) as fh:
        return parse_configs(fh.read())
