"""Config-driven experiment runner, integral-test classifier and CLI."""
from .classifier import (
    CONVERGES,
    DIVERGES,
    INCONCLUSIVE,
    ClassifierControls,
    IntegralTestVerdict,
    integral_test_classify,
)
from .config import ConfigError, ExperimentConfig, load_configs, parse_configs
from .experiments import Report, ReportRow, lil_sweep, run_all, run_experiment

__all__ = [
    "CONVERGES", "DIVERGES", "INCONCLUSIVE", "ClassifierControls", "IntegralTestVerdict",
    "integral_test_classify", "ConfigError", "ExperimentConfig", "load_configs", "parse_configs",
    "Report", "ReportRow", "lil_sweep", "run_all", "run_experiment",
]
