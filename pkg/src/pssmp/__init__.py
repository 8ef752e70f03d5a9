"""Simulation and verification tools for positive self-similar Markov processes."""
import os as _os

import numba as _numba

if "NUMBA_THREADING_LAYER_PRIORITY" not in _os.environ:
    # probing an old TBB only produces a warning; prefer the layers that work
    _numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .levy_models import (
    BrownianWithDrift,
    CompoundPoissonExp,
    DeterministicDrift,
    DomainError,
    LampertiStableSubordinator,
    ResourceLimitError,
    StablePlusDrift,
    StandardPoisson,
)

__all__ = [
    "BrownianWithDrift",
    "CompoundPoissonExp",
    "DeterministicDrift",
    "DomainError",
    "LampertiStableSubordinator",
    "ResourceLimitError",
    "StablePlusDrift",
    "StandardPoisson",
]
