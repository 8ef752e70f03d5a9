import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pssmp.lamperti import (ExponentOverflowError, HorizonExceededError, OutOfHorizonError,
                            WeightedSample, build_pssmp_path, invert_time_change,
                            partial_exponential_functional, sample_entrance_marginal,
                            sample_exponential_functionals, total_exponential_functional)
from pssmp.levy_models import (BrownianWithDrift, CompoundPoissonExp, DeterministicDrift,
                               DomainError, LevyPath, StablePlusDrift, StandardPoisson,
                               simulate_path)
from pssmp.stats import ks_test


def _path(values, ds):
    values = np.asarray(values, dtype=np.float64)
    return LevyPath(ds * np.arange(values.size), values, DeterministicDrift())


def test_constant_path_functional():
    out = partial_exponential_functional(_path(np.zeros(11), 0.1), 1.0)
    assert out[0] == 0.0
    assert out[-1] == pytest.approx(1.0, rel=1e-14)


def test_drift_path_functional():
    ds = 1e-4
    s = ds * np.arange(10_001)
    out = partial_exponential_functional(_path(s, ds), 1.0)
    assert abs(out[-1] - (math.e - 1)) < 1e-3


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_functional_nondecreasing(seed):
    p = simulate_path(BrownianWithDrift(1.0), 0.01, 5.0, sign="dual", seed=seed)
    assert np.all(np.diff(partial_exponential_functional(p, 1.0)) >= 0)


def test_overflow_guard():
    with pytest.raises(ExponentOverflowError):
        partial_exponential_functional(_path([0.0, 800.0, 0.0], 1.0), 1.0)


def test_invert_time_change():
    grid = np.linspace(0, 5, 5001)
    assert invert_time_change(grid, grid, 2.5) == pytest.approx(2.5)
    assert invert_time_change(grid, grid, 0.0) == 0.0
    I = np.expm1(grid)
    assert abs(invert_time_change(I, grid, 10.0) - math.log(11.0)) < 1e-3
    with pytest.raises(OutOfHorizonError):
        invert_time_change(grid, grid, 5.0)


def test_drift_path_closed_form():
    p = build_pssmp_path(DeterministicDrift(), 1.0, 1.0, 10.0, 1e-3, 0, times=np.linspace(0, 10, 101))
    assert np.max(np.abs(p.values - (1 + p.times))) < 0.02


def test_zero_horizon_path():
    p = build_pssmp_path(BrownianWithDrift(1.0), 1.0, 1.0, 0.0, 1e-3, 0)
    assert p.times.tolist() == [0.0] and p.values.tolist() == [1.0]


def test_path_starts_at_x0_and_is_deterministic(tmp_path):
    kw = dict(model=StablePlusDrift(1.5, 1.0), x0=2.0, alpha=1.0, t_max=5.0, ds=1e-3, seed=4)
    a, b = build_pssmp_path(**kw), build_pssmp_path(**kw)
    assert a.values[0] == 2.0 and a.times[0] == 0.0 and a.horizon > 5.0
    a.to_csv(tmp_path / "a.csv")
    b.to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "t,X"


def test_jump_path_is_step_function():
    p = build_pssmp_path(StandardPoisson(), 1.0, 1.0, 20.0, 1e-3, 1)
    assert np.allclose(np.diff(np.log(p.values)), 1.0)
    assert np.all(p.at(p.times) == p.values)


def test_exact_batch_contract(tmp_path):
    batch = sample_exponential_functionals(BrownianWithDrift(1.0), 1.0, 1e-2, 0.5, 300, 3)
    assert np.all(batch.values > 0)
    assert np.all(batch.truncation_bounds <= 0.5 * batch.values)
    one = total_exponential_functional(BrownianWithDrift(1.0), 1.0, 1e-2, 0.5, 3)
    assert one == batch[0]
    batch.to_csv(tmp_path / "i.csv")
    assert (tmp_path / "i.csv").read_text().startswith("value,truncation_bound,horizon\n")


def test_batch_offset_reproduces_slices():
    m = CompoundPoissonExp(3.0, 2.0)
    full = sample_exponential_functionals(m, 1.0, 1e-2, 1e-4, 20, 8)
    tail = sample_exponential_functionals(m, 1.0, 1e-2, 1e-4, 5, 8, offset=15)
    assert np.array_equal(full.values[15:], tail.values)


def test_horizon_cap():
    with pytest.raises(HorizonExceededError) as info:
        sample_exponential_functionals(BrownianWithDrift(1.0), 1.0, 1e-3, 1e-12, 2, 0, max_steps=10)
    assert "horizon" in info.value.partial


def test_bessel_functional_law_small():
    b = sample_exponential_functionals(BrownianWithDrift(1.0), 1.0, 1e-3, 1e-4, 3000, 5)
    assert ks_test(b.values, lambda x: np.exp(-1 / (2 * x))).ks_statistic < 0.04


def test_watanabe_functional_mean_small():
    b = sample_exponential_functionals(CompoundPoissonExp(3.0, 2.0), 1.0, 1e-3, 1e-4, 20_000, 6)
    se = b.values.std() / math.sqrt(len(b))
    assert abs(b.values.mean() - 1.0) < 3 * se


def test_jump_method_rejected_for_diffusion():
    with pytest.raises(DomainError):
        sample_exponential_functionals(BrownianWithDrift(1.0), 1.0, 1e-3, 1e-4, 2, 0, method="jumps")


def test_weighted_sample_normalization():
    w = WeightedSample.normalized([1.0, 2.0, 3.0], [1.0, 1.0, 2.0])
    assert w.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert w.mean() == pytest.approx(2.25)
    with pytest.raises(DomainError):
        WeightedSample(np.ones(2), np.array([1.0, -1.0]))


def test_entrance_single_point():
    w = sample_entrance_marginal(BrownianWithDrift(1.0), 1.0, 1, 1e-2, 1e-3, 0)
    assert len(w) == 1 and w.weights[0] == 1.0


def test_entrance_mean_small():
    w = sample_entrance_marginal(BrownianWithDrift(1.0), 1.0, 5000, 1e-3, 1e-4, 2)
    assert abs(w.mean() - 4.0) < 3 * w.mean_std_error()


def test_scaling_property_small():
    from pssmp.stats import ks_two_sample

    m = BrownianWithDrift(1.0)
    n = 1500
    a = [2.0 * build_pssmp_path(m, 1.0, 1.0, 0.5, 1e-3, 1, stream=i, times=[0.5]).values[-1]
         for i in range(n)]
    b = [build_pssmp_path(m, 2.0, 1.0, 1.0, 1e-3, 1, stream=n + i, times=[1.0]).values[-1]
         for i in range(n)]
    assert ks_two_sample(a, b).p_value > 1e-3
