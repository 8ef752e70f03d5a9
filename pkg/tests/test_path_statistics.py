import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pssmp.closed_forms import BesselLIL
from pssmp.lamperti import PssmpPath, build_pssmp_path
from pssmp.levy_models import BrownianWithDrift, CompoundPoissonExp, DeterministicDrift, StandardPoisson
from pssmp.path_statistics import (HorizonTooShortError, SmallStartBiasWarning, envelope_ratios,
                                   first_passage, future_infimum, last_passage, last_passages)


def _drift_path(ds=1e-3):
    return build_pssmp_path(DeterministicDrift(), 1.0, 1.0, 10.0, ds, 0)


def _path(times, values, x0=None):
    values = np.asarray(values, dtype=np.float64)
    return PssmpPath(np.asarray(times, dtype=np.float64), values,
                     values[0] if x0 is None else x0, 1.0)


def test_future_infimum_by_hand():
    j = future_infimum(_path([0, 1, 2, 3], [3, 1, 2, 5]), 2.5)
    assert j.values.tolist() == [1, 1, 2, 5]
    assert j.valid.tolist() == [True, True, True, False]


def test_future_infimum_of_increasing_path_is_identity():
    p = build_pssmp_path(CompoundPoissonExp(3.0, 2.0), 1.0, 1.0, 50.0, 1e-3, 2)
    assert np.array_equal(future_infimum(p, p.values[-1] / 2).values, p.values)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_future_infimum_nondecreasing(seed):
    p = build_pssmp_path(BrownianWithDrift(1.0), 1.0, 1.0, 2.0, 1e-3, seed, until_level=20.0)
    j = future_infimum(p, 2.0)
    assert np.all(np.diff(j.values) >= 0)
    assert np.all(j.values <= p.values)


def test_future_infimum_needs_guard():
    with pytest.raises(HorizonTooShortError):
        future_infimum(_path([0, 1], [3, 1]), 2.0)


@pytest.mark.filterwarnings("ignore::pssmp.path_statistics.SmallStartBiasWarning")
def test_last_and_first_passage_on_drift_path():
    p = _drift_path()
    assert abs(last_passage(p, 3.0) - 2.0) < 1e-2
    assert abs(first_passage(p, 2.0) - 1.0) < 1e-2


def test_last_passage_requires_endpoint_above_level():
    with pytest.raises(HorizonTooShortError):
        last_passage(_drift_path(), 1e3)


def test_last_passage_never_below_warns():
    p = _path([0, 1, 2], [20.0, 30.0, 40.0], x0=1.0)
    with pytest.warns(SmallStartBiasWarning, match="never goes below"):
        assert last_passage(p, 15.0) == 0.0


def test_small_start_warning():
    p = _path([0, 1, 2], [1.0, 0.5, 40.0])
    with pytest.warns(SmallStartBiasWarning, match="small-start"):
        last_passage(p, 5.0)


def test_last_passages_match_scalar():
    p = build_pssmp_path(BrownianWithDrift(1.0), 1.0, 1.0, 1.0, 1e-3, 3, until_level=200.0)
    levels = [10.0, 30.0, 100.0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scalar = [last_passage(p, x) for x in levels]
    assert np.array_equal(last_passages(p, levels), scalar)


@pytest.mark.filterwarnings("ignore::pssmp.path_statistics.SmallStartBiasWarning")
def test_increasing_path_first_equals_last_passage():
    p = build_pssmp_path(StandardPoisson(), 1.0, 1.0, 100.0, 1e-3, 4)
    for y in (3.0, math.exp(2.5)):
        s, u = first_passage(p, y), last_passage(p, y)
        # on a step path the two differ by exactly one jump
        k = np.searchsorted(p.times, u)
        assert p.times[k + 1] == s


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), y=st.floats(2.0, 15.0))
def test_first_passage_before_last_passage(seed, y):
    p = build_pssmp_path(BrownianWithDrift(1.0), 0.1, 1.0, 1.0, 1e-3, seed, until_level=50.0)
    ds_real = np.max(np.diff(p.times))
    assert first_passage(p, y) <= last_passage(p, y) + ds_real


def test_poisson_first_passage_median_positive():
    s = [first_passage(build_pssmp_path(StandardPoisson(), 1.0, 1.0, 0.0, 1e-3, 5, stream=i,
                                        until_level=2.0), 2.0) for i in range(200)]
    assert 0 < np.median(s) < np.inf


def test_envelope_ratios():
    grid = np.array([10.0, 100.0, 1e3])
    values = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(envelope_ratios(values, lambda t: 1.0, grid).ratios, values)
    self_ratio = envelope_ratios(2 * grid * np.log(np.log(grid)), BesselLIL(), grid)
    assert np.allclose(self_ratio.ratios, 1.0, rtol=1e-14)
    assert self_ratio.test_function_id == "bessel_lil"


def test_envelope_csv(tmp_path):
    s = envelope_ratios(np.array([1.0, 1.0]), BesselLIL(), np.array([20.0, 30.0]))
    s.to_csv(tmp_path / "e.csv")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "t,ratio,test_function_id" and lines[1].endswith(",bessel_lil")
