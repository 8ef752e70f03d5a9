import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from pssmp.special import regularized_lower, regularized_upper, upper_tail_ratio


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0, 5.5, 40.0])
def test_against_scipy(a):
    x = np.geomspace(1e-4, 200, 300)
    assert np.allclose(regularized_lower(a, x), sp.gammainc(a, x), rtol=1e-10, atol=1e-300)
    assert np.allclose(regularized_upper(a, x), sp.gammaincc(a, x), rtol=1e-9, atol=1e-300)


def test_exponential_case():
    assert regularized_lower(1.0, 2.0) == pytest.approx(1 - np.exp(-2.0), rel=1e-13)
    assert regularized_lower(2.0, 0.0) == 0.0
    assert regularized_upper(2.0, np.inf) == 0.0


def test_bad_shape():
    with pytest.raises(ValueError):
        regularized_lower(0.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.1, 30.0), x=st.floats(1e-3, 80.0))
def test_complement(a, x):
    assert regularized_lower(a, x) + regularized_upper(a, x) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("a,x", [(1.5, 0.5), (3.0, 10.0), (5.0, 300.0)])
def test_upper_tail_ratio(a, x):
    expected = sp.gammaincc(a, x) * sp.gamma(a) / (np.exp(-x) * x ** (a - 1))
    if np.isfinite(expected) and expected > 0:
        assert upper_tail_ratio(a, x) == pytest.approx(expected, rel=1e-9)
    else:
        # beyond double range the ratio still tends to 1
        assert upper_tail_ratio(a, x) == pytest.approx(1.0, rel=0.02)
