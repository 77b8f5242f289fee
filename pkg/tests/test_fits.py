import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fene2d.analysis.fits import decay_fit, exp_fit


def test_power_law_exact():
    t = np.linspace(0, 100, 201)
    fit = decay_fit(t, (1 + t) ** -0.5, (5, 100))
    assert fit.slope == pytest.approx(-0.5, abs=1e-10) and fit.r2 == pytest.approx(1.0)
    fit = decay_fit(t, 3 * (1 + t) ** -1.0, (0, 100))
    assert fit.slope == pytest.approx(-1.0, abs=1e-10)
    assert fit.intercept == pytest.approx(math.log(3), abs=1e-10)


def test_exponential_mismatch_is_visible():
    t = np.linspace(0, 10, 201)
    v = np.exp(-0.7 * t)
    a = decay_fit(t, v, (1, 4)).slope
    b = decay_fit(t, v, (5, 10)).slope
    assert abs(a - b) > 0.5
    assert abs(decay_fit(t, v, (0, 10)).curvature) > 0.1


@given(st.floats(0.01, 50.0))
@settings(max_examples=30, deadline=None)
def test_exp_fit_recovers_rate(rate):
    t = np.linspace(0, 1, 51)
    fit = exp_fit(t, np.exp(-rate * t), (0, 1))
    assert fit.rate == pytest.approx(rate, rel=1e-9)


def test_bad_windows():
    t = np.linspace(0, 1, 11)
    with pytest.raises(ValueError):
        decay_fit(t, np.ones(11), (0.5, 0.5))
    with pytest.raises(ValueError):
        decay_fit(t, np.ones(11), (0.0, 0.1))
    with pytest.raises(ValueError):
        exp_fit(t, np.zeros(11), (0, 1))
