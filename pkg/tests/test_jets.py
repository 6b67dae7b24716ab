import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmoser.jets import Jet, eta_cut, phi_cut, smooth_bump


def test_arithmetic_derivatives():
    x = Jet.variable(np.array([0.7]), 3)
    f = (x * x + 1.0).exp() / x
    d = f.derivatives()
    t = 0.7
    e = np.exp(t * t + 1)
    assert d[0][0] == pytest.approx(e / t, rel=1e-14)
    assert d[1][0] == pytest.approx(e * (2 - 1 / t**2), rel=1e-13)
    assert d[2][0] == pytest.approx(e * (4 * t - 2 / t + 2 / t**3), rel=1e-13)


def test_integer_power_at_zero():
    x = Jet.variable(np.array([0.0]), 2)
    d = (x**2).derivatives()
    assert [v[0] for v in d] == [0.0, 0.0, 2.0]


def test_log_derivative():
    x = Jet.variable(np.array([2.0]), 2)
    d = x.log().derivatives()
    assert d[1][0] == pytest.approx(0.5) and d[2][0] == pytest.approx(-0.25)


def test_cutoff_values():
    assert phi_cut(np.array([0.5]))[0] == 1.0
    assert phi_cut(np.array([1.5]))[0] == pytest.approx(0.5)
    assert phi_cut(np.array([2.5]))[0] == 0.0
    assert eta_cut(np.array([2.0]))[0] == 0.0
    assert eta_cut(np.array([0.875]))[0] == pytest.approx(0.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-3, max_value=3))
def test_cutoffs_in_unit_interval(t):
    for f in (phi_cut, eta_cut):
        v = f(np.array([t]))[0]
        assert 0.0 <= v <= 1.0


def test_flat_transitions():
    h = 1e-3
    for t0 in (1.0, 2.0):
        t = np.array([t0 - h, t0, t0 + h])
        v = phi_cut(t)
        assert abs(v[2] - v[0]) / (2 * h) < 1e-6
        assert abs(v[2] - 2 * v[1] + v[0]) / h**2 < 1e-6


def test_bump_jet_against_finite_differences():
    x0 = 0.37
    j = smooth_bump(Jet.variable(np.array([x0]), 2))
    h = 1e-5
    f = lambda x: smooth_bump(np.array([x]))[0]
    assert j.derivatives()[1][0] == pytest.approx((f(x0 + h) - f(x0 - h)) / (2 * h), rel=1e-7)
