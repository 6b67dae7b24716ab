import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmoser.errors import DomainError
from fracmoser.specfun import ball_volume, binom_real, gamma_fn, pochhammer, rgamma, sphere_measure


@pytest.mark.parametrize("x, want", [(1.0, 1.0), (5.0, 24.0), (0.5, math.sqrt(math.pi)), (1.5, math.sqrt(math.pi) / 2)])
def test_gamma_values(x, want):
    assert gamma_fn(x) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("x", [-3.0, -1.0, 0.0])
def test_gamma_poles(x):
    with pytest.raises(DomainError):
        gamma_fn(x)
    assert rgamma(x) == 0.0


def test_gamma_against_stdlib():
    xs = np.concatenate([np.linspace(0.01, 20, 397), np.linspace(20.1, 170, 300), -np.linspace(0.05, 7.95, 80)])
    xs = xs[np.abs(xs - np.round(xs)) > 1e-3]
    rel = [abs(gamma_fn(x) / math.gamma(x) - 1) for x in xs]
    assert max(rel) < 1e-13


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-2, max_value=math.log10(80)))
def test_recurrence(lx):
    x = 10.0**lx
    assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.25, max_value=20))
def test_duplication(x):
    lhs = gamma_fn(x) * gamma_fn(x + 0.5)
    rhs = 2.0 ** (1 - 2 * x) * math.sqrt(math.pi) * gamma_fn(2 * x)
    assert lhs == pytest.approx(rhs, rel=1e-11)


@pytest.mark.parametrize("n, S, V", [(1, 2.0, 2.0), (2, 2 * math.pi, math.pi), (3, 4 * math.pi, 4 * math.pi / 3)])
def test_sphere_and_ball(n, S, V):
    assert sphere_measure(n) == pytest.approx(S, rel=1e-15)
    assert ball_volume(n) == pytest.approx(V, rel=1e-15)


@pytest.mark.parametrize("n", range(1, 17))
def test_ball_times_n_is_sphere(n):
    assert ball_volume(n) * n == pytest.approx(sphere_measure(n), rel=1e-15)


def test_bad_dimension():
    with pytest.raises(DomainError):
        sphere_measure(0)
    with pytest.raises(DomainError):
        ball_volume(2.5)


def test_binom_and_pochhammer():
    assert binom_real(1.5, 1) == pytest.approx(1.5)
    assert binom_real(0.5, 2) == pytest.approx(-0.125)
    assert binom_real(4, 2) == pytest.approx(6.0)
    assert pochhammer(1.0, 6)[-1] == pytest.approx(120.0)
    assert pochhammer(0.5, 3) == pytest.approx([1.0, 0.5, 0.75])
