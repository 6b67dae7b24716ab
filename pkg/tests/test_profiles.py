import math

import numpy as np
import pytest

from fracmoser.errors import DivergenceError, DomainError
from fracmoser.profiles import (all_space, annulus, ball, complement, constant_profile, continuity_gaps,
                                linear_combination, log_profile, lp_norm, piecewise_polynomial,
                                power_profile)


def midpoint_oracle(f, a, b, n, dim, p, levels=(4000, 8000)):
    """Richardson-extrapolated midpoint rule for |S| int |f|^p r^{n-1} dr (independent of the library)."""
    S = 2.0 if dim == 1 else 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)
    vals = []
    for m in levels:
        h = (b - a) / m
        r = a + (np.arange(m) + 0.5) * h
        vals.append(h * np.sum(np.abs(f(r)) ** p * r ** (dim - 1)))
    return S * (4 * vals[1] - vals[0]) / 3


def test_constant_on_disk():
    g = constant_profile(2, 1.0, support=1.0)
    assert lp_norm(g, 2) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_log_on_disk():
    # |S^1| int_0^1 log^2(1/r) r dr = 2 pi / 4
    assert lp_norm(log_profile(2), 2, ball(1.0)) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)


def test_log_on_disk_against_substitution_oracle():
    # r = e^{-u}: int_0^inf u^2 e^{-2u} du by a plain trapezoid rule on [0, 40]
    u = np.linspace(0, 40, 400001)
    f = u**2 * np.exp(-2 * u)
    trap = (u[1] - u[0]) * (f.sum() - 0.5 * (f[0] + f[-1]))
    assert lp_norm(log_profile(2), 2, ball(1.0)) ** 2 == pytest.approx(2 * math.pi * trap, rel=1e-9)


def test_analytic_tail():
    # K r^{-3} on |x| > 2, n = 1, p = 1: 2 * K / (2 * 2^2)
    g = piecewise_polynomial(1, [2.0], [[1.0], [0.0]], tail=(5.0, 3.0))
    assert lp_norm(g, 1, complement(2.0)) == pytest.approx(2 * 5.0 / (2 * 4.0), rel=1e-10)


def test_divergent_tail():
    g = piecewise_polynomial(2, [1.0], [[1.0], [0.0]], tail=(1.0, 1.0))
    with pytest.raises(DivergenceError):
        lp_norm(g, 2)
    with pytest.raises(DivergenceError):
        lp_norm(log_profile(2), 2)


@pytest.mark.parametrize("seed", range(5))
def test_lp_norm_random_piecewise_polynomials(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
    bps = np.sort(rng.uniform(0.1, 2.0, size=3))
    coeffs = [rng.normal(size=int(rng.integers(1, 4))) for _ in range(3)] + [[0.0]]
    g = piecewise_polynomial(dim, list(bps), coeffs)
    edges = np.concatenate([[0.0], bps])
    want = sum(midpoint_oracle(g, a, b, None, dim, p) for a, b in zip(edges[:-1], edges[1:]))
    assert lp_norm(g, p) ** p == pytest.approx(want, rel=1e-8)


def test_regions():
    g = constant_profile(3, 2.0, support=3.0)
    V = lambda a: 4 * math.pi / 3 * a**3
    assert lp_norm(g, 1, annulus(1.0, 2.0)) == pytest.approx(2 * (V(2) - V(1)), rel=1e-12)
    assert lp_norm(g, 1, complement(2.0)) == pytest.approx(2 * (V(3) - V(2)), rel=1e-12)
    assert lp_norm(g, 1, all_space()) == pytest.approx(2 * V(3), rel=1e-12)
    with pytest.raises(DomainError):
        annulus(2.0, 1.0)


def test_laplacian_of_power():
    g = power_profile(3, 2.0)
    r = np.array([0.0, 0.5, 2.0])
    assert np.allclose(g.laplacian()(r), 6.0)
    lg = log_profile(3).laplacian()
    r = np.array([0.5, 1.0, 3.0])
    assert np.allclose(lg(r), -1 / r**2)


def test_scaling_and_combination():
    g = power_profile(2, 2.0)
    assert g.scaled(3.0)(np.array([0.5]))[0] == pytest.approx(2.25)
    h = linear_combination([g, constant_profile(2, 1.0)], [2.0, -1.0])
    assert h(np.array([2.0]))[0] == pytest.approx(7.0)


def test_continuity_gaps_detects_jumps():
    smooth = piecewise_polynomial(1, [1.0], [[0.0, 0.0, 1.0], [-1.0, 2.0]])  # r^2 meets 2r - 1 with C^1 contact
    assert np.max(np.abs(continuity_gaps(smooth, 1))) < 1e-14
    jump = piecewise_polynomial(1, [1.0], [[0.0], [1.0]])
    assert np.max(np.abs(continuity_gaps(jump, 0))) == pytest.approx(1.0)
