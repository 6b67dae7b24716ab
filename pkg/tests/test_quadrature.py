import math

import numpy as np
import pytest

from fracmoser.errors import QuadratureError
from fracmoser.quadrature import gauss_legendre, gl_panels, integrate, integrate_batch


def test_polynomial_exact():
    val, _ = integrate(lambda x: x**5 - 2 * x**2, 0.0, 2.0)
    assert val == pytest.approx(64 / 6 - 16 / 3, rel=1e-14)


def test_endpoint_singularities():
    assert integrate(lambda x: x**-0.5, 0.0, 1.0, rtol=1e-12)[0] == pytest.approx(2.0, rel=1e-10)
    assert integrate(lambda x: np.log(x), 0.0, 1.0, rtol=1e-12)[0] == pytest.approx(-1.0, rel=1e-10)
    assert integrate(lambda x: np.log(x) ** 2 * x, 0.0, 1.0, rtol=1e-12)[0] == pytest.approx(0.25, rel=1e-10)


def test_breakpoints():
    val, _ = integrate(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3])
    assert val == pytest.approx(0.045 + 0.245, rel=1e-14)


def test_batched_owners():
    a = np.array([0.0, 1.0, 0.0])
    b = np.array([1.0, 2.0, math.pi])
    owner = np.array([0, 0, 1])
    tot, err = integrate_batch(lambda x, o: np.where(o[:, None] == 0, x, np.sin(x)), a, b, owner=owner, n_owner=2)
    assert tot == pytest.approx([2.0, 2.0], rel=1e-13)


def test_nonfinite_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_gauss_legendre():
    x, w = gauss_legendre(20)
    assert w.sum() == pytest.approx(2.0)
    assert np.dot(w, x**38) == pytest.approx(2 / 39)
    nodes, weights = gl_panels(np.array([0.0, 1.0, 3.0]))
    assert np.dot(weights, nodes**2) == pytest.approx(9.0)
