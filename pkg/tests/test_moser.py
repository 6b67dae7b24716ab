import math

import numpy as np
import pytest

from fracmoser.constants import alpha_np, kappa_np
from fracmoser.errors import DomainError
from fracmoser.jets import eta_cut, phi_cut
from fracmoser.moser import MoserParams, decompose, log_part, plateau_value, u_eps, v_eps
from fracmoser.profiles import continuity_gaps, lp_norm_p


def test_plateau_value_22():
    assert plateau_value(MoserParams.from_k(2, 2, 4)) == pytest.approx(2 / math.sqrt(2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("n, p, k", [(1, 2, 3), (2, 2, 4), (3, 1.5, 6), (2, 3, 8), (4, 2, 5)])
def test_plateau_identity(n, p, k):
    params = MoserParams.from_k(n, p, k)
    u0 = u_eps(params)(np.array([0.0, 0.5 * params.eps, params.eps]))
    q = p / (p - 1)
    assert np.allclose(alpha_np(n, p) * u0**q, n * k, rtol=1e-10)


def test_regimes():
    params = MoserParams.from_k(2, 2, 5)
    v = v_eps(params)
    L = params.L
    r = np.linspace(2 * params.eps, 0.5, 50)
    assert np.allclose(v(r), L ** (-0.5) * np.log(1 / r), rtol=1e-13)
    assert v(np.array([0.0]))[0] == pytest.approx(L**0.5)
    assert np.all(v(np.array([1.0, 1.5, 10.0])) == 0)
    assert np.all(u_eps(params)(np.array([1.0, 2.0])) == 0)
    assert u_eps(params)(np.array([0.0]))[0] == pytest.approx(kappa_np(2, 2) * L**0.5)


def test_monotone_on_eps_to_one():
    params = MoserParams.from_k(2, 2, 4)
    r = np.linspace(params.eps, 1.0, 2000)
    assert np.all(np.diff(v_eps(params)(r)) <= 1e-15)


def test_cutoff_partition():
    eps = math.exp(-3)
    r = np.linspace(0, 0.5, 1000)
    psi = 1 - phi_cut(r / eps)
    assert np.max(np.abs(psi + phi_cut(r / eps) - 1)) == 0
    # for |x| >= 1/2 the outer cutoff is what remains
    r2 = np.linspace(0.5, 2, 1000)
    assert np.all(phi_cut(r2 / eps) == 0)
    assert np.allclose(eta_cut(np.array([0.5, 0.75, 0.875, 1.0])), [1.0, 1.0, 0.5, 0.0])


def test_decomposition():
    params = MoserParams.from_k(2, 2, 4)
    f, g, R = decompose(params)
    r = np.linspace(1e-3 * params.eps, 1.2, 50)
    assert np.max(np.abs(R(r) + log_part(params)(r) - v_eps(params)(r))) <= 1e-12
    assert np.all(f(np.linspace(2 * params.eps, 2, 40)) == 0)
    assert np.all(g(np.linspace(1e-6, 0.5, 40)) == 0)


def test_smoothness_across_breakpoints():
    params = MoserParams.from_k(2, 2, 4)
    gaps = continuity_gaps(u_eps(params), 2)
    assert np.max(np.abs(gaps)) < 1e-9


def test_lp_norm_scales_like_inverse_log():
    vals = [lp_norm_p(u_eps(MoserParams.from_k(2, 2, k)), 2) * k for k in range(2, 9)]
    assert max(vals) < 2 * min(vals)


def test_params_validation():
    with pytest.raises(DomainError):
        MoserParams(2, 2, 0.2)
    with pytest.raises(DomainError):
        MoserParams(2, 1.0, 0.01)
    assert MoserParams.from_k(2, 2, 3).sigma == 0.5
