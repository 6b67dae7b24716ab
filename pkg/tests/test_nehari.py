import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import linalg

from fracmoser.constants import alpha_np, poincare_lower_bound
from fracmoser.errors import DomainError, SaturationError
from fracmoser.nehari import (ProblemParams, assemble_space, functional_F, functional_I, functional_J,
                              half_laplacian_entries, lambda1, minimize_on_S, nehari_project,
                              project_weights, weak_residual)


@pytest.fixture(scope="module")
def space2():
    return assemble_space(2, 1 / 32)


@pytest.fixture(scope="module")
def space1():
    return assemble_space(1, 1 / 128)


def fourier_entry(m):
    # (1/pi) int_0^inf |xi| |hat phi(xi)|^2 cos(m xi) dxi with hat phi = (sin(xi/2)/(xi/2))^2
    f = lambda xi: 16 * math.sin(xi / 2) ** 4 / xi**3 * math.cos(m * xi) / math.pi
    total = 0.0
    for a in range(0, 4000):
        total += sp_integrate.quad(f, a * math.pi, (a + 1) * math.pi, limit=200)[0]
    return total


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_half_laplacian_entries_against_fourier(m):
    assert half_laplacian_entries(np.array([m]))[0] == pytest.approx(fourier_entry(m), abs=2e-7)


def test_half_laplacian_closed_values():
    assert half_laplacian_entries(np.array([0]))[0] == pytest.approx(4 * math.log(2) / math.pi, rel=1e-14)


def test_five_point_stencil():
    sp = assemble_space(2, 1 / 4)
    A = sp.A.toarray()
    T = 2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1)
    assert np.array_equal(A, np.kron(T, np.eye(3)) + np.kron(np.eye(3), T))
    assert np.allclose(sp.M.toarray(), np.eye(9) / 16)


def test_dense_1d_structure(space1):
    A = space1.A
    off = A - np.diag(np.diag(A))
    assert np.all(off <= 0)
    assert np.all(A.sum(axis=1) > 0)
    assert np.allclose(A, A.T)
    assert np.linalg.eigvalsh(A).min() > 0


def test_spd_2d(space2):
    A = space2.A
    assert abs(A - A.T).max() == 0
    assert linalg.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, 0])[0] > 0


def _textbook_p1_mass(N):
    """Element-by-element P1 mass on the two triangles of each cell (interior nodes only)."""
    h = 1.0 / N
    n = N - 1
    local = h * h / 2 / 12 * (np.ones((3, 3)) + np.eye(3))
    M = np.zeros((n * n, n * n))
    idx = lambda i, j: (i - 1) * n + (j - 1) if 1 <= i <= n and 1 <= j <= n else -1
    for i in range(N):
        for j in range(N):
            for tri in (((i, j), (i + 1, j), (i + 1, j + 1)), ((i, j), (i + 1, j + 1), (i, j + 1))):
                ids = [idx(*v) for v in tri]
                for a in range(3):
                    for b in range(3):
                        if ids[a] >= 0 and ids[b] >= 0:
                            M[ids[a], ids[b]] += local[a, b]
    return M


def test_consistent_mass():
    sp = assemble_space(1, 1 / 8, mass="consistent")
    h = 1 / 8
    want = h / 6 * (4 * np.eye(7) + np.eye(7, k=1) + np.eye(7, k=-1))
    assert np.allclose(sp.M, want, atol=1e-15)
    sp2 = assemble_space(2, 1 / 4, mass="consistent")
    assert np.allclose(sp2.M.toarray(), _textbook_p1_mass(4), atol=1e-15)


def test_lambda1_2d():
    sp = assemble_space(2, 1 / 64)
    lam, v = lambda1(sp)
    h = 1 / 64
    assert lam == pytest.approx(8 / h**2 * math.sin(math.pi * h / 2) ** 2, rel=1e-9)
    assert abs(lam / (2 * math.pi**2) - 1) < 0.01


def test_lambda1_1d_against_dense_eigensolver(space1):
    lam, _ = lambda1(space1)
    ref = linalg.eigh(space1.A, space1.M, eigvals_only=True, subset_by_index=[0, 0])[0]
    assert lam == pytest.approx(ref, rel=1e-9)
    assert lam >= poincare_lower_bound(1, 0.5, 1.0)


def test_lambda1_1d_mesh_cauchy():
    a, _ = lambda1(assemble_space(1, 1 / 64))
    b, _ = lambda1(assemble_space(1, 1 / 128))
    assert abs(a / b - 1) < 0.05


def test_functionals(space2):
    params = ProblemParams(5.0, 1.0)
    zero = np.zeros(space2.size)
    assert functional_J(space2, params, zero) == 0 and functional_F(space2, params, zero) == 0
    assert functional_I(space2, params, zero) == 0
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = rng.normal(size=space2.size)
        J, F, I = (f(space2, params, u) for f in (functional_J, functional_F, functional_I))
        assert J - F / 2 == pytest.approx(I, rel=1e-12, abs=1e-12)
        assert I > 0


def test_saturation_names_node(space2):
    u = np.zeros(space2.size)
    u[17] = 30.0
    with pytest.raises(SaturationError) as err:
        functional_J(space2, ProblemParams(1.0, 1.0), u)
    assert err.value.where == 17


def test_scalar_surrogate():
    assert project_weights([1.0], [1.0], 0.5, 1.0) == pytest.approx(math.sqrt(math.log(2)), abs=1e-10)


def test_projection_properties(space2):
    lam1, eig = lambda1(space2)
    rng = np.random.default_rng(1)
    v = eig + 0.1 * rng.normal(size=space2.size)
    ts = []
    for frac in (0.1, 0.3, 0.5, 0.8):
        params = ProblemParams(frac * lam1, 1.0)
        t, vn = nehari_project(space2, params, v)
        u = t * vn
        assert abs(functional_F(space2, params, u)) <= 1e-10 * space2.a_norm(u) ** 2
        ts.append(t)
    assert all(a > b for a, b in zip(ts, ts[1:]))
    # small-t sign of F_v(t) / t^2
    params = ProblemParams(0.5 * lam1, 1.0)
    vn = v / space2.a_norm(v)
    ratio = functional_F(space2, params, 1e-4 * vn) / 1e-8
    q = space2.at_quad(vn)
    assert ratio == pytest.approx(1 - params.lam * float(space2.weights @ q**2), rel=1e-6)
    assert ratio > 0


def test_solve_2d(space2):
    lam1, eig = lambda1(space2)
    res = minimize_on_S(space2, ProblemParams(0.5 * lam1, 1.0), seed=eig, lam1=lam1)
    assert res.converged and res.weak_residual <= 1e-6
    assert abs(res.F_val) <= 1e-8 * res.a_norm**2
    assert res.J_val == pytest.approx(res.I_val, rel=1e-10)
    assert 0 < res.J_val < alpha_np(2, 2) / 2
    assert all(b <= a for a, b in zip(res.j_history, res.j_history[1:]))
    near = minimize_on_S(space2, ProblemParams(0.95 * lam1, 1.0), seed=eig, lam1=lam1)
    assert near.converged and near.a_norm < res.a_norm


def test_mesh_stability_2d():
    levels = []
    for h in (1 / 16, 1 / 32):
        sp = assemble_space(2, h)
        lam1, eig = lambda1(sp)
        levels.append(minimize_on_S(sp, ProblemParams(0.5 * lam1, 1.0), seed=eig, lam1=lam1).J_val)
    assert abs(levels[0] / levels[1] - 1) <= 0.05


def test_solve_1d_consistent_mass():
    sp = assemble_space(1, 1 / 64, mass="consistent")
    lam1, eig = lambda1(sp)
    res = minimize_on_S(sp, ProblemParams(0.5 * lam1, 1.0), seed=eig, lam1=lam1)
    assert res.converged and res.weak_residual <= 1e-6 and res.J_val < math.pi / 2


def test_weak_residual_cases(space2):
    params = ProblemParams(1.0, 1.0)
    assert math.isnan(weak_residual(space2, params, np.zeros(space2.size)))
    u = np.random.default_rng(2).normal(size=space2.size)
    assert weak_residual(space2, params, u) > 0.1


def test_bad_inputs(space2):
    with pytest.raises(DomainError):
        ProblemParams(-1.0, 1.0)
    with pytest.raises(DomainError):
        assemble_space(3, 0.25)
    with pytest.raises(DomainError):
        assemble_space(1, 0.3)
    lam1, _ = lambda1(space2)
    with pytest.raises(DomainError):
        minimize_on_S(space2, ProblemParams(1.2 * lam1, 1.0), lam1=lam1)
