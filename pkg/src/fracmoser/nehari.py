"""Nehari-manifold solver for (-Delta)^{n/2} u = lambda u exp(b u^2) on (0,1)^n, n = 1, 2.

The quadratic form ||(-Delta)^{n/4} u||^2 is discretized with piecewise-linear
elements that vanish outside the domain: in 2D this is the classical
five-point stiffness, in 1D the restricted half-Laplacian whose stiffness has
a closed form (see :func:`half_laplacian_entries`). The nonlinearity is
integrated with a quadrature given by an interpolation matrix P and weights
w; nodal lumping is P = I, w = h^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize, sparse
from scipy.sparse import linalg as splinalg

from .errors import DomainError, SaturationError, SolverError

EXP_CAP = 700.0


def half_laplacian_entries(m):
    """Stiffness a(i, i+m) of unit hat functions for (1/(2 pi)) int int (u(x)-u(y))^2/|x-y|^2.

    The form is scale invariant, so the entries do not depend on the mesh size:
    a(m) = (1/(2 pi)) sum_k w_k c_k^2 log|c_k| with (w, c) in
    {(6, m), (-4, m +- 1), (1, m +- 2)}.
    """
    m = np.abs(np.asarray(m, dtype=float))

    def c2logc(c):
        c = np.abs(c)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(c > 0, c * c * np.log(c), 0.0)

    s = (6.0 * c2logc(m) - 4.0 * (c2logc(m - 1) + c2logc(m + 1)) + c2logc(m - 2) + c2logc(m + 2))
    return s / (2.0 * math.pi)


@dataclass(eq=False)
class DiscreteSpace:
    dim: int
    h: float
    A: object
    M: object
    P: object
    weights: np.ndarray
    mass: str
    domain: str
    _solve: object = field(default=None, repr=False)

    @property
    def size(self):
        return self.A.shape[0]

    def solve_A(self, rhs):
        if self._solve is None:
            if sparse.issparse(self.A):
                lu = splinalg.splu(sparse.csc_matrix(self.A))
                self._solve = lu.solve
            else:
                cf = linalg.cho_factor(self.A)
                self._solve = lambda b: linalg.cho_solve(cf, b)
        return self._solve(rhs)

    def a_inner(self, u, v):
        return float(u @ (self.A @ v))

    def a_norm(self, u):
        return math.sqrt(max(self.a_inner(u, u), 0.0))

    def at_quad(self, u):
        return u if self.P is None else self.P @ u

    def from_quad(self, q):
        return q if self.P is None else self.P.T @ q

    def nodes(self):
        N = int(round(1.0 / self.h))
        x = np.arange(1, N) * self.h
        if self.dim == 1:
            return x
        X, Y = np.meshgrid(x, x, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)


@dataclass(frozen=True)
class ProblemParams:
    lam: float
    b: float

    def __post_init__(self):
        if self.lam <= 0 or self.b <= 0:
            raise DomainError("need lambda > 0 and b > 0")


def _mesh_count(h):
    N = 1.0 / h
    if abs(N - round(N)) > 1e-9 or round(N) < 2:
        raise DomainError(f"h must divide the unit interval, got {h}")
    return int(round(N))


def assemble_space(dim, h, mass="lumped") -> DiscreteSpace:
    """Stiffness and mass for the Dirichlet form of (-Delta)^{dim/2} on (0,1)^dim."""
    N = _mesh_count(h)
    if mass not in ("lumped", "consistent"):
        raise DomainError(f"mass must be 'lumped' or 'consistent', got {mass!r}")
    n = N - 1
    if dim == 1:
        A = linalg.toeplitz(half_laplacian_entries(np.arange(n)))
        if mass == "lumped":
            P, w = None, np.full(n, h)
        else:
            # two Gauss points per element
            g = 0.5 / math.sqrt(3.0)
            rows, cols, vals = [], [], []
            for e in range(N):
                for qi, xi in enumerate((0.5 - g, 0.5 + g)):
                    row = 2 * e + qi
                    for node, phi in ((e - 1, 1.0 - xi), (e, xi)):
                        if 0 <= node < n:
                            rows.append(row)
                            cols.append(node)
                            vals.append(phi)
            P = sparse.csr_matrix((vals, (rows, cols)), shape=(2 * N, n))
            w = np.full(2 * N, 0.5 * h)
    elif dim == 2:
        T = sparse.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1])
        I = sparse.identity(n)
        A = sparse.csr_matrix(sparse.kron(T, I) + sparse.kron(I, T))
        if mass == "lumped":
            P, w = None, np.full(n * n, h * h)
        else:
            P, w = _triangle_midpoints(N, h)
    else:
        raise DomainError(f"dim must be 1 or 2, got {dim}")
    M = _mass(P, w, A.shape[0], sparse.issparse(A))
    return DiscreteSpace(dim, h, A, M, P, w, mass, "(0,1)" if dim == 1 else "(0,1)^2")


def _mass(P, w, size, use_sparse):
    if P is None:
        M = sparse.diags(w) if use_sparse else np.diag(w)
    else:
        M = (P.T @ sparse.diags(w) @ P)
        M = sparse.csr_matrix(M) if use_sparse else M.toarray()
    return M


def _triangle_midpoints(N, h):
    """Edge-midpoint rule on the two triangles of every cell (exact for P1 mass)."""
    n = N - 1

    def idx(i, j):
        if 1 <= i <= n and 1 <= j <= n:
            return (i - 1) * n + (j - 1)
        return -1

    rows, cols, vals = [], [], []
    row = 0
    for i in range(N):
        for j in range(N):
            c00, c10, c01, c11 = idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)
            for tri in ((c00, c10, c11), (c00, c11, c01)):
                for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                    for node in (a, b):
                        if node >= 0:
                            rows.append(row)
                            cols.append(node)
                            vals.append(0.5)
                    row += 1
    P = sparse.csr_matrix((vals, (rows, cols)), shape=(row, n * n))
    w = np.full(row, h * h / 6.0)
    return P, w


def lambda1(space: DiscreteSpace, tol=1e-10, max_iter=10_000):
    """Smallest eigenvalue of A v = lambda M v by inverse power iteration, with its eigenvector."""
    v = np.ones(space.size)
    Mv = space.M @ v
    lam_old = math.inf
    for it in range(max_iter):
        v = space.solve_A(Mv)
        Mv = space.M @ v
        nrm = math.sqrt(float(v @ Mv))
        v /= nrm
        Mv /= nrm
        lam = float(v @ (space.A @ v))
        if abs(lam - lam_old) <= tol * lam:
            return lam, v
        lam_old = lam
    raise SolverError(f"inverse power iteration did not converge in {max_iter} steps")


def _exp_b(params, q, where="node"):
    x = params.b * q * q
    if np.any(x > EXP_CAP):
        i = int(np.argmax(x))
        raise SaturationError(f"exp(b u^2) exceeds e^{EXP_CAP:g} at {where} {i}", where=i)
    return np.exp(x)


def functional_J(space, params, u):
    q = space.at_quad(u)
    _exp_b(params, q)
    G = params.lam / (2 * params.b) * np.expm1(params.b * q * q)
    return 0.5 * space.a_inner(u, u) - float(space.weights @ G)


def functional_F(space, params, u):
    q = space.at_quad(u)
    return space.a_inner(u, u) - params.lam * float(space.weights @ (q * q * _exp_b(params, q)))


def functional_I(space, params, u):
    q = space.at_quad(u)
    e = _exp_b(params, q)
    b = params.b
    # (t^2 - 1/b) e^{b t^2} + 1/b written to stay accurate for small t
    inner = q * q * e - np.expm1(b * q * q) / b
    return 0.5 * params.lam * float(space.weights @ inner)


def nonlinearity(space, params, u):
    """Discrete load P^T (w * g(Pu)) with g(t) = lambda t e^{b t^2}."""
    q = space.at_quad(u)
    return space.from_quad(space.weights * params.lam * q * _exp_b(params, q))


def project_weights(wv2, v2, lam, b, rtol=1e-15):
    """Positive root t of 1 - lam sum(wv2 * exp(b t^2 v2)) (Nehari scaling of a unit vector)."""
    wv2 = np.asarray(wv2, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    vmax = float(v2.max())

    def phi(t):
        x = np.minimum(b * t * t * v2, EXP_CAP)
        return 1.0 - lam * float(wv2 @ np.exp(x))

    if phi(0.0) <= 0:
        raise SolverError("no Nehari scaling: lambda is not below the first eigenvalue along v")
    t_cap = math.sqrt(EXP_CAP / (b * vmax))
    hi = min(1.0, t_cap)
    while phi(hi) > 0:
        if hi >= t_cap:
            raise SolverError("Nehari bracket reached the overflow horizon")
        hi = min(2.0 * hi, t_cap)
    lo = 0.0 if hi <= 1.0 else hi / 2.0
    return optimize.brentq(phi, lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps), maxiter=500)


def nehari_project(space, params, v):
    """t_v > 0 with F(t_v v) = 0 for the A-normalized direction of v; returns (t_v, v_normalized)."""
    v = np.asarray(v, dtype=float)
    nv = space.a_norm(v)
    if nv == 0:
        raise DomainError("cannot project the zero vector")
    v = v / nv
    q = space.at_quad(v)
    t = project_weights(space.weights * q * q, q * q, params.lam, params.b)
    return t, v


def weak_residual(space, params, u):
    """||A u - P^T w g(P u)|| / ||P^T w g(P u)||; NaN flags the degenerate u = 0."""
    load = nonlinearity(space, params, u)
    denom = float(np.linalg.norm(load))
    if denom == 0:
        return math.nan
    return float(np.linalg.norm(space.A @ u - load)) / denom


@dataclass
class NehariResult:
    u: np.ndarray
    J_val: float
    F_val: float
    I_val: float
    t_history: list
    j_history: list
    f_history: list
    dj_residual: float
    weak_residual: float
    iterations: int
    converged: bool
    lambda1: float
    a_norm: float

    @property
    def energy_level(self):
        """J at the minimizer, the discrete counterpart of s^2/2."""
        return self.J_val

    def report(self):
        return {
            "J": self.J_val, "F": self.F_val, "I": self.I_val,
            "dj_residual": self.dj_residual, "weak_residual": self.weak_residual,
            "iterations": self.iterations, "converged": self.converged,
            "lambda1": self.lambda1, "a_norm": self.a_norm,
        }


def minimize_on_S(space, params, seed=None, max_iter=2000, tol=1e-8, lam1=None,
                  weak_tol=1e-7) -> NehariResult:
    """Minimize J on the Nehari set by preconditioned descent on the A-unit sphere.

    Each direction v is scaled to t_v v on S. The gradient of v -> J(t_v v)
    is t_v DJ(u) (the t-derivative drops out because DJ(u)u = F(u) = 0), and
    its A-Riesz representative t_v A^{-1} DJ(u) is used as search direction
    with Armijo backtracking; the iterate is renormalized after every step.
    """
    if lam1 is None:
        lam1, eig = lambda1(space)
    else:
        eig = None
    if params.lam >= lam1:
        raise DomainError(f"lambda = {params.lam:g} must be below lambda_1 = {lam1:g}")
    if seed is None:
        seed = eig if eig is not None else lambda1(space)[1]
    seed = np.asarray(seed, dtype=float)
    if not np.any(seed):
        raise DomainError("seed must be nonzero")
    if np.sum(seed) < 0:
        seed = -seed

    t, v = nehari_project(space, params, seed)
    u = t * v
    J = functional_J(space, params, u)
    t_hist, j_hist = [t], [J]
    # relative Nehari defect |F(u)| / ||u||_A^2 of every accepted iterate
    f_hist = [abs(functional_F(space, params, u)) / (t * t)]
    eta = 1.0
    converged = False
    res = math.inf
    weak = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        r = space.A @ u - nonlinearity(space, params, u)
        z = space.solve_A(r)
        res = math.sqrt(max(float(r @ z), 0.0)) / space.a_norm(u)
        weak = weak_residual(space, params, u)
        if res <= tol and weak <= weak_tol:
            converged = True
            break
        grad = t * z
        gnorm2 = t * t * float(r @ z)
        accepted = False
        for _ in range(60):
            try:
                t_new, v_new = nehari_project(space, params, v - eta * grad)
                u_new = t_new * v_new
                J_new = functional_J(space, params, u_new)
            except (SaturationError, SolverError):
                eta *= 0.5
                continue
            if J_new <= J - 1e-4 * eta * gnorm2:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            # no further decrease is resolvable in double precision
            break
        v, t, u, J = v_new, t_new, u_new, J_new
        t_hist.append(t)
        j_hist.append(J)
        f_hist.append(abs(functional_F(space, params, u)) / (t * t))
        eta = min(eta * 2.0, 4.0)
    F = functional_F(space, params, u)
    I = functional_I(space, params, u)
    return NehariResult(u, J, F, I, t_hist, j_hist, f_hist, res, weak, it, converged, lam1, space.a_norm(u))
