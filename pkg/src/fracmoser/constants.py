"""Closed-form constants of the fractional Moser-Trudinger setting.

Note on ``alpha_np(n, p)`` versus the classical Moser constant: the two agree
when ``p = 2`` and ``n`` is even (the operator is then a power of the integer
Laplacian), but for ``p = n >= 3`` they do not, because
``||(-Delta)^{1/2} u||_{L^n}`` and ``||grad u||_{L^n}`` are different norms.
That mismatch is expected and is not a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import binom_real, ball_volume, gamma_fn, sphere_measure

# omega from the Iannizzotto-Squassina existence condition (n = 1, p = 2)
OMEGA_IS = math.pi


@dataclass(frozen=True)
class ExponentPair:
    """An exponent ``p`` in (1, inf) together with its conjugate."""

    p: float

    def __post_init__(self):
        if not (self.p > 1.0 and math.isfinite(self.p)):
            raise DomainError(f"exponent p must lie in (1, inf), got {self.p}")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)


def _pair(p) -> ExponentPair:
    return p if isinstance(p, ExponentPair) else ExponentPair(float(p))


@dataclass(frozen=True)
class OperatorSpec:
    """Fractional operator ``(tau I - Delta)^sigma``; ``tau = 0`` is the Riesz case.

    ``sigma = m + s`` with integer part ``m`` and fractional part ``s``.
    """

    sigma: float
    tau: float = 0.0
    rtol: float = 1e-9
    atol: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"operator order must be positive, got {self.sigma}")
        if self.tau < 0:
            raise DomainError(f"shift tau must be >= 0, got {self.tau}")

    @property
    def m(self) -> int:
        return int(math.floor(self.sigma))

    @property
    def s(self) -> float:
        return self.sigma - self.m

    @property
    def is_riesz(self) -> bool:
        return self.tau == 0.0


def alpha_np(n, p) -> float:
    """Sharp exponent alpha_{n,p} for ``||(-Delta)^{n/2p} u||_{L^p} <= 1``."""
    pp = _pair(p)
    q = pp.p_conj
    inner = gamma_fn(n / (2 * pp.p)) * 2.0 ** (n / pp.p) * math.pi ** (n / 2) / gamma_fn(n / (2 * q))
    return n / sphere_measure(n) * inner**q


def alpha_classical(k, n) -> float:
    """Adams' sharp constant alpha(k, n) for ``||nabla^k u||_{L^{n/k}} <= 1``."""
    if int(k) != k or not 0 < k < n:
        raise DomainError(f"need an integer 0 < k < n, got k={k}, n={n}")
    k = int(k)
    if k % 2:
        ratio = gamma_fn((k + 1) / 2) / gamma_fn((n - k + 1) / 2)
    else:
        ratio = gamma_fn(k / 2) / gamma_fn((n - k) / 2)
    base = math.pi ** (n / 2) * 2.0**k * ratio
    return n / sphere_measure(n) * base ** (n / (n - k))


def gamma_n(n) -> float:
    """gamma_n = (n-1)!/2 |S^n|, so that log(1/|x|)/gamma_n solves (-Delta)^{n/2} G = delta."""
    return math.factorial(int(n) - 1) * sphere_measure(int(n) + 1) / 2.0


def kappa_np(n, p) -> float:
    """Normalizer turning v_eps into u_eps (so that alpha_np * kappa^{p'} = n)."""
    pp = _pair(p)
    q = pp.p_conj
    return (
        sphere_measure(n) ** (-1.0 / pp.p)
        * 2.0 ** (n / q)
        * math.pi ** (n / 2)
        * gamma_fn(n / (2 * q))
        / (gamma_fn(n / (2 * pp.p)) * gamma_n(n))
    )


def log_kernel_constant(n, sigma) -> float:
    """c with (-Delta)^sigma log(1/|x|) = c |x|^{-2 sigma}, valid for 0 < sigma < n/2."""
    if not 0 < sigma < n / 2:
        raise DomainError(f"log kernel constant needs 0 < sigma < n/2, got sigma={sigma}, n={n}")
    return (
        gamma_n(n)
        * 2.0 ** (2 * sigma - n)
        * math.pi ** (-n / 2)
        * gamma_fn(sigma)
        / gamma_fn((n - 2 * sigma) / 2)
    )


def riesz_ft_constant(n, alpha) -> float:
    """Coefficient c in F(|x|^{alpha-n}) = c |xi|^{-alpha} (unitary Fourier transform)."""
    if not 0 < alpha < n:
        raise DomainError(f"Riesz transform constant needs 0 < alpha < n, got {alpha}")
    return 2.0 ** (alpha - n / 2) * gamma_fn(alpha / 2) / gamma_fn((n - alpha) / 2)


def poincare_lower_bound(n, s, omega_measure) -> float:
    """Lower bound delta^{2s}/2 on ||(-Delta)^{s/2} u||^2 / ||u||^2 over functions supported in Omega."""
    if s <= 0 or omega_measure <= 0:
        raise DomainError("need s > 0 and a positive domain measure")
    delta = ((2 * math.pi) ** n / (2.0 * omega_measure * ball_volume(n))) ** (1.0 / n)
    return delta ** (2 * s) / 2.0


def pv_normalizer(n, s) -> float:
    """C_{n,s} in (-Delta)^s u(x) = C_{n,s} PV int (u(x) - u(y)) |x-y|^{-n-2s} dy."""
    if not 0 < s < 1:
        raise DomainError(f"principal-value normalizer needs 0 < s < 1, got {s}")
    return 4.0**s * gamma_fn(n / 2 + s) / (math.pi ** (n / 2) * abs(gamma_fn(-s)))


def _check_taylor(s, tau, m):
    if s == math.floor(s):
        raise DomainError(f"taylor expansion needs a non-integer s, got {s}")
    if m is None:
        m = math.floor(s) + 1
    if m != math.floor(s) + 1:
        raise DomainError(f"m must be the smallest integer > s (s={s}, m={m})")
    if tau <= 0:
        raise DomainError("tau must be positive")
    return int(m)


def taylor_coeffs(s, tau, m=None) -> list[float]:
    """Coefficients c_j of (tau + t^2)^s = sum_{j<m} c_j t^{2s-2j} + E(t)."""
    m = _check_taylor(s, tau, m)
    return [binom_real(s, j) * tau**j for j in range(m)]


def taylor_remainder(t, s, tau, m=None):
    """Remainder E(t) of the expansion above, evaluated without cancellation for large t."""
    m = _check_taylor(s, tau, m)
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    far = t * t > 2.0 * tau
    # series tail: terms shrink at least geometrically with ratio 1/2
    tf = t[far]
    acc = np.zeros_like(tf)
    term_coef = binom_real(s, m) * tau**m
    j = m
    while True:
        term = term_coef * tf ** (2 * s - 2 * j)
        acc += term
        if term_coef == 0 or np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
            break
        term_coef *= (s - j) / (j + 1) * tau
        j += 1
        if j > m + 200:
            break
    out[far] = acc
    tn = t[~far]
    direct = (tau + tn * tn) ** s
    for j, c in enumerate(taylor_coeffs(s, tau, m)):
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = direct - c * np.where(tn > 0, tn ** (2 * s - 2 * j), 0.0 if 2 * s - 2 * j > 0 else np.inf)
    out[~far] = direct
    return out


def constants_table(n, p, sigma=None, tau=None) -> dict:
    """All constants for one (n, p[, sigma, tau]) as a JSON-ready mapping."""
    pp = _pair(p)
    table = {
        "n": int(n),
        "p": pp.p,
        "p_conj": pp.p_conj,
        "sphere_measure": sphere_measure(n),
        "ball_volume": ball_volume(n),
        "alpha_np": alpha_np(n, pp),
        "kappa_np": kappa_np(n, pp),
        "gamma_n": gamma_n(n),
        "operator_order": n / (2 * pp.p),
        "poincare_lower_bound_unit_domain": poincare_lower_bound(n, n / 2, 1.0),
    }
    if n >= 2:
        table["alpha_moser"] = alpha_classical(1, n)
    if n % 2 == 0 and n >= 2:
        table["alpha_adams_half"] = alpha_classical(n // 2, n)
    if sigma is not None:
        table["sigma"] = float(sigma)
        if 0 < sigma < n / 2:
            table["log_kernel_constant"] = log_kernel_constant(n, sigma)
            table["riesz_ft_constant"] = riesz_ft_constant(n, 2 * sigma)
        frac = sigma - math.floor(sigma)
        if 0 < frac < 1:
            table["pv_normalizer"] = pv_normalizer(n, frac)
            if tau is not None and tau > 0:
                table["tau"] = float(tau)
                table["taylor_coeffs"] = taylor_coeffs(sigma, tau)
    return table
