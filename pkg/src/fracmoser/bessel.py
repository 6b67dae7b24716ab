"""Bessel potential G_sigma, the kernel of (I - Delta)^{-sigma/2}."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .quadrature import integrate_batch
from .specfun import _check_dim, gamma_fn, sphere_measure

_LOG_RANGE = 745.0


def bessel_potential(n, sigma, r, tol=1e-12):
    """G_sigma(x) at |x| = r.

    G_sigma(x) = (4 pi)^{-sigma/2} / Gamma(sigma/2)
                 * int_0^inf exp(-pi |x|^2 / t - t / (4 pi)) t^{(sigma - n)/2} dt / t,

    integrated in u = log t. Its Fourier transform (with the 2 pi in the
    exponent) is (1 + 4 pi^2 |xi|^2)^{-sigma/2}, so it integrates to one.
    """
    n = _check_dim(n)
    if sigma <= 0:
        raise DomainError(f"Bessel potential needs sigma > 0, got {sigma}")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    a = 0.5 * (sigma - n)
    pref = (4 * math.pi) ** (-sigma / 2) / gamma_fn(sigma / 2)
    out = np.empty_like(r)
    zero = r == 0
    if zero.any():
        out[zero] = pref * gamma_fn(a) * (4 * math.pi) ** a if a > 0 else math.inf
    rp = r[~zero]
    if rp.size == 0:
        return out
    c = math.pi * rp * rp
    # exponent phi(u) = -c e^{-u} - e^u / (4 pi) + a u is concave; bisect on
    # phi'(u) = c e^{-u} - e^u / (4 pi) + a to find its peak
    logc = np.log(c)
    ulo = np.minimum(logc, 0.0) - 60.0 - abs(a)
    uhi = np.full_like(c, 60.0 + abs(a))
    for _ in range(90):
        u = 0.5 * (ulo + uhi)
        d1 = np.exp(np.minimum(logc - u, 700.0)) - np.exp(np.minimum(u, 700.0)) / (4 * math.pi) + a
        ulo = np.where(d1 > 0, u, ulo)
        uhi = np.where(d1 > 0, uhi, u)
    u = 0.5 * (ulo + uhi)
    peak = -c * np.exp(-u) - np.exp(u) / (4 * math.pi) + a * u
    lo = np.log(c / (_LOG_RANGE + abs(a) * 50 + 50.0)) - 1.0
    hi = np.full_like(u, math.log(4 * math.pi * (_LOG_RANGE + 50.0)))
    hi = np.maximum(hi, u + 5.0)
    lo = np.minimum(lo, u - 5.0)
    m = rp.size
    panels = 24
    t = np.linspace(0.0, 1.0, panels + 1)
    edges = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    own = np.repeat(np.arange(m), panels)

    def f(x, o):
        cc = c[o][:, None]
        return np.exp(-cc * np.exp(-x) - np.exp(x) / (4 * math.pi) + a * x - peak[o][:, None])

    val, _ = integrate_batch(f, edges[:, :-1].ravel(), edges[:, 1:].ravel(), rtol=tol,
                             owner=own, n_owner=m)
    out[~zero] = pref * val * np.exp(peak)
    return out


def bessel_potential_mass(n, sigma, tol=1e-12, r_max=80.0):
    """|S^{n-1}| int_0^inf G_sigma(r) r^{n-1} dr (should equal one)."""
    n = _check_dim(n)
    edges = np.unique(np.concatenate([[0.0], np.geomspace(1e-16, 1.0, 33),
                                      np.arange(1.0, r_max + 1e-9, 1.0)]))

    def f(x, o):
        shape = x.shape
        vals = bessel_potential(n, sigma, x.ravel(), tol=tol * 1e-2).reshape(shape)
        return vals * x ** (n - 1)

    val, err = integrate_batch(f, edges[:-1], edges[1:], rtol=tol,
                               owner=np.zeros(edges.size - 1, dtype=np.intp), n_owner=1)
    S = sphere_measure(n) if n > 1 else 2.0
    return float(S * val[0])
