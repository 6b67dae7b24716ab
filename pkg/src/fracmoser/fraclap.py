"""Pointwise fractional Laplacian and Bessel operators of radial profiles.

For 0 < s < 1 and x = r e_1,

    (-Delta)^s g(x) = C_{n,s}/2 int (2 g(x) - g(x+y) - g(x-y)) |y|^{-n-2s} dy
                    = C_{n,s}/2 int_0^inf rho^{-1-2s} A(r, rho) d rho,

where A(r, rho) is the sphere integral of the symmetric second difference.
A is computed by adaptive quadrature in the polar angle with split points
wherever |x +- rho w| crosses a breakpoint of g; the rho integral is adaptive
as well, with the ball rho < h replaced by its fourth-order Taylor value and
the far field mapped to a finite interval. Orders in (1, 2) are handled by
composing with the radial Laplacian.

The Bessel operator (tau - Delta)^s uses the Levy kernel of the Bernstein
function (tau + l)^s - tau^s; its difference from the Riesz kernel is the
bounded-at-zero kernel :func:`levy_remainder_kernel`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .constants import OperatorSpec, pv_normalizer
from .errors import ContractError, DivergenceError, DomainError
from .profiles import RadialProfile
from .quadrature import integrate_batch
from .specfun import gamma_fn, sphere_measure

_CHUNK = 64


def _as_spec(spec, tau=0.0):
    if isinstance(spec, OperatorSpec):
        return spec
    return OperatorSpec(float(spec), float(tau))


def _gscale(g):
    """Rough magnitude of g, used for absolute tolerance floors."""
    pts = [b for b in g.breakpoints] + [g.last_breakpoint * 2.0]
    if not g.singular_at_origin:
        pts.append(0.0)
    vals = np.abs(g(np.asarray(pts)))
    return float(max(np.max(vals), 1e-300))


def _feature_points(g):
    pts = list(g.breakpoints)
    if g.support is not None:
        pts.append(g.support)
    return np.unique(np.asarray(pts, dtype=float))


def _local_scale(g, r):
    """Distance from r to the nearest feature (breakpoint, or origin if singular)."""
    feats = _feature_points(g)
    r = np.asarray(r, dtype=float)
    ell = np.full(r.shape, np.inf)
    if feats.size:
        d = np.abs(r[:, None] - feats[None, :])
        d = np.where(d > 1e-12 * np.maximum(r[:, None], 1e-300), d, np.inf)
        ell = d.min(axis=1)
    if g.singular_at_origin:
        ell = np.minimum(ell, r)
    # far from any feature the profile still varies on the scale of r
    cap = np.maximum(r, g.last_breakpoint)
    return np.minimum(ell, cap)


def sphere_second_difference(g, r, rho, rtol=1e-11, atol=None):
    """A(r, rho): integral over the unit sphere of 2g(r) - g(|x + rho w|) - g(|x - rho w|).

    ``r`` and ``rho`` are paired flat arrays.
    """
    n = g.dim
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    gr = g(r)
    if n == 1:
        return 2.0 * (2.0 * gr - g(r + rho) - g(np.abs(r - rho)))
    S = sphere_measure(n)
    out = np.empty_like(r)
    at0 = r == 0
    far = np.zeros_like(at0)
    if g.support is not None:
        far = rho >= r + g.support
    out[at0] = 2.0 * S * (gr[at0] - g(rho[at0]))
    out[far & ~at0] = 2.0 * S * gr[far & ~at0]
    work = ~(at0 | far)
    if not work.any():
        return out
    rw, pw, gw = r[work], rho[work], gr[work]
    m = rw.size
    four = 4.0 * rw * pw
    feats = _feature_points(g)
    cols = [np.zeros(m), np.full(m, 0.5 * math.pi)]
    for b in feats:
        # |x - rho w| = b and |x + rho w| = b, solved in the stable half-angle form
        for num in (b * b - (rw - pw) ** 2, (rw + pw) ** 2 - b * b):
            q = num / four
            ok = (q > 0) & (q < 0.5)
            cols.append(np.where(ok, 2.0 * np.arcsin(np.sqrt(np.clip(q, 0, 0.5))), np.nan))
    if g.singular_at_origin:
        base = np.abs(rw - pw) / np.sqrt(rw * pw)
        for mult in (1.0, 4.0, 16.0, 64.0):
            t = base * mult
            cols.append(np.where(t < 0.5 * math.pi, t, np.nan))
    grid = np.sort(np.stack(cols, axis=1), axis=1)
    lo, hi = grid[:, :-1], grid[:, 1:]
    valid = np.isfinite(hi) & (hi > lo)
    own = np.nonzero(valid)[0]
    wsph = 2.0 * sphere_measure(n - 1)

    def f(theta, o):
        rr = rw[o][:, None]
        pp = pw[o][:, None]
        s2 = np.sin(0.5 * theta) ** 2
        dm = np.sqrt((rr - pp) ** 2 + 4.0 * rr * pp * s2)
        dp = np.sqrt(np.maximum((rr + pp) ** 2 - 4.0 * rr * pp * s2, 0.0))
        vals = 2.0 * gw[o][:, None] - g(dp) - g(dm)
        if n > 2:
            vals = vals * np.sin(theta) ** (n - 2)
        return vals * wsph

    if atol is None:
        atol = 1e-14 * S * (np.abs(gw) + _gscale(g))
    atol = np.broadcast_to(atol, (m,))
    val, _ = integrate_batch(f, lo[valid], hi[valid], rtol=rtol, atol=atol, owner=own, n_owner=m)
    out[work] = val
    return out


def _rho_edges(g, r, start, extra_scale=None):
    """Per-radius split points of the rho integral, packed into a NaN-padded matrix."""
    feats = _feature_points(g)
    cols = [start, r]
    for b in feats:
        cols.append(np.abs(r - b))
        cols.append(r + b)
    reach = r + (g.support if g.support is not None else 2.0 * g.last_breakpoint)
    R = np.maximum(2.0 * reach, 2.0 * r)
    if extra_scale is not None:
        R = np.maximum(R, extra_scale)
    cols.append(R)
    # geometric grading away from the inner cut-off
    for j in range(1, 40):
        cols.append(start * 4.0**j)
    mat = np.stack(cols, axis=1)
    mat = np.where((mat >= start[:, None]) & (mat <= R[:, None]), mat, np.nan)
    return np.sort(mat, axis=1), R


def _rho_integral(g, r, kernel, start, rtol, tail_power, extra_scale=None, atol=None):
    """int_start^inf kernel(rho) A(r, rho) d rho for each radius.

    Beyond R the substitution rho = R t^{-1/tail_power} is used, which is
    exact for kernels decaying like rho^{-1-tail_power} against constant A.
    """
    grid, R = _rho_edges(g, r, start, extra_scale)
    lo, hi = grid[:, :-1], grid[:, 1:]
    valid = np.isfinite(hi) & np.isfinite(lo) & (hi > lo)
    own = np.nonzero(valid)[0]
    m = r.size
    inner_rtol = min(rtol * 0.1, 1e-10)

    def f(rho, o):
        rr = np.broadcast_to(r[o][:, None], rho.shape)
        A = sphere_second_difference(g, rr.ravel(), rho.ravel(), rtol=inner_rtol).reshape(rho.shape)
        return kernel(rho) * A

    val, _ = integrate_batch(f, lo[valid], hi[valid], rtol=rtol, atol=atol, owner=own, n_owner=m)

    compact = g.support is not None
    if compact and extra_scale is None:
        # A is constant 2|S| g(r) once rho > r + support
        S = sphere_measure(g.dim) if g.dim > 1 else 2.0
        tail = 2.0 * S * g(r) * R ** (-tail_power) / tail_power
        return val + tail

    beta = tail_power

    def ft(t, o):
        t = np.maximum(t, 1e-300)
        RR = R[o][:, None]
        rho = RR * t ** (-1.0 / beta)
        rr = np.broadcast_to(r[o][:, None], rho.shape)
        A = sphere_second_difference(g, rr.ravel(), rho.ravel(), rtol=inner_rtol).reshape(rho.shape)
        jac = RR / beta * t ** (-1.0 / beta - 1.0)
        return kernel(rho) * A * jac

    tv, _ = integrate_batch(ft, np.zeros(m), np.ones(m), rtol=rtol, atol=atol)
    return val + tv


def _check_tail(g, s):
    if g.support is not None:
        return
    if g.tail is None:
        raise DivergenceError(f"profile {g.name!r} has no decay information; the tail integral is undefined")
    if g.tail.q <= -2.0 * s:
        raise DivergenceError(
            f"profile {g.name!r} grows like r^{-g.tail.q:g}; (-Delta)^{s:g} needs growth below r^{2 * s:g}"
        )


def _taylor_inner(g, r, s, h):
    """Contribution of |y| < h from the Taylor expansion to fourth order."""
    n = g.dim
    S = sphere_measure(n) if n > 1 else 2.0
    lap = g.laplacian()
    lg = lap(r)
    llg = lap.laplacian()(r)
    second = lg * S * h ** (2 - 2 * s) / (n * (2 - 2 * s))
    fourth = llg * S * h ** (4 - 2 * s) / (4.0 * n * (n + 2) * (4 - 2 * s))
    return -(second + fourth)


def frac_lap_pointwise(g: RadialProfile, spec, r, tol=1e-9):
    """(-Delta)^s g at the radii ``r`` for 0 < s < 1."""
    spec = _as_spec(spec)
    s = spec.sigma
    if not 0 < s < 1:
        raise DomainError(f"frac_lap_pointwise needs 0 < s < 1, got {s}")
    _check_tail(g, s)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if g.singular_at_origin and np.any(r <= 0):
        raise DomainError(f"profile {g.name!r} is singular at the origin")
    C = pv_normalizer(g.dim, s)
    out = np.empty_like(r)
    for i in range(0, r.size, _CHUNK):
        rc = r[i:i + _CHUNK]
        h = 1e-2 * _local_scale(g, rc)
        inner = _taylor_inner(g, rc, s, h)
        outer = _rho_integral(g, rc, lambda rho: rho ** (-1.0 - 2.0 * s), h, tol, 2.0 * s)
        out[i:i + _CHUNK] = 0.5 * C * (inner + outer)
    return out


def _neg_laplacian(g):
    lap = g.laplacian()
    segs = tuple((lambda J, f=f: -f(J)) for f in lap.segments)
    return RadialProfile(g.dim, lap.breakpoints, segs, lap.support, lap.tail,
                         lap.singular_at_origin, f"-lap({g.name})")


def frac_lap_composed(g: RadialProfile, spec, r, tol=1e-9):
    """(-Delta)^sigma g for 1 < sigma < 2, as (-Delta)^s applied to -Delta g."""
    spec = _as_spec(spec)
    if spec.m != 1 or spec.s == 0:
        raise DomainError(f"frac_lap_composed needs 1 < sigma < 2, got {spec.sigma}")
    if g.singular_at_origin and 2 * spec.sigma >= g.dim:
        # -Delta g then carries mass at the origin that a pointwise integral misses
        raise DomainError(f"profile {g.name!r} is singular at the origin; need sigma < n/2 = {g.dim / 2:g}")
    try:
        h = _neg_laplacian(g)
        h.jet(np.array([g.last_breakpoint * 0.5]), 2)
    except Exception as exc:  # segments without jet support
        raise ContractError(f"profile {g.name!r} does not provide radial derivatives") from exc
    return frac_lap_pointwise(h, OperatorSpec(spec.s), r, tol)


def frac_lap(g: RadialProfile, spec, r, tol=1e-9):
    """(-Delta)^sigma g at radii r for sigma in (0, 1] or (1, 2]."""
    spec = _as_spec(spec)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if spec.sigma >= 2 and spec.s > 0:
        raise DomainError("operator orders >= 2 are outside the numerical scope")
    if spec.s == 0:
        out = g
        for _ in range(spec.m):
            out = _neg_laplacian(out)
        return out(r)
    if spec.m == 0:
        return frac_lap_pointwise(g, spec, r, tol)
    return frac_lap_composed(g, spec, r, tol)


# Bessel operators -----------------------------------------------------------


def levy_remainder_kernel(n, s, tau, rho):
    """D(rho) = nu_tau(rho) - C_{n,s} rho^{-n-2s}, the Bessel-minus-Riesz Levy kernel.

    nu_tau(rho) = 2 (2 sqrt(tau)/rho)^nu K_nu(rho sqrt(tau)) / (|Gamma(-s)| (4 pi)^{n/2}),
    nu = n/2 + s. Small arguments use the power series of z^nu K_nu(z) to
    avoid cancellation against the Riesz kernel.
    """
    rho = np.asarray(rho, dtype=float)
    nu = n / 2.0 + s
    pref = 1.0 / (abs(gamma_fn(-s)) * (4 * math.pi) ** (n / 2.0))
    z = rho * math.sqrt(tau)
    E = np.empty_like(z)
    integer_nu = abs(nu - round(nu)) < 1e-9
    small = (z < 2.0) & (not integer_nu)
    zs = z[small]
    if zs.size:
        x = zs * zs / 4.0
        g_nu = gamma_fn(nu)
        g_mnu = gamma_fn(-nu)
        a = np.zeros_like(zs)
        b = np.zeros_like(zs)
        ta = np.ones_like(zs)
        tb = np.ones_like(zs)
        b += tb
        for k in range(1, 60):
            ta = ta * x / (k * (k - nu))
            tb = tb * x / (k * (k + nu))
            a += ta
            b += tb
        E[small] = g_nu * a + g_mnu * (zs / 2.0) ** (2 * nu) * b
    big = ~small
    zb = z[big]
    E[big] = 2.0 * (zb / 2.0) ** nu * special.kv(nu, zb) - gamma_fn(nu)
    return pref * (2.0 / rho) ** (2 * nu) * E


def bessel_minus_riesz_radial(g: RadialProfile, tau, sigma, r, tol=1e-9):
    """w = (tau - Delta)^sigma g - (-Delta)^sigma g at radii r, for 0 < sigma < 1 (radial route)."""
    s = float(sigma)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if tau == 0:
        return np.zeros_like(r)
    if not 0 < s < 1:
        raise DomainError(f"radial Bessel route needs 0 < sigma < 1, got {sigma}")
    if tau < 0:
        raise DomainError("tau must be >= 0")
    _check_tail(g, s)
    n = g.dim
    out = np.empty_like(r)
    reach = 40.0 / math.sqrt(tau)

    def kernel(rho):
        return levy_remainder_kernel(n, s, tau, rho) * rho ** (n - 1)

    for i in range(0, r.size, _CHUNK):
        rc = r[i:i + _CHUNK]
        start = np.zeros_like(rc)
        far = _rho_integral(g, rc, kernel, start, tol, 2.0 * s,
                            extra_scale=np.maximum(reach, 0.0) + rc)
        out[i:i + _CHUNK] = tau**s * g(rc) + 0.5 * far
    return out


def bessel_pointwise(g: RadialProfile, spec, r, tol=1e-9):
    """(tau - Delta)^sigma g at radii r for sigma in (0, 1) or (1, 2)."""
    spec = _as_spec(spec)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    tau = spec.tau
    if tau == 0:
        return frac_lap(g, spec, r, tol)
    if spec.s == 0:
        raise DomainError("integer orders of the Bessel operator are not provided")
    base = g
    if spec.m == 1:
        lap = g.laplacian()
        segs = tuple((lambda J, f=f, l=l: f(J) * tau - l(J)) for f, l in zip(g.segments, lap.segments))
        # tau g dominates -Delta g far out, so g's tail model carries over
        base = RadialProfile(g.dim, g.breakpoints, segs, g.support, g.tail,
                             g.singular_at_origin, f"(tau - lap)({g.name})")
    elif spec.m > 1:
        raise DomainError("operator orders >= 2 are outside the numerical scope")
    riesz = frac_lap_pointwise(base, OperatorSpec(spec.s), r, tol)
    return riesz + bessel_minus_riesz_radial(base, tau, spec.s, r, tol)


# norms ------------------------------------------------------------------------


def radial_grid(g: RadialProfile, r_max=64.0, ratio=2.0, nodes=20):
    """Gauss-Legendre nodes and weights on a graded radial grid.

    Panels follow the breakpoints of g; gaps wider than a factor ``ratio``
    are split geometrically, out to ``r_max``.
    """
    from .quadrature import gl_panels

    feats = [b for b in _feature_points(g) if b < r_max]
    edges = [0.0]
    for b in feats + [r_max]:
        a = edges[-1]
        if a > 0:
            while b / a > ratio:
                a *= ratio
                edges.append(a)
        edges.append(b)
    return gl_panels(np.unique(edges), nodes)


def _norm_p(values, nodes, weights, n, p, decay, r_max):
    """|S^{n-1}| int |v|^p r^{n-1} dr over [0, r_max] plus a power-law tail."""
    S = sphere_measure(n) if n > 1 else 2.0
    body = np.sum(weights * np.abs(values) ** p * nodes ** (n - 1))
    tail = 0.0
    if decay is not None:
        # far-field model |v| ~ C r^{-decay}, fitted at the outermost node
        C = abs(values[-1]) * nodes[-1] ** decay
        expo = decay * p - n
        if expo <= 0:
            raise DivergenceError("far-field decay too slow for an L^p norm")
        tail = C**p * r_max ** (-expo) / expo
    return S * (body + tail)


def seminorm_p(g: RadialProfile, spec, p, tol=1e-9, r_max=64.0, nodes=20, details=False):
    """p-th power of ||(-Delta)^sigma g||_{L^p(R^n)} for sigma < 2.

    The region |x| > r_max is closed with the decay law |x|^{-(n + 2 sigma)}
    of compactly supported profiles.
    """
    spec = _as_spec(spec)
    if spec.sigma >= 2:
        raise DomainError("seminorm needs sigma < 2")
    x, w = radial_grid(g, r_max, nodes=nodes)
    vals = frac_lap(g, spec, x, tol)
    decay = g.dim + 2 * spec.sigma if g.support is not None else None
    out = _norm_p(vals, x, w, g.dim, p, decay, r_max)
    if details:
        return out, {"radii": x, "weights": w, "values": vals}
    return out


def seminorm(g: RadialProfile, spec, p, tol=1e-9, r_max=64.0):
    """||(-Delta)^sigma g||_{L^p(R^n)}."""
    return seminorm_p(g, spec, p, tol, r_max) ** (1.0 / p)


def bessel_norm_p(g: RadialProfile, spec, p, tol=1e-9, r_max=64.0, nodes=20, details=False):
    """p-th power of ||(tau - Delta)^sigma g||_{L^p(R^n)}; tau = 0 gives the Riesz seminorm."""
    spec = _as_spec(spec)
    if spec.tau == 0:
        return seminorm_p(g, spec, p, tol, r_max, nodes, details)
    if g.support is None:
        raise DomainError("Bessel norms are provided for compactly supported profiles")
    x, w = radial_grid(g, r_max, nodes=nodes)
    vals = bessel_pointwise(g, spec, x, tol)
    # the Bessel image of a compactly supported function decays like the Riesz one
    out = _norm_p(vals, x, w, g.dim, p, g.dim + 2 * spec.sigma, r_max)
    if details:
        return out, {"radii": x, "weights": w, "values": vals}
    return out


def bessel_minus_riesz_norm_p(g: RadialProfile, tau, sigma, p, tol=1e-9, r_max=64.0, nodes=20):
    """p-th power of ||w||_{L^p} with w = (tau - Delta)^sigma g - (-Delta)^sigma g."""
    x, w = radial_grid(g, r_max, nodes=nodes)
    vals = bessel_minus_riesz_radial(g, tau, sigma, x, tol)
    return _norm_p(vals, x, w, g.dim, p, g.dim + 2 * sigma, r_max)
