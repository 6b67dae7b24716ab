"""Batched adaptive Gauss-Kronrod quadrature.

Many independent integrals are refined together: every panel carries the id
of the integral it belongs to, so one vectorized integrand call evaluates the
current panels of all unfinished integrals at once.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError

# QUADPACK qk15 abscissae (Kronrod, descending) and weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
WG7 = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 from the outside)
WG7[[1, 3, 5]] = _WG[:3]
WG7[[13, 11, 9]] = _WG[:3]
WG7[7] = _WG[3]

_EPS = np.finfo(float).eps


def _panel_rule(fx, half):
    """Kronrod value and QUADPACK-style error estimate for each panel row."""
    resk = fx @ WK15
    resg = fx @ WG7
    reskh = 0.5 * resk
    resasc = np.abs(fx - reskh[:, None]) @ WK15
    resabs = np.abs(fx) @ WK15
    val = resk * half
    resasc = resasc * np.abs(half)
    resabs = resabs * np.abs(half)
    err = np.abs((resk - resg) * half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return val, err, resabs


def integrate_batch(f, a, b, rtol=1e-10, atol=0.0, max_rounds=120, max_panels=2_000_000,
                    strict=False, owner=None, n_owner=None):
    """Integrate many functions over finite intervals with adaptive GK15.

    ``f(x, owner)`` receives nodes of shape (P, 15) and the owner id of each
    row and must return integrand values of the same shape. ``a`` and ``b``
    give one starting interval per panel; ``owner`` maps panels to integrals
    (default: one integral per interval), so an integral may start out split
    at its breakpoints.

    Returns ``(values, errors)`` per integral. Each integral stops refining
    once its summed error estimate is below ``max(atol, rtol * int |f|)``.
    Unconverged integrals raise :class:`QuadratureError` when ``strict``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    if owner is None:
        owner = np.arange(a.size)
    owner = np.asarray(owner, dtype=np.intp)
    if n_owner is None:
        n_owner = int(owner.max()) + 1 if owner.size else 0
    atol_arr = np.broadcast_to(np.asarray(0.0 if atol is None else atol, dtype=float), (n_owner,))

    pa, pb, pown = a.ravel().copy(), b.ravel().copy(), owner.ravel().copy()
    val = np.empty(0)
    err = np.empty(0)
    absv = np.empty(0)
    new_a, new_b, new_own = pa, pb, pown
    keep_val, keep_err, keep_abs = val, err, absv
    keep_a, keep_b, keep_own = pa[:0], pb[:0], pown[:0]
    done = np.zeros(n_owner, dtype=bool)
    for _ in range(max_rounds + 1):
        if new_a.size:
            half = 0.5 * (new_b - new_a)
            mid = 0.5 * (new_b + new_a)
            x = mid[:, None] + half[:, None] * NODES[None, :]
            fx = np.asarray(f(x, new_own), dtype=float)
            v, e, ab = _panel_rule(fx, half)
            bad = ~np.isfinite(v)
            if bad.any():
                raise QuadratureError(
                    f"non-finite integrand on {int(bad.sum())} panels "
                    f"(first near x={mid[bad][0]:.6g})"
                )
        else:
            v = e = ab = np.empty(0)
        pa = np.concatenate([keep_a, new_a])
        pb = np.concatenate([keep_b, new_b])
        pown = np.concatenate([keep_own, new_own])
        val = np.concatenate([keep_val, v])
        err = np.concatenate([keep_err, e])
        absv = np.concatenate([keep_abs, ab])

        tot = np.bincount(pown, weights=val, minlength=n_owner)
        tot_err = np.bincount(pown, weights=err, minlength=n_owner)
        tot_abs = np.bincount(pown, weights=absv, minlength=n_owner)
        count = np.bincount(pown, minlength=n_owner)
        tol = np.maximum(atol_arr, rtol * tot_abs)
        done = tot_err <= tol
        if done.all():
            break
        share = tol / np.maximum(count, 1)
        width = np.abs(pb - pa)
        scale = np.maximum(np.abs(pa), np.abs(pb))
        splittable = width > 64 * _EPS * np.maximum(scale, 1e-300)
        split = (~done[pown]) & (err > share[pown]) & splittable
        if not split.any():
            # nothing left to split: the error is below roundoff resolution
            break
        if pa.size + split.sum() > max_panels:
            break
        sa, sb, so = pa[split], pb[split], pown[split]
        sm = 0.5 * (sa + sb)
        new_a = np.concatenate([sa, sm])
        new_b = np.concatenate([sm, sb])
        new_own = np.concatenate([so, so])
        keep = ~split
        keep_a, keep_b, keep_own = pa[keep], pb[keep], pown[keep]
        keep_val, keep_err, keep_abs = val[keep], err[keep], absv[keep]
    if strict and not done.all():
        worst = int(np.argmax(tot_err - tol))
        raise QuadratureError(
            f"{int((~done).sum())} integrals unconverged; worst id {worst} "
            f"err {tot_err[worst]:.3g} > tol {tol[worst]:.3g}"
        )
    return tot, tot_err


def integrate(f, a, b, rtol=1e-10, atol=0.0, breakpoints=(), strict=True, **kw):
    """Adaptive integral of a vectorized scalar function over ``[a, b]``."""
    edges = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    val, err = integrate_batch(
        lambda x, _own: f(x), edges[:-1], edges[1:], rtol=rtol, atol=atol,
        owner=np.zeros(edges.size - 1, dtype=np.intp), n_owner=1, strict=strict, **kw
    )
    return float(val[0]), float(err[0])


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gl_panels(edges, n=20):
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
