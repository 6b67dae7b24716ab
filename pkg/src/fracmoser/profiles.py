"""Piecewise-smooth radial profiles and their radial quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DivergenceError, DomainError
from .jets import Jet
from .quadrature import integrate_batch
from .specfun import _check_dim, sphere_measure


@dataclass(frozen=True)
class Tail:
    """Far-field behaviour |g(r)| ~ K r^{-q} (log r)^j beyond the last breakpoint.

    ``q <= 0`` describes growth (e.g. q = 0, j = 1 for a logarithm).
    """

    K: float
    q: float
    log_power: int = 0


@dataclass(frozen=True)
class Region:
    kind: str
    a: float = 0.0
    b: float = math.inf

    def __post_init__(self):
        if self.kind not in ("ball", "annulus", "complement", "all"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if not 0 <= self.a < self.b:
            raise DomainError(f"region needs 0 <= a < b, got a={self.a}, b={self.b}")

    @property
    def bounds(self):
        return self.a, self.b


def ball(a):
    return Region("ball", 0.0, float(a))


def annulus(a, b):
    return Region("annulus", float(a), float(b))


def complement(a):
    return Region("complement", float(a), math.inf)


def all_space():
    return Region("all", 0.0, math.inf)


def _sub(jet, mask):
    return Jet(jet.c[:, mask])


def compose(outer, inner):
    """Taylor coefficients of f(inner) given the jet ``outer`` of f at inner.value."""
    d = inner - inner.value
    out = Jet(np.broadcast_to(outer.c[-1], inner.c.shape[1:]) * np.ones_like(inner.c[:1]))
    out = Jet(np.concatenate([out.c, np.zeros_like(inner.c[1:])]))
    for k in range(outer.order - 1, -1, -1):
        out = out * d + outer.c[k]
    return out


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A radial function g(|x|) on R^dim made of analytic segments.

    ``segments[i]`` maps a jet of the radius to a jet of g and is used on
    ``[breakpoints[i-1], breakpoints[i])`` (the first segment starts at 0, the
    last one runs to infinity). ``support`` is a radius beyond which g
    vanishes identically, or None.
    """

    dim: int
    breakpoints: tuple
    segments: tuple
    support: float | None = None
    tail: Tail | None = None
    singular_at_origin: bool = False
    name: str = "profile"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _check_dim(self.dim)
        bps = tuple(float(b) for b in self.breakpoints)
        if any(b <= 0 for b in bps) or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise DomainError(f"breakpoints must be positive and increasing: {bps}")
        if len(self.segments) != len(bps) + 1:
            raise DomainError("need exactly one more segment than breakpoints")
        object.__setattr__(self, "breakpoints", bps)

    # evaluation ---------------------------------------------------------

    def eval_jet(self, r):
        """Jet of g at the jet argument ``r`` (a radius expressed in any variable)."""
        r0 = r.value
        idx = np.searchsorted(np.asarray(self.breakpoints), r0, side="right")
        out = np.zeros_like(r.c)
        for i in np.unique(idx):
            mask = idx == i
            out[:, mask] = self.segments[i](_sub(r, mask)).c
        return Jet(out)

    def jet(self, r, order=2):
        r = np.asarray(r, dtype=float)
        return self.eval_jet(Jet.variable(r, order))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.jet(r.ravel(), 0).value.reshape(r.shape)

    def derivative(self, r, k=1):
        r = np.asarray(r, dtype=float)
        return self.jet(r.ravel(), k).derivatives()[k].reshape(r.shape)

    @property
    def last_breakpoint(self):
        return self.breakpoints[-1] if self.breakpoints else 1.0

    # transformations -------------------------------------------------------

    def scaled(self, lam):
        """Profile of r -> g(lam r)."""
        lam = float(lam)
        if lam <= 0:
            raise DomainError("scale must be positive")
        segs = tuple((lambda J, s=s: s(J * lam)) for s in self.segments)
        tail = None
        if self.tail is not None:
            tail = Tail(self.tail.K * lam ** (-self.tail.q), self.tail.q, self.tail.log_power)
        return RadialProfile(
            self.dim, tuple(b / lam for b in self.breakpoints), segs,
            None if self.support is None else self.support / lam, tail,
            self.singular_at_origin, f"{self.name}(scaled {lam:g})",
        )

    def laplacian(self):
        """Profile of the radial Laplacian g'' + (dim - 1) g'/r."""
        n = self.dim

        def lap_segment(seg):
            def inner(J):
                r0 = J.value
                K = J.order
                G = seg(Jet.variable(r0, K + 2))
                g1 = G.derivative()
                g2 = g1.derivative()
                at0 = r0 == 0
                safe = np.where(at0, 1.0, r0)
                term = g1.truncate(K) / Jet.variable(safe, K)
                if at0.any():
                    # g'(r)/r at the origin of a smooth even profile: shift coefficients
                    term = Jet(g1.c[1:]).where(at0, term)
                lap = g2 + term * (n - 1)
                return compose(lap, J)
            return inner

        tail = None
        if self.tail is not None:
            t = self.tail
            if t.q == 0 and t.log_power == 0:
                tail = Tail(0.0, 2.0)
            else:
                tail = Tail(abs(t.K) * (abs(t.q) + 1) * (abs(t.q) + n), t.q + 2, max(t.log_power - 1, 0))
        return RadialProfile(
            n, self.breakpoints, tuple(lap_segment(s) for s in self.segments),
            self.support, tail, self.singular_at_origin, f"lap({self.name})",
        )

    def to_json(self, samples=400, r_max=None):
        """Breakpoints plus sampled values on a graded grid, for plotting."""
        r_max = r_max or 2.0 * (self.support or self.last_breakpoint)
        lo = min(self.breakpoints[0] if self.breakpoints else 1e-3, r_max) / 10.0
        r = np.unique(np.concatenate([
            np.geomspace(lo, r_max, samples),
            np.asarray(self.breakpoints),
            [] if self.singular_at_origin else [0.0],
        ]))
        return {
            "name": self.name,
            "dim": self.dim,
            "breakpoints": list(self.breakpoints),
            "support": self.support,
            "r": r.tolist(),
            "values": self(r).tolist(),
        }


def linear_combination(profiles, coeffs, name="combination"):
    """Profile of sum_i coeffs[i] * profiles[i] (common dimension)."""
    profiles = list(profiles)
    coeffs = [float(c) for c in coeffs]
    dims = {p.dim for p in profiles}
    if len(dims) != 1:
        raise DomainError("profiles must share a dimension")
    bps = tuple(sorted({b for p in profiles for b in p.breakpoints}))
    edges = (0.0,) + bps + (math.inf,)

    def make(lo, hi):
        probe = lo + 0.5 * (hi - lo) if math.isfinite(hi) else lo + 1.0
        picks = []
        for p, c in zip(profiles, coeffs):
            i = int(np.searchsorted(np.asarray(p.breakpoints), probe, side="right"))
            picks.append((p.segments[i], c))

        def seg(J):
            out = None
            for s, c in picks:
                term = s(J) * c
                out = term if out is None else out + term
            return out
        return seg

    segs = tuple(make(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
    supports = [p.support for p in profiles]
    support = None if any(s is None for s in supports) else max(supports)
    tail = None
    tails = [p.tail for p in profiles if p.support is None]
    if support is None and all(t is not None for t in tails):
        worst = min(tails, key=lambda t: (t.q, -t.log_power))
        tail = Tail(sum(abs(c) * (p.tail.K if p.tail else 0.0) for p, c in zip(profiles, coeffs)),
                    worst.q, worst.log_power)
    return RadialProfile(profiles[0].dim, bps, segs, support, tail,
                         any(p.singular_at_origin for p in profiles), name)


def continuity_gaps(profile, order=1):
    """Jumps of the first ``order`` derivatives across every breakpoint."""
    out = []
    for i, b in enumerate(profile.breakpoints):
        left = profile.segments[i](Jet.variable(np.array([b]), order)).derivatives()[:, 0]
        right = profile.segments[i + 1](Jet.variable(np.array([b]), order)).derivatives()[:, 0]
        out.append(np.abs(left - right))
    return np.array(out).reshape(len(profile.breakpoints), order + 1)


def tail_slope(profile, radii):
    """Log-log slope of |g| between consecutive far-field radii."""
    radii = np.asarray(radii, dtype=float)
    vals = np.abs(profile(radii))
    return np.diff(np.log(vals)) / np.diff(np.log(radii))


def _interval_panels(profile, lo, hi, extra=()):
    pts = [lo, hi] + [b for b in profile.breakpoints if lo < b < hi] + [e for e in extra if lo < e < hi]
    if profile.support is not None and lo < profile.support < hi:
        pts.append(profile.support)
    return np.unique(pts)


def radial_integral(profile, integrand, region, rtol=1e-11, atol=0.0, tail_exponent=None):
    """|S^{n-1}| int integrand(g(r), r) r^{n-1} dr over a region.

    ``integrand(values, r)`` acts on arrays. For unbounded regions the far
    part uses r = R t^{-1/beta} with ``beta = tail_exponent`` (the decay rate
    of integrand * r^n), which makes a pure power-law tail integrate exactly.
    """
    n = profile.dim
    lo, hi = region.bounds
    if profile.support is not None:
        hi = min(hi, profile.support)
    finite_hi = hi
    if not math.isfinite(hi):
        finite_hi = max(profile.last_breakpoint, lo) * 2.0
    if finite_hi <= lo:
        return 0.0
    edges = _interval_panels(profile, lo, finite_hi)
    if profile.singular_at_origin and edges[0] == 0.0 and edges.size > 1:
        first = edges[1]
        edges = np.unique(np.concatenate([[0.0, first * 1e-8, first * 1e-4], edges]))

    def f(x, own):
        return integrand(profile(x), x) * x ** (n - 1)

    val, err = integrate_batch(f, edges[:-1], edges[1:], rtol=rtol, atol=atol,
                               owner=np.zeros(edges.size - 1, dtype=np.intp), n_owner=1)
    total = float(val[0])
    if not math.isfinite(hi):
        if tail_exponent is None or tail_exponent <= 0:
            raise DivergenceError("unbounded region requires a decaying tail")
        R = finite_hi
        beta = tail_exponent

        def g(t, own):
            t = np.maximum(t, 1e-300)
            r = R * t ** (-1.0 / beta)
            jac = R / beta * t ** (-1.0 / beta - 1.0)
            return integrand(profile(r), r) * r ** (n - 1) * jac

        tv, _ = integrate_batch(g, [0.0], [1.0], rtol=rtol, atol=atol)
        total += float(tv[0])
    return sphere_measure(n) * total


def lp_norm(g, p, region=None, tol=1e-11):
    """(|S^{n-1}| int |g|^p r^{n-1} dr)^{1/p} over a region (default all space)."""
    if p < 1:
        raise DomainError(f"lp_norm needs p >= 1, got {p}")
    region = region or all_space()
    beta = None
    unbounded = not math.isfinite(region.b) and g.support is None
    if unbounded:
        if g.tail is None:
            raise DivergenceError(f"profile {g.name!r} has no tail model on an unbounded region")
        beta = g.tail.q * p - g.dim
        if beta <= 0:
            raise DivergenceError(
                f"|g|^p is not integrable at infinity (q*p = {g.tail.q * p:g} <= n = {g.dim})"
            )
    val = radial_integral(g, lambda v, r: np.abs(v) ** p, region, rtol=tol, tail_exponent=beta)
    return val ** (1.0 / p)


def lp_norm_p(g, p, region=None, tol=1e-11):
    """The p-th power of :func:`lp_norm`."""
    return lp_norm(g, p, region, tol) ** p


def constant_profile(dim, value=1.0, support=None):
    value = float(value)

    def seg(J):
        return J * 0.0 + value

    def zero(J):
        return J * 0.0

    if support is None:
        return RadialProfile(dim, (), (seg,), None, Tail(abs(value), 0.0), False, f"const({value:g})")
    return RadialProfile(dim, (float(support),), (seg, zero), float(support), None, False,
                         f"const({value:g}) on ball({support:g})")


def log_profile(dim):
    """log(1/r) on all of R^dim."""
    return RadialProfile(dim, (), (lambda J: -J.log(),), None, Tail(1.0, 0.0, 1), True, "log(1/r)")


def power_profile(dim, a, coeff=1.0):
    """coeff * r^a on all of R^dim."""
    a = float(a)
    return RadialProfile(dim, (), (lambda J: (J**a) * coeff,), None, Tail(abs(coeff), -a),
                         a < 0, f"{coeff:g} r^{a:g}")


def piecewise_polynomial(dim, breakpoints, coeffs, tail=None):
    """Profile that is the polynomial ``coeffs[i]`` (lowest degree first) on segment i.

    With ``tail = (K, q)`` the last segment is replaced by K r^{-q}.
    """
    def poly(c):
        def seg(J):
            out = J * 0.0
            for ck in reversed(c):
                out = out * J + ck
            return out
        return seg

    segs = [poly(np.asarray(c, dtype=float)) for c in coeffs]
    tail_obj = None
    support = None
    if tail is not None:
        K, q = tail
        segs[-1] = lambda J, K=K, q=q: (J ** (-q)) * K
        tail_obj = Tail(K, q)
    elif not np.any(coeffs[-1]):
        support = float(breakpoints[-1])
    if len(segs) != len(breakpoints) + 1:
        raise ContractError("piecewise_polynomial needs len(breakpoints) + 1 coefficient lists")
    return RadialProfile(dim, tuple(breakpoints), tuple(segs), support, tail_obj, False,
                         "piecewise polynomial")
