"""Moser-Trudinger functionals and the sharpness sweeps built on the test family."""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .constants import OperatorSpec, alpha_np
from .errors import DomainError, SaturationError
from .fraclap import bessel_norm_p, seminorm_p
from .moser import MoserParams, plateau_value, u_eps
from .profiles import RadialProfile, Region, ball, lp_norm_p, radial_integral
from .specfun import ball_volume

LOG_CAP = 700.0


@dataclass(frozen=True)
class WeightFn:
    """Weight f(t) in front of the exponential: t^a, log(1 + t) or 1."""

    tag: str
    a: float = 0.0

    def __post_init__(self):
        if self.tag not in ("power", "logweight", "one"):
            raise DomainError(f"unknown weight {self.tag!r}")
        if self.tag == "power" and self.a <= 0:
            raise DomainError("power weights need a positive exponent")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.tag == "power":
            return t**self.a
        if self.tag == "logweight":
            return np.log1p(t)
        return np.ones_like(t)

    def log(self, t):
        with np.errstate(divide="ignore"):
            return np.log(self(t))

    @property
    def label(self):
        if self.tag == "power":
            return f"t^{self.a:g}"
        return "log(1+t)" if self.tag == "logweight" else "1"

    @classmethod
    def parse(cls, text):
        """Accepts 't^2', 't^0.5', 't^(1/2)', 'log(1+t)', 'log', 'one' or '1'."""
        s = text.strip().replace(" ", "")
        if s in ("one", "1"):
            return cls("one")
        if s in ("log", "log(1+t)", "logweight"):
            return cls("logweight")
        m = re.fullmatch(r"t\^[({]?([0-9.]+)(?:/([0-9.]+))?[)}]?", s)
        if m:
            a = float(m.group(1)) / (float(m.group(2)) if m.group(2) else 1.0)
            return cls("power", a)
        raise DomainError(f"cannot parse weight {text!r}")


DEFAULT_WEIGHTS = (WeightFn("power", 0.5), WeightFn("power", 2.0), WeightFn("logweight"))


@dataclass(frozen=True)
class ExpIntegral:
    """Value of an exponential integral with its logarithm.

    ``saturated`` is set when the value is beyond double range; ``value`` is
    then infinite but ``log_value`` stays exact.
    """

    value: float
    log_value: float
    saturated: bool


def exp_functional(u: RadialProfile, alpha, p_conj, w: WeightFn = WeightFn("one"),
                   region: Region | None = None, tol=1e-10) -> ExpIntegral:
    """|S^{n-1}| int w(|u|) exp(alpha |u|^{p'}) r^{n-1} dr over a bounded region."""
    region = region or ball(u.support or 1.0)
    if not math.isfinite(region.b):
        raise DomainError("exp_functional integrates over bounded regions")
    lo, hi = region.bounds
    probe = np.unique(np.concatenate([
        np.linspace(lo, hi, 257), [b for b in u.breakpoints if lo <= b <= hi]
    ]))
    if u.singular_at_origin:
        probe = probe[probe > 0]

    def logf(vals):
        a = np.abs(vals)
        return w.log(a) + alpha * a**p_conj

    peak = float(np.max(logf(u(probe))))
    if not math.isfinite(peak):
        peak = 0.0
    scaled = radial_integral(u, lambda v, r: np.exp(logf(v) - peak), region, rtol=tol)
    if scaled <= 0:
        return ExpIntegral(0.0, -math.inf, False)
    log_value = peak + math.log(scaled)
    if log_value > 709.0:
        return ExpIntegral(math.inf, log_value, True)
    return ExpIntegral(math.exp(log_value), log_value, False)


def j_p(p):
    """Smallest integer >= p."""
    if p <= 1:
        raise DomainError("need p > 1")
    return int(math.ceil(p - 1e-12))


def phi_truncated(t, p):
    """Phi(t) = e^t - sum_{j=0}^{j_p - 2} t^j / j!, the exponential minus its first j_p - 1 terms."""
    t = np.asarray(t, dtype=float)
    jmin = j_p(p) - 1
    out = np.empty_like(t)
    small = t < 1.0
    ts = t[small]
    # series tail for small arguments avoids cancellation
    term = ts**jmin / math.factorial(jmin)
    acc = term.copy()
    for j in range(jmin + 1, jmin + 40):
        term = term * ts / j
        acc += term
    out[small] = acc
    tb = t[~small]
    poly = sum(tb**j / math.factorial(j) for j in range(jmin))
    out[~small] = np.exp(tb) - poly
    return out if out.ndim else float(out)


def log_phi_truncated(t, p):
    """log Phi(t), finite for arguments far beyond the double range of e^t."""
    t = float(t)
    jmin = j_p(p) - 1
    if t < 30.0:
        return math.log(float(phi_truncated(t, p)))
    poly = sum(t**j / math.factorial(j) for j in range(jmin))
    return t + math.log1p(-poly * math.exp(-t))


def phi_half_threshold(p):
    """Smallest x* with Phi(x) >= e^x / 2 for every x >= x*."""
    jmin = j_p(p) - 1

    def h(x):
        return 0.5 * math.exp(x) - sum(x**j / math.factorial(j) for j in range(jmin))

    hi = 1.0
    while h(hi) <= 0:
        hi *= 2.0
    # h is negative then positive; walk down to the last sign change
    lo = 0.0
    grid = np.linspace(0.0, hi, 2001)
    vals = np.array([h(x) for x in grid])
    neg = np.nonzero(vals <= 0)[0]
    if neg.size == 0:
        return 0.0
    lo, hi = grid[neg[-1]], grid[min(neg[-1] + 1, grid.size - 1)]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SweepRow:
    k: int
    lp_norm_p: float
    seminorm_p: float
    bessel_norm_p: float
    I_eps: float
    weighted: float

    def as_dict(self):
        return asdict(self)


SWEEP_FIELDS = ("k", "lp_norm_p", "seminorm_p", "bessel_norm_p", "I_eps", "weighted")


@lru_cache(maxsize=256)
def moser_norms(n, p, k, tau=0.0, tol=1e-9):
    """(||u_eps||_p^p, seminorm^p, Bessel norm^p) for eps = e^{-k}; cached."""
    params = MoserParams.from_k(n, p, k)
    u = u_eps(params)
    sigma = params.sigma
    lp = lp_norm_p(u, p)
    sn = seminorm_p(u, OperatorSpec(sigma), p, tol)
    bn = sn if tau == 0 else bessel_norm_p(u, OperatorSpec(sigma, tau), p, tol)
    return lp, sn, bn


def plateau_integral(n, p, k, normalizer_p, w: WeightFn = WeightFn("one"), use_phi=False):
    """Exponential integral of u_eps / N^{1/p} over B_eps in closed form.

    Returns (I, weighted, log I). The plateau satisfies alpha |u|^{p'} = n k,
    so after normalization the exponent is n k / N^{p'/p}.
    """
    q = p / (p - 1.0)
    expo = n * k / normalizer_p ** (q / p)
    log_vol = math.log(ball_volume(n)) - n * k
    if use_phi:
        log_I = log_vol + log_phi_truncated(expo, p)
    else:
        log_I = log_vol + expo
    if log_I > LOG_CAP:
        raise SaturationError(f"plateau integral exceeds e^{LOG_CAP:g}", where={"k": k})
    I = math.exp(log_I)
    params = MoserParams.from_k(n, p, k)
    plateau = plateau_value(params) / normalizer_p ** (1.0 / p)
    return I, I * float(w(plateau)), log_I


def sharpness_row(params: MoserParams, w: WeightFn, tau=None, use_phi=False, tol=1e-9) -> SweepRow:
    """One row of the divergence experiment at eps = params.eps.

    The Riesz branch normalizes by ||u||_p^p + ||(-Delta)^{n/2p} u||_p^p; with
    ``tau > 0`` the normalizer is the Bessel norm ||(tau - Delta)^{n/2p} u||_p^p.
    """
    k = params.L
    if abs(k - round(k)) > 1e-9:
        raise DomainError("sweep rows are indexed by integer k with eps = e^{-k}")
    k = int(round(k))
    tau = 0.0 if tau is None else float(tau)
    lp, sn, bn = moser_norms(params.n, params.p, k, tau, tol)
    norm = lp + sn if tau == 0 else bn
    I, weighted, _ = plateau_integral(params.n, params.p, k, norm, w, use_phi)
    return SweepRow(k, lp, sn, bn, I, weighted)


def _threads():
    try:
        return max(1, int(os.environ.get("FRAC_MOSER_THREADS", "1")))
    except ValueError:
        return 1


def sharpness_sweep(n, p, k_range, w: WeightFn, tau=None, use_phi=False, tol=1e-9):
    """Rows for every k in k_range, ordered by k whatever the thread count."""
    ks = sorted(set(int(k) for k in k_range))

    def run(k):
        return sharpness_row(MoserParams.from_k(n, p, k), w, tau, use_phi, tol)

    workers = min(_threads(), len(ks)) or 1
    if workers == 1:
        rows = [run(k) for k in ks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(run, ks))
    return sorted(rows, key=lambda r: r.k)


@dataclass(frozen=True)
class BesselSweep:
    rows: list
    tau: float
    use_phi: bool
    threshold_M: float | None


def bessel_sharpness_sweep(n, p, tau, k_range, w: WeightFn, use_phi=False, tol=1e-9) -> BesselSweep:
    """Sweep with the Bessel normalizer; tau = 0 falls back to the Riesz rows.

    With ``use_phi`` the truncated exponential Phi replaces exp on the plateau,
    and ``threshold_M`` is the level beyond which Phi(alpha t^{p'}) >= exp(alpha t^{p'}) / 2.
    """
    rows = sharpness_sweep(n, p, k_range, w, tau if tau else None, use_phi, tol)
    M = None
    if use_phi:
        q = p / (p - 1.0)
        M = (phi_half_threshold(p) / alpha_np(n, p)) ** (1.0 / q)
    return BesselSweep(rows, float(tau), use_phi, M)


# Iannizzotto-Squassina type condition (n = 1, p = 2) --------------------------


@dataclass
class ISWitness:
    """Outcome of :func:`is_condition_search`.

    ``u`` is the witness written in y = 2x - 1 (so x in (0, 1)); ``history``
    lists (k, M_value) for every k tried.
    """

    k: int
    u: RadialProfile
    M_value: float
    sup_t: float
    t_star: float
    t0: float
    threshold: float
    reached: bool
    history: list = field(default_factory=list)


def _golden_max(f, a, b, tol=1e-10, iters=200):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if abs(b - a) < tol * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    cands = [(f(a), a), (fc, c), (fd, d), (f(b), b)]
    val, arg = max(cands)
    return arg, val


def is_condition_search(target_M, k_max, k_min=3, alpha0=math.pi, h=None, tol=1e-9,
                        stop_at_target=True) -> ISWitness:
    """Search the normalized family for a witness of int_0^1 f(t0 u) u dx > M.

    Works with n = 1, p = 2, f(t) = exp(alpha0 t^2) h(t) (h(t) = t by default)
    and u(x) = u_eps(2x - 1) / (t0 S_eps), t0 = sqrt(2 pi^2 / alpha0),
    S_eps = ||(-Delta)^{1/4} u_eps||_2, so that t0 ||(-Delta)^{1/4} u||_2 = 1.
    For each witness the energy sup over 0 < t <= t0 of
    t^2 / (4 pi) - int_0^1 F(t u) dx, F' = f, is reported next to pi/(2 alpha0).
    """
    if h is None:
        h = WeightFn("power", 1.0)
    t0 = math.sqrt(2.0 * math.pi**2 / alpha0)
    threshold = math.pi / (2.0 * alpha0)
    history = []
    best = None
    for k in range(int(k_min), int(k_max) + 1):
        params = MoserParams.from_k(1, 2, k)
        ue = u_eps(params)
        S = math.sqrt(moser_norms(1, 2.0, k, 0.0, tol)[1])
        scale = 1.0 / (t0 * S)
        segs = tuple((lambda J, s=s: s(J) * scale) for s in ue.segments)
        u = RadialProfile(1, ue.breakpoints, segs, ue.support, None, False,
                          f"IS witness k={k}", meta={"params": params, "y": "2x-1"})
        # int_0^1 g(u(x)) dx = (1/2) int_{-1}^{1} g(u(y)) dy, and radial_integral over n = 1 covers both signs
        integrand = lambda v, r: np.exp(alpha0 * (t0 * v) ** 2) * h(t0 * np.abs(v)) * np.abs(v)
        M_value = 0.5 * radial_integral(u, integrand, ball(1.0), rtol=tol)

        def energy(t, u=u):
            big_f = lambda v, r: (np.exp(alpha0 * (t * v) ** 2) - 1.0) / (2.0 * alpha0)
            return t * t / (4.0 * math.pi) - 0.5 * radial_integral(u, big_f, ball(1.0), rtol=tol)

        t_star, sup_t = _golden_max(energy, 0.0, t0)
        history.append((k, M_value))
        best = ISWitness(k, u, M_value, sup_t, t_star, t0, threshold, M_value > target_M, history)
        if stop_at_target and M_value > target_M:
            break
    return best
