"""The Moser-type test family v_eps, u_eps and its decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import ExponentPair, kappa_np
from .errors import DomainError
from .jets import eta_cut, phi_cut
from .profiles import RadialProfile, Tail, linear_combination, log_profile
from .specfun import _check_dim


@dataclass(frozen=True)
class MoserParams:
    n: int
    p: float
    eps: float

    def __post_init__(self):
        _check_dim(self.n)
        p = self.p.p if isinstance(self.p, ExponentPair) else float(self.p)
        object.__setattr__(self, "p", ExponentPair(p).p)
        # the plateau, bridge and pure-log regimes must not overlap
        if not 0 < 3 * self.eps < 0.5:
            raise DomainError(f"need 0 < 3 eps < 1/2, got eps = {self.eps}")

    @classmethod
    def from_k(cls, n, p, k):
        """Parameters with eps = e^{-k}."""
        return cls(n, p, math.exp(-k))

    @property
    def p_conj(self):
        return self.p / (self.p - 1.0)

    @property
    def L(self):
        """log(1/eps)."""
        return -math.log(self.eps)

    @property
    def amp(self):
        """(log 1/eps)^{-1/p}, the prefactor of v_eps."""
        return self.L ** (-1.0 / self.p)

    @property
    def sigma(self):
        """Order n/(2p) of the operator in the inequality."""
        return self.n / (2.0 * self.p)

    @property
    def breakpoints(self):
        e = self.eps
        return (e, 2 * e, 3 * e, 0.5, 0.75, 1.0)


def _zero(J):
    return J * 0.0


def v_eps(params: MoserParams) -> RadialProfile:
    """Unnormalized test function: plateau (log 1/eps)^{1/p'} on B_eps, log decay, cut off at 1."""
    e, L, A = params.eps, params.L, params.amp

    def plateau(J):
        return J * 0.0 + A * L

    def bridge(J):
        ph = phi_cut(J / e)
        return (ph * L + (-J.log()) * (1.0 - ph)) * A

    def logpart(J):
        return -J.log() * A

    def outer(J):
        return -J.log() * eta_cut(J) * A

    segs = (plateau, bridge, logpart, logpart, logpart, outer, _zero)
    return RadialProfile(params.n, params.breakpoints, segs, 1.0, None, False,
                         f"v_eps(n={params.n}, p={params.p:g}, eps={e:.6g})",
                         meta={"params": params})


def u_eps(params: MoserParams) -> RadialProfile:
    """kappa_np * v_eps, normalized so that alpha_np |u_eps|^{p'} = n log(1/eps) on the plateau."""
    kap = kappa_np(params.n, params.p)
    v = v_eps(params)
    segs = tuple((lambda J, s=s: s(J) * kap) for s in v.segments)
    return RadialProfile(params.n, v.breakpoints, segs, 1.0, None, False,
                         f"u_eps(n={params.n}, p={params.p:g}, eps={params.eps:.6g})",
                         meta={"params": params})


def plateau_value(params: MoserParams) -> float:
    """Value of u_eps on B_eps, kappa_np (log 1/eps)^{1/p'}."""
    return kappa_np(params.n, params.p) * params.L ** (1.0 / params.p_conj)


def log_part(params: MoserParams) -> RadialProfile:
    """(log 1/eps)^{-1/p} log(1/|x|) on all of R^n."""
    base = log_profile(params.n)
    A = params.amp
    return RadialProfile(params.n, (), (lambda J: base.segments[0](J) * A,), None,
                         Tail(A, 0.0, 1), True, "amp * log(1/r)")


def decompose(params: MoserParams):
    """Return (f_eps, g_eps, R_eps) with v_eps = amp * log(1/r) + R_eps and R_eps = f_eps + g_eps."""
    e, L, A = params.eps, params.L, params.amp

    def f_in(J):
        return (J.log() + L) * A

    def f_bridge(J):
        return (J.log() + L) * phi_cut(J / e) * A

    f = RadialProfile(params.n, (e, 2 * e), (f_in, f_bridge, _zero), 2 * e, None, True,
                      "f_eps", meta={"params": params})

    def g_outer(J):
        return -J.log() * (eta_cut(J) - 1.0) * A

    def g_far(J):
        return J.log() * A

    g = RadialProfile(params.n, (0.75, 1.0), (_zero, g_outer, g_far), None, Tail(A, 0.0, 1),
                      False, "g_eps", meta={"params": params})
    R = linear_combination([f, g], [1.0, 1.0], name="R_eps")
    return f, g, R
