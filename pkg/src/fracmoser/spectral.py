"""Fourier-multiplier route on a periodic box [-L, L)^dim."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import ball_volume, sphere_measure


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of a function on the uniform periodic grid of [-L, L)^dim."""

    dim: int
    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"grid fields are one- or two-dimensional, got dim={self.dim}")
        if self.N < 64 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 64, got {self.N}")
        if self.L <= 0:
            raise DomainError("box half-width must be positive")
        if self.values.shape != (self.N,) * self.dim:
            raise DomainError(f"values must have shape {(self.N,) * self.dim}")

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @classmethod
    def coordinates(cls, L, N):
        return -L + np.arange(N) * (2.0 * L / N)

    @classmethod
    def from_function(cls, f, dim, L=8.0, N=None):
        """Sample ``f(x)`` (1D) or ``f(x, y)`` (2D) on the grid."""
        N = N or (2048 if dim == 1 else 1024)
        x = cls.coordinates(L, N)
        if dim == 1:
            vals = f(x)
        else:
            X, Y = np.meshgrid(x, x, indexing="ij")
            vals = f(X, Y)
        return cls(dim, float(L), int(N), np.asarray(vals, dtype=float))

    @classmethod
    def from_profile(cls, profile, L=8.0, N=None):
        """Sample a radial profile on the grid; the origin node of a singular profile is rejected."""
        if profile.dim != 1 and profile.dim != 2:
            raise DomainError("radial profiles can be gridded in dimension 1 or 2 only")
        if profile.dim == 1:
            return cls.from_function(lambda x: profile(np.abs(x)), 1, L, N)
        return cls.from_function(lambda X, Y: profile(np.hypot(X, Y)), 2, L, N)

    def radii(self):
        x = self.coordinates(self.L, self.N)
        if self.dim == 1:
            return np.abs(x)
        X, Y = np.meshgrid(x, x, indexing="ij")
        return np.hypot(X, Y)


@dataclass(frozen=True)
class SymbolSpec:
    """Fourier symbol |xi|^{2 sigma} (riesz) or (tau + |xi|^2)^sigma (bessel)."""

    kind: str
    sigma: float
    tau: float = 0.0

    def __post_init__(self):
        if self.kind not in ("riesz", "bessel"):
            raise DomainError(f"unknown symbol kind {self.kind!r}")
        if self.sigma <= 0 or self.tau < 0:
            raise DomainError("need sigma > 0 and tau >= 0")

    def __call__(self, k2):
        if self.kind == "riesz":
            return np.where(k2 > 0, k2 ** self.sigma, 0.0)
        return (self.tau + k2) ** self.sigma


def riesz(sigma):
    return SymbolSpec("riesz", float(sigma))


def bessel(tau, sigma):
    return SymbolSpec("bessel", float(sigma), float(tau))


def _k2(field):
    k = 2.0 * math.pi * np.fft.fftfreq(field.N, d=field.dx)
    kr = 2.0 * math.pi * np.fft.rfftfreq(field.N, d=field.dx)
    if field.dim == 1:
        return kr**2
    return k[:, None] ** 2 + kr[None, :] ** 2


def spectral_apply(field: GridField, sym: SymbolSpec) -> GridField:
    """Multiply the discrete Fourier transform of the field by the symbol."""
    axes = tuple(range(field.dim))
    hat = np.fft.rfftn(field.values, axes=axes)
    out = np.fft.irfftn(hat * sym(_k2(field)), s=field.values.shape, axes=axes)
    return GridField(field.dim, field.L, field.N, out)


def bessel_minus_riesz_grid(field: GridField, tau, sigma) -> GridField:
    """w = (tau - Delta)^sigma u - (-Delta)^sigma u via the symbol difference."""
    axes = tuple(range(field.dim))
    k2 = _k2(field)
    diff = bessel(tau, sigma)(k2) - riesz(sigma)(k2) if tau > 0 else np.zeros_like(k2)
    hat = np.fft.rfftn(field.values, axes=axes)
    out = np.fft.irfftn(hat * diff, s=field.values.shape, axes=axes)
    return GridField(field.dim, field.L, field.N, out)


def grid_norm_p(field: GridField, p, tail_decay=None):
    """p-th power of the L^p norm over the box.

    With ``tail_decay = q`` the outside of the box is added from the model
    |v| ~ C |x|^{-q}, with C fitted on the shell L/2 < |x| < 0.9 L and the
    box replaced by the ball of equal volume.
    """
    body = np.sum(np.abs(field.values) ** p) * field.dx**field.dim
    if tail_decay is None:
        return float(body)
    n = field.dim
    r = field.radii()
    shell = (r > 0.5 * field.L) & (r < 0.9 * field.L)
    C = float(np.median(np.abs(field.values[shell]) * r[shell] ** tail_decay))
    expo = tail_decay * p - n
    if expo <= 0:
        raise DomainError("tail decays too slowly for an L^p norm")
    R = field.L * (2.0**n / ball_volume(n)) ** (1.0 / n)
    S = sphere_measure(n) if n > 1 else 2.0
    return float(body + S * C**p * R ** (-expo) / expo)


def grid_norm(field: GridField, p, tail_decay=None):
    return grid_norm_p(field, p, tail_decay) ** (1.0 / p)


def random_bandlimited(dim, rng, L=8.0, N=256, kmax=6.0, modes=12):
    """Smooth random field: a sum of Gaussian wave packets with frequencies below kmax."""
    x = GridField.coordinates(L, N)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    vals = np.zeros((N,) * dim)
    for _ in range(modes):
        centre = rng.uniform(-0.3 * L, 0.3 * L, size=dim)
        width = rng.uniform(0.5, 1.5)
        freq = rng.uniform(-kmax, kmax, size=dim)
        amp = rng.normal()
        phase = rng.uniform(0, 2 * math.pi)
        d2 = sum((g - c) ** 2 for g, c in zip(grids, centre))
        arg = sum(f * g for f, g in zip(freq, grids))
        vals += amp * np.exp(-d2 / (2 * width**2)) * np.cos(arg + phase)
    return GridField(dim, float(L), int(N), vals)
