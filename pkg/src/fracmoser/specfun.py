"""Gamma function and unit sphere/ball measures.

Gamma uses the Lanczos approximation (g = 7, nine terms) with the reflection
formula below 1/2 and upward recurrence above 12.
"""

import math

import numpy as np

from .errors import DomainError

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
MAX_DIM = 16


def _lanczos_positive(x):
    # valid for x >= 0.5
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    half = t ** ((x + 0.5) / 2.0)
    return _SQRT_2PI * half * math.exp(-t) * half * acc


def gamma_fn(x):
    """Gamma function for real ``x``.

    Negative non-integers go through the reflection formula; non-positive
    integers are poles and raise :class:`DomainError`.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_fn needs a finite argument, got {x}")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma_fn has a pole at {x}")
    if 0 < x <= 60 and 2 * x == math.floor(2 * x):
        return _gamma_half_integer(x)
    if x < 0.5:
        s = math.sin(math.pi * x)
        return math.pi / (s * _lanczos_positive(1.0 - x))
    if x > 171.6:
        raise OverflowError(f"gamma_fn({x}) overflows a double")
    if x <= 12.0:
        return _lanczos_positive(x)
    # upward recurrence from [11, 12): rounding grows linearly, not with log Gamma
    k = math.floor(x) - 11
    y = x - k
    out = _lanczos_positive(y)
    for i in range(k):
        out *= y + i
    return out


def _gamma_half_integer(x):
    # exact products for the arguments that dominate the constants (n/2, n/2p, ...)
    if x == math.floor(x):
        return float(math.factorial(int(x) - 1))
    m = int(x - 0.5)
    num = 1
    for j in range(1, 2 * m, 2):
        num *= j
    return num / 2.0**m * math.sqrt(math.pi)


def rgamma(x):
    """1/Gamma(x), equal to zero at the poles."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / gamma_fn(x)


def _check_dim(n):
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n}")
    return int(n)


def sphere_measure(n):
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    n = _check_dim(n)
    return 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)


def ball_volume(n):
    """Lebesgue measure of the unit ball in R^n."""
    return sphere_measure(n) / _check_dim(n)


def binom_real(a, j):
    """Generalized binomial coefficient a(a-1)...(a-j+1)/j! for integer j >= 0."""
    out = 1.0
    for i in range(j):
        out *= (a - i) / (i + 1)
    return out


def pochhammer(a, k):
    """Rising factorial (a)_k as an array over k = 0..k-1 cumulative products."""
    return np.cumprod(np.concatenate(([1.0], a + np.arange(k - 1))))
