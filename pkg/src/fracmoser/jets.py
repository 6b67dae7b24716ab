"""Truncated Taylor arithmetic ("jets") for exact radial derivatives.

A :class:`Jet` of order K stores the normalized Taylor coefficients
``c[k] = f^(k)(r0) / k!`` for k = 0..K at a batch of base points. Profile
segments are written once as ordinary expressions in a jet variable and
every derivative the fractional-Laplacian code needs falls out of the same
expression.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def variable(cls, x0, order):
        """Identity jet ``x0 + dx`` of the given order."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order, shape=()):
        c = np.zeros((order + 1,) + np.shape(np.broadcast_to(value, shape)))
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivatives(self):
        """Array of f^(k)(r0) for k = 0..order."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def derivative(self):
        """Jet of f' (one order lower)."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    def truncate(self, order):
        return Jet(self.c[: order + 1])

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        out = np.zeros_like(self.c)
        out[0] = other
        return Jet(out)

    def __neg__(self):
        return Jet(-self.c)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c)
        c = self.c.copy()
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self.c, other.c
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(self.order + 1):
            for j in range(k + 1):
                out[k] += a[j] * b[k - j]
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc += a[j] * out[k - j]
            out[k] = -acc / a[0]
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def exp(self):
        a = self.c
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc += j * a[j] * out[k - j]
            out[k] = acc / k
        return Jet(out)

    def log(self):
        a = self.c
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k):
                acc += j * out[j] * a[k - j]
            out[k] = (a[k] - acc / k) / a[0]
        return Jet(out)

    def __pow__(self, alpha):
        if float(alpha).is_integer() and 0 <= alpha <= 8:
            out = Jet.constant(1.0, self.order, self.c.shape[1:])
            for _ in range(int(alpha)):
                out = out * self
            return out
        a = self.c
        out = np.zeros_like(a)
        out[0] = a[0] ** alpha
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc += (alpha * j - (k - j)) * a[j] * out[k - j]
            out[k] = acc / (k * a[0])
        return Jet(out)

    def where(self, mask, other):
        """Elementwise select: ``self`` where mask holds, else ``other``."""
        other = self._lift(other) if not isinstance(other, Jet) else other
        return Jet(np.where(mask, self.c, other.c))

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.c.shape[1:]})"


_EDGE = 1.0 / 740.0  # exp(-1/x) underflows to zero below this


def smooth_bump(x):
    """Jet (or array) of B(x) = w(x) / (w(x) + w(1 - x)), w(x) = exp(-1/x).

    B is 0 for x <= 0 and 1 for x >= 1, and every derivative vanishes there.
    """
    if not isinstance(x, Jet):
        return smooth_bump(Jet(np.asarray(x, dtype=float)[None])).value
    x0 = x.value
    low = x0 <= _EDGE
    high = x0 >= 1.0 - _EDGE
    inside = ~(low | high)
    xs = x.where(inside, 0.5)
    w = 1.0 / xs - 1.0 / (1.0 - xs)
    pos = w.value > 0
    sign = np.where(pos, 1.0, -1.0)
    q = (w * (-sign)).exp()
    r = q / (q + 1.0)
    b = r.where(pos, 1.0 - r)
    zero = Jet(np.zeros_like(x.c))
    one = zero + 1.0
    return b.where(inside, one.where(high, zero))


def phi_cut(t):
    """Cutoff equal to 1 on [0, 1] and 0 on [2, inf)."""
    if not isinstance(t, Jet):
        return phi_cut(Jet(np.asarray(t, dtype=float)[None])).value
    return smooth_bump(2.0 - abs_jet(t))


def eta_cut(t):
    """Cutoff equal to 1 on [0, 3/4] and 0 on [1, inf)."""
    if not isinstance(t, Jet):
        return eta_cut(Jet(np.asarray(t, dtype=float)[None])).value
    return smooth_bump(4.0 * (1.0 - abs_jet(t)))


def abs_jet(x):
    sign = np.where(x.value < 0, -1.0, 1.0)
    return x * sign
