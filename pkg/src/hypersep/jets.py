"""Truncated Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients ``c_0..c_n`` of a function at
a point, so ``f^(k)(z) = k! c_k``. Arithmetic on jets propagates exact
derivatives, which is all the Schwarzian derivative needs.
"""

import math

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def variable(cls, z, order=3):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = z
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order=3):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.size - 1

    def derivative(self, k):
        return self.c[k] * math.factorial(k)

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        return Jet(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return Jet(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        return Jet(np.convolve(self.c, other.c)[: self.c.size])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        a, b = self.c, other.c
        q = np.zeros_like(a)
        for n in range(a.size):
            q[n] = (a[n] - np.dot(b[1 : n + 1], q[n - 1 :: -1][:n])) / b[0] if n else a[0] / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, alpha):
        if isinstance(alpha, int) and alpha >= 0:
            out = Jet.constant(1.0, self.order)
            for _ in range(alpha):
                out = out * self
            return out
        return exp(log(self) * alpha)

    def __repr__(self):
        return f"Jet({self.c.tolist()})"


def exp(x):
    a = x.c
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    for n in range(1, a.size):
        k = np.arange(1, n + 1)
        e[n] = np.dot(k * a[1 : n + 1], e[n - 1 :: -1][:n]) / n
    return Jet(e)


def log(x):
    a = x.c
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for n in range(1, a.size):
        k = np.arange(1, n)
        out[n] = (a[n] - np.dot(k * out[1:n], a[n - 1 : 0 : -1]) / n) / a[0]
    return Jet(out)
