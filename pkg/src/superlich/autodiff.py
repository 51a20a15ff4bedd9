"""Forward-mode differentiation with nestable dual numbers.

A :class:`Dual` holds a primal part and a tangent part; either may itself be
a :class:`Dual` or a numpy array, so nesting once gives exact second
derivatives.  :func:`ad_jet` seeds all coordinate directions at once by
giving the inner tangent shape ``(1, n)`` and the outer one ``(n, 1)``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

__all__ = ["Dual", "sin", "cos", "exp", "log", "sqrt", "tanh", "ad_jet", "fd_jet"]


class Dual:
    __slots__ = ("a", "b")
    __array_priority__ = 100

    def __init__(self, a, b=0.0):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a + other.a, self.b + other.b)
        return Dual(self.a + other, self.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a * other.a, self.a * other.b + self.b * other.a)
        return Dual(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.reciprocal()
        return Dual(self.a / other, self.b / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        inv = 1.0 / self.a
        return Dual(inv, -self.b * inv * inv)

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(log(self) * p)
        if isinstance(p, int) and p >= 0:
            out = 1.0
            for _ in range(p):
                out = self * out
            return out
        return Dual(self.a ** p, p * self.a ** (p - 1) * self.b)


def _elementary(f, df):
    """Build a Dual-aware version of ``f`` whose derivative is the Dual-aware ``df``."""

    def g(x):
        if isinstance(x, Dual):
            return Dual(g(x.a), df(x.a) * x.b)
        return f(x)

    return g


def _np_or_math(name):
    mf = getattr(math, name)
    nf = getattr(np, name)

    def f(x):
        if isinstance(x, (float, int)):
            return mf(x)
        return nf(x)

    return f


sin = _elementary(_np_or_math("sin"), lambda x: cos(x))
cos = _elementary(_np_or_math("cos"), lambda x: -sin(x))
exp = _elementary(_np_or_math("exp"), lambda x: exp(x))
log = _elementary(_np_or_math("log"), lambda x: 1.0 / x)
sqrt = _elementary(_np_or_math("sqrt"), lambda x: 0.5 / sqrt(x))
tanh = _elementary(_np_or_math("tanh"), lambda x: 1.0 - tanh(x) ** 2)


def _entries(value):
    """Flatten nested lists / object arrays of scalars or Duals."""
    return np.asarray(value, dtype=object)


def _part(d, path):
    for p in path:
        d = getattr(d, p) if isinstance(d, Dual) else (d if p == "a" else 0.0)
    return d


def ad_jet(f: Callable, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of ``f`` at ``x`` by nested forward mode.

    ``f`` maps a length-n sequence to a scalar or a (nested) array of
    scalars. Returns arrays shaped ``S``, ``(n,) + S`` and ``(n, n) + S``.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    eye = np.eye(n)
    args = [
        Dual(Dual(x[k], eye[k][None, :]), Dual(eye[k][:, None], np.zeros((n, n))))
        for k in range(n)
    ]
    out = _entries(f(args))
    shape = out.shape
    val = np.empty(shape, dtype=complex)
    grad = np.empty((n,) + shape, dtype=complex)
    hess = np.empty((n, n) + shape, dtype=complex)
    for idx in np.ndindex(*shape) if shape else [()]:
        d = out[idx]
        val[idx] = _part(d, "aa")
        grad[(slice(None),) + idx] = np.broadcast_to(_part(d, "ab"), (1, n)).reshape(n)
        hess[(slice(None), slice(None)) + idx] = np.broadcast_to(_part(d, "bb"), (n, n))
    return val, grad, hess


def fd_jet(f: Callable, x, step: float = 1e-4) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Central finite-difference counterpart of :func:`ad_jet` (plain floats in)."""
    x = np.asarray(x, dtype=float)
    n = len(x)

    def ev(y):
        return np.asarray(np.asarray(f(list(y)), dtype=object), dtype=complex)

    val = ev(x)
    grad = np.empty((n,) + val.shape, dtype=complex)
    hess = np.empty((n, n) + val.shape, dtype=complex)
    e = np.eye(n) * step
    for i in range(n):
        fp, fm = ev(x + e[i]), ev(x - e[i])
        grad[i] = (fp - fm) / (2 * step)
        hess[i, i] = (fp - 2 * val + fm) / step**2
        for j in range(i):
            d = (ev(x + e[i] + e[j]) - ev(x + e[i] - e[j])
                 - ev(x - e[i] + e[j]) + ev(x - e[i] - e[j])) / (4 * step**2)
            hess[i, j] = hess[j, i] = d
    return val, grad, hess
