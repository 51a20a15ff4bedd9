"""Truncated second-order jets of array-valued fields at a point.

A :class:`Jet` stores a value ``val`` together with its first derivatives
``d1[i] = d_i val`` and second derivatives ``d2[i, j] = d_i d_j val``.
Derivative axes always lead, value axes trail, so any operation written for
arrays with arbitrary leading batch axes (``einsum('...ij,...jk->...ik')``,
``np.matmul``) can be lifted with :func:`bilinear` or :meth:`Jet.map`.
Missing orders are ``None``; results are truncated to the lowest order
available among the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["Jet", "bilinear", "matmul", "einsum", "inv", "cholesky", "stack"]


@dataclass(frozen=True, eq=False)
class Jet:
    val: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None

    @property
    def order(self) -> int:
        if self.d1 is None:
            return 0
        return 1 if self.d2 is None else 2

    @property
    def shape(self) -> tuple[int, ...]:
        return self.val.shape

    @classmethod
    def constant(cls, val, n: int, order: int = 2) -> Jet:
        val = np.asarray(val)
        d1 = np.zeros((n,) + val.shape, dtype=val.dtype) if order >= 1 else None
        d2 = np.zeros((n, n) + val.shape, dtype=val.dtype) if order >= 2 else None
        return cls(val, d1, d2)

    def truncate(self, order: int) -> Jet:
        if order >= self.order:
            return self
        return Jet(self.val, self.d1 if order >= 1 else None, None)

    def map(self, f: Callable[[np.ndarray], np.ndarray]) -> Jet:
        """Apply a linear map acting on trailing axes."""
        return Jet(f(self.val),
                   None if self.d1 is None else f(self.d1),
                   None if self.d2 is None else f(self.d2))

    def derivative(self) -> Jet:
        """Jet of the gradient; the new (derivative) axis is the first value axis."""
        if self.d1 is None:
            raise ValueError("jet carries no derivatives")
        return Jet(self.d1, self.d2, None)

    def __getitem__(self, idx) -> Jet:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.val[idx],
                   None if self.d1 is None else self.d1[(slice(None),) + idx],
                   None if self.d2 is None else self.d2[(slice(None), slice(None)) + idx])

    def _combine(self, other: Jet, op) -> Jet:
        order = min(self.order, other.order)
        d1 = op(self.d1, other.d1) if order >= 1 else None
        d2 = op(self.d2, other.d2) if order >= 2 else None
        return Jet(op(self.val, other.val), d1, d2)

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._combine(other, np.add)
        return Jet(self.val + other, self.d1, self.d2)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self._combine(other, np.subtract)
        return Jet(self.val - other, self.d1, self.d2)

    def __neg__(self):
        return self.map(np.negative)

    def __mul__(self, scalar):
        if isinstance(scalar, Jet):
            raise TypeError("use bilinear() for products of jets")
        return self.map(lambda a: a * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.map(lambda a: a / scalar)


def bilinear(f: Callable[[np.ndarray, np.ndarray], np.ndarray], a: Jet, b: Jet) -> Jet:
    """Product rule for a bilinear ``f`` that broadcasts over leading axes."""
    order = min(a.order, b.order)
    val = f(a.val, b.val)
    d1 = d2 = None
    if order >= 1:
        d1 = f(a.d1, b.val) + f(a.val, b.d1)
    if order >= 2:
        cross = f(a.d1[:, None], b.d1[None, :])
        d2 = f(a.d2, b.val) + cross + np.swapaxes(cross, 0, 1) + f(a.val, b.d2)
    return Jet(val, d1, d2)


def matmul(a: Jet, b: Jet) -> Jet:
    return bilinear(np.matmul, a, b)


def einsum(spec: str, a: Jet, b: Jet) -> Jet:
    """Bilinear einsum; ``spec`` is written without the leading ellipsis."""
    lhs, out = spec.split("->")
    s1, s2 = lhs.split(",")
    full = f"...{s1},...{s2}->...{out}"
    return bilinear(lambda x, y: np.einsum(full, x, y), a, b)


def inv(a: Jet) -> Jet:
    """Jet of the matrix inverse (trailing two axes)."""
    x = np.linalg.inv(a.val)
    d1 = d2 = None
    if a.order >= 1:
        d1 = -x @ a.d1 @ x
    if a.order >= 2:
        xa = a.d1 @ x  # A_i X
        cross = xa[:, None] @ xa[None, :]  # A_i X A_j X
        d2 = x @ (cross + np.swapaxes(cross, 0, 1) - a.d2 @ x)
    return Jet(x, d1, d2)


def _phi(m: np.ndarray) -> np.ndarray:
    """Lower triangle with halved diagonal."""
    out = np.tril(m)
    idx = np.arange(m.shape[-1])
    out[..., idx, idx] *= 0.5
    return out


def cholesky(a: Jet) -> Jet:
    """Jet of the lower-triangular Cholesky factor ``L`` with ``L L^H = A``."""
    low = np.linalg.cholesky(a.val)
    low_inv = np.linalg.inv(low)
    low_inv_h = np.conj(np.swapaxes(low_inv, -1, -2))
    d1 = d2 = None
    if a.order >= 1:
        xs = low_inv @ a.d1 @ low_inv_h
        d1 = low @ _phi(xs)
    if a.order >= 2:
        ms = low_inv @ d1  # L^{-1} L_j
        ms_h = np.conj(np.swapaxes(ms, -1, -2))
        # d_j X_i = -M_j X_i - X_i M_j^H + L^{-1} A_ij L^{-H}
        dx = (-(ms[None, :] @ xs[:, None]) - xs[:, None] @ ms_h[None, :]
              + low_inv @ a.d2 @ low_inv_h)
        d2 = d1[None, :] @ _phi(xs)[:, None] + low @ _phi(dx)
    return Jet(low, d1, d2)


def stack(jets, axis: int = 0) -> Jet:
    """Stack jets along a new value axis (``axis`` counts value axes only)."""
    order = min(j.order for j in jets)
    val = np.stack([j.val for j in jets], axis=axis)
    d1 = np.stack([j.d1 for j in jets], axis=axis + 1) if order >= 1 else None
    d2 = np.stack([j.d2 for j in jets], axis=axis + 2) if order >= 2 else None
    return Jet(val, d1, d2)
