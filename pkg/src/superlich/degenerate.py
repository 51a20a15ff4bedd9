"""Degenerate Clifford action on Lambda H* (x) S_V for a split covector space H* (+) V*.

Horizontal covectors act by exterior multiplication, vertical ones by
Clifford multiplication.  Both factors are graded (form degree on the left,
chirality on the right), so the vertical action carries the Koszul sign
(-1)^{deg} on the exterior factor; this makes horizontal and vertical
actions anticommute.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .clifford import CliffordRep, DimensionError, build_gammas

__all__ = ["SplitSpace", "exterior_operators", "m0", "m0_quantize_restricted"]

_Z = np.diag([1.0, -1.0]).astype(complex)
_RAISE = np.array([[0, 0], [1, 0]], dtype=complex)  # |0> -> |1>: the covector is added


def exterior_operators(h: int) -> np.ndarray:
    """Left exterior multiplication by e^1..e^h on Lambda C^h (occupation basis)."""
    if h < 0:
        raise DimensionError(f"negative horizontal dimension {h}")
    if h == 0:
        return np.zeros((0, 1, 1), dtype=complex)
    ops = []
    for k in range(h):
        factors = [_Z] * k + [_RAISE] + [np.eye(2, dtype=complex)] * (h - k - 1)
        ops.append(reduce(np.kron, factors))
    return np.array(ops)


@dataclass(frozen=True, eq=False)
class SplitSpace:
    """T* = H* (+) V* with a metric on V* only."""

    h: int
    v: int
    vertical_metric: np.ndarray | None = None

    def __post_init__(self):
        if self.h < 0:
            raise DimensionError(f"negative horizontal dimension {self.h}")
        if self.vertical_metric is not None:
            g = np.asarray(self.vertical_metric, dtype=float)
            if g.shape != (self.v, self.v):
                raise DimensionError(f"vertical metric of shape {g.shape} for v={self.v}")
            object.__setattr__(self, "vertical_metric", g)

    @cached_property
    def vertical_rep(self) -> CliffordRep:
        return build_gammas(self.v)

    @cached_property
    def exterior(self) -> np.ndarray:
        return exterior_operators(self.h)

    @cached_property
    def form_grading(self) -> np.ndarray:
        return reduce(np.kron, [_Z] * self.h, np.eye(1, dtype=complex))

    @cached_property
    def grading(self) -> np.ndarray:
        return np.kron(self.form_grading, self.vertical_rep.chirality)

    @cached_property
    def vertical_gammas(self) -> np.ndarray:
        """c(e^i) for the coordinate basis of V*, respecting the vertical metric."""
        gam = self.vertical_rep.gammas
        if self.vertical_metric is None:
            return gam
        frame = np.linalg.cholesky(np.linalg.inv(self.vertical_metric))
        return np.einsum("ia,ajk->ijk", frame, gam)

    @property
    def dim(self) -> int:
        return 2 ** self.h * self.vertical_rep.dim

    def metric(self) -> np.ndarray:
        """The degenerate metric g0 on H* (+) V* (zero on the horizontal block)."""
        g = np.zeros((self.h + self.v,) * 2)
        vm = np.eye(self.v) if self.vertical_metric is None else np.linalg.inv(
            self.vertical_metric)
        g[self.h:, self.h:] = vm
        return g

    def split(self, a) -> tuple[np.ndarray, np.ndarray]:
        a = np.asarray(a)
        if a.shape != (self.h + self.v,):
            raise DimensionError(f"covector of shape {a.shape} for {self.h}+{self.v}")
        return a[:self.h], a[self.h:]


def _horizontal(a_h: np.ndarray, space: SplitSpace) -> np.ndarray:
    eps = np.tensordot(a_h, space.exterior, axes=1) if space.h else np.zeros((1, 1), complex)
    return np.kron(eps, space.vertical_rep.identity())


def _vertical(a_v: np.ndarray, space: SplitSpace) -> np.ndarray:
    return np.kron(space.form_grading, np.tensordot(a_v, space.vertical_gammas, axes=1))


def m0(a, space: SplitSpace) -> np.ndarray:
    """Action of a covector a = a_H + a_V on Lambda H* (x) S_V."""
    a_h, a_v = space.split(a)
    return _horizontal(a_h, space) + _vertical(a_v, space)


def m0_quantize_restricted(a, space: SplitSpace) -> np.ndarray:
    """epsilon (x) 1 + 1 (x) c on degree-one input, summed over the two blocks."""
    a_h, a_v = space.split(a)
    out = np.zeros((space.dim, space.dim), complex)
    if np.any(a_h):
        out = out + _horizontal(a_h, space)
    if np.any(a_v):
        out = out + _vertical(a_v, space)
    return out
