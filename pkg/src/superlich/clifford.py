"""Complex Clifford algebra of a Euclidean space, with the quantisation map.

Convention: ``v*w + w*v = -2 g(v, w)``, so orthonormal generators square
to ``-Id`` and are anti-Hermitian in the representation built here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping

import numpy as np

__all__ = [
    "DimensionError",
    "ParityError",
    "CliffordRep",
    "Multivector",
    "build_gammas",
    "quantize",
    "c2",
    "parity",
    "split_parity",
    "supercommutator",
]

MAX_DIM = 8

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class DimensionError(ValueError):
    """Raised for unsupported or mismatched dimensions."""


class ParityError(ValueError):
    """Raised when a matrix is not homogeneous for the grading in use."""


def _kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors)


@dataclass(frozen=True, eq=False)
class CliffordRep:
    """Irreducible complex representation of Cl(n), n even.

    ``gammas[a]`` is the image of the a-th orthonormal covector and
    ``chirality`` the grading operator on the spinor space.
    """

    n: int
    gammas: np.ndarray
    chirality: np.ndarray

    @property
    def dim(self) -> int:
        return self.gammas.shape[-1]

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def clifford(self, covector) -> np.ndarray:
        """Clifford action of a covector given by orthonormal-frame components."""
        v = np.asarray(covector)
        if v.shape != (self.n,):
            raise DimensionError(f"covector of shape {v.shape} for n={self.n}")
        return np.tensordot(v, self.gammas, axes=1)

    def blade(self, indices) -> np.ndarray:
        """Product gamma^{a1} ... gamma^{ak} (empty product is the identity)."""
        out = self.identity()
        for a in indices:
            out = out @ self.gammas[a]
        return out


def build_gammas(n: int) -> CliffordRep:
    """Iterated tensor-product (Jordan-Wigner) gamma matrices for even ``n``."""
    if not isinstance(n, (int, np.integer)) or n % 2 or not 2 <= n <= MAX_DIM:
        raise DimensionError(f"need an even dimension 2 <= n <= {MAX_DIM}, got {n!r}")
    m = n // 2
    gammas = []
    for k in range(m):
        for pauli in (_X, _Y):
            factors = [_Z] * k + [pauli] + [_I2] * (m - k - 1)
            gammas.append(1j * _kron_all(factors))
    gammas = np.array(gammas)
    # (-i)^{n/2} gamma^1...gamma^n squares to +Id
    vol = reduce(np.matmul, gammas)
    chirality = (-1j) ** m * vol
    return CliffordRep(n=n, gammas=gammas, chirality=chirality)


def _merge_blades(left: tuple[int, ...], right: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted index tuple of e^left ^ e^right (sign 0 if they overlap)."""
    if set(left) & set(right):
        return 0, ()
    seq = list(left + right)
    sign = 1
    # bubble sort, counting transpositions
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


@dataclass(frozen=True)
class Multivector:
    """Element of the exterior algebra of C^n in an orthonormal frame.

    ``coeffs`` maps strictly increasing 0-based index tuples to scalars.
    """

    n: int
    coeffs: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for blade, value in self.coeffs.items():
            blade = tuple(int(a) for a in blade)
            if any(b <= a for a, b in zip(blade, blade[1:])):
                raise ValueError(f"blade {blade} is not strictly increasing")
            if any(not 0 <= a < self.n for a in blade):
                raise DimensionError(f"blade {blade} out of range for n={self.n}")
            if value != 0:
                clean[blade] = complex(value)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def scalar(cls, n: int, value: complex = 1.0) -> Multivector:
        return cls(n, {(): value})

    @classmethod
    def vector(cls, components) -> Multivector:
        comps = np.asarray(components)
        return cls(len(comps), {(a,): c for a, c in enumerate(comps)})

    @classmethod
    def basis(cls, n: int, *indices: int) -> Multivector:
        """e^{i1} ^ ... ^ e^{ik} in any index order."""
        sign, blade = 1, ()
        for a in indices:
            s, blade = _merge_blades(blade, (a,))
            if not s:
                return cls(n)
            sign *= s
        return cls(n, {blade: sign})

    def _check(self, other: Multivector):
        if self.n != other.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: Multivector) -> Multivector:
        self._check(other)
        out = dict(self.coeffs)
        for blade, value in other.coeffs.items():
            out[blade] = out.get(blade, 0) + value
        return Multivector(self.n, out)

    def __sub__(self, other: Multivector) -> Multivector:
        return self + (-1) * other

    def __rmul__(self, scalar) -> Multivector:
        return Multivector(self.n, {b: scalar * v for b, v in self.coeffs.items()})

    def wedge(self, other: Multivector) -> Multivector:
        self._check(other)
        out: dict[tuple[int, ...], complex] = {}
        for b1, v1 in self.coeffs.items():
            for b2, v2 in other.coeffs.items():
                sign, blade = _merge_blades(b1, b2)
                if sign:
                    out[blade] = out.get(blade, 0) + sign * v1 * v2
        return Multivector(self.n, out)

    def grades(self) -> set[int]:
        return {len(b) for b in self.coeffs}


def quantize(v: Multivector, rep: CliffordRep) -> np.ndarray:
    """Quantisation map: e^{a1}^...^e^{ak} -> gamma^{a1}...gamma^{ak}, extended linearly."""
    if v.n != rep.n:
        raise DimensionError(f"multivector of dimension {v.n} for rep of dimension {rep.n}")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for blade, value in v.coeffs.items():
        out += value * rep.blade(blade)
    return out


def c2(v, w, rep: CliffordRep) -> np.ndarray:
    """c(v) c(w) for covectors in orthonormal components."""
    return rep.clifford(v) @ rep.clifford(w)


def split_parity(a: np.ndarray, grading: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd parts of ``a`` with respect to an involution ``grading``.

    Works on stacks of matrices (trailing two axes).
    """
    conj = grading @ a @ grading
    return 0.5 * (a + conj), 0.5 * (a - conj)


def parity(a: np.ndarray, grading: np.ndarray, atol: float = 1e-12) -> int:
    """0 for even, 1 for odd; raises ParityError for mixed matrices."""
    even, odd = split_parity(a, grading)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(odd), initial=0.0) <= atol * scale:
        return 0
    if np.max(np.abs(even), initial=0.0) <= atol * scale:
        return 1
    raise ParityError("matrix is not parity-homogeneous")


def supercommutator(a: np.ndarray, b: np.ndarray, pa: int | None = None,
                    pb: int | None = None, grading: np.ndarray | None = None) -> np.ndarray:
    """[a, b] = ab - (-1)^{|a||b|} ba.

    Parities are taken from ``pa``/``pb`` when given, otherwise inferred
    from ``grading``.
    """
    if pa is None or pb is None:
        if grading is None:
            raise ParityError("parities not given and no grading to infer them from")
        pa = parity(a, grading) if pa is None else pa
        pb = parity(b, grading) if pb is None else pb
    sign = -1.0 if (pa * pb) % 2 else 1.0
    return a @ b - sign * (b @ a)
