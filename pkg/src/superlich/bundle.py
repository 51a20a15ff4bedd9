"""The Clifford module E = S (x) W over a chart and its pointwise data.

S is the spinor space of :func:`~superlich.clifford.build_gammas` and
W = W+ (+) W- a graded twisting space.  Matrices on E use the Kronecker
layout ``kron(spinor, twist)``; the total grading is ``chirality (x) tau_W``.

End_{C(M)} E (endomorphisms supercommuting with the Clifford action) is
reached from End W by the graded embedding m -> 1 (x) m_even + chi (x) m_odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .clifford import CliffordRep, DimensionError, build_gammas
from .fields import TrigField, random_trig_field
from .geometry import ChartGeometry, GeometryJet, clifford_riemann, spinor_connection
from .jets import Jet, einsum

__all__ = ["kron", "CliffordModule", "TwistingConnection", "ModuleJet", "module_jet"]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product over the trailing two axes, broadcasting leading axes."""
    a, b = np.asarray(a), np.asarray(b)
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    shape = out.shape[:-4] + (a.shape[-2] * b.shape[-2], a.shape[-1] * b.shape[-1])
    return out.reshape(shape)


@dataclass(frozen=True, eq=False)
class CliffordModule:
    rep: CliffordRep
    w_plus: int = 1
    w_minus: int = 1

    @classmethod
    def build(cls, n: int, w_plus: int = 1, w_minus: int = 1) -> CliffordModule:
        if w_plus < 0 or w_minus < 0 or w_plus + w_minus == 0:
            raise DimensionError(f"bad twisting ranks ({w_plus}, {w_minus})")
        return cls(build_gammas(n), w_plus, w_minus)

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def w(self) -> int:
        return self.w_plus + self.w_minus

    @property
    def dim(self) -> int:
        return self.rep.dim * self.w

    @cached_property
    def tau_w(self) -> np.ndarray:
        return np.diag([1.0] * self.w_plus + [-1.0] * self.w_minus).astype(complex)

    @cached_property
    def grading(self) -> np.ndarray:
        return kron(self.rep.chirality, self.tau_w)

    @cached_property
    def gammas(self) -> np.ndarray:
        """Orthonormal Clifford generators acting on E."""
        return self.spin(self.rep.gammas)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def spin(self, a: np.ndarray) -> np.ndarray:
        """a (x) 1_W for spinor matrices a (leading axes broadcast)."""
        return kron(a, np.eye(self.w, dtype=complex))

    def twist(self, m: np.ndarray) -> np.ndarray:
        """1_S (x) m for twisting matrices m."""
        return kron(np.eye(self.rep.dim, dtype=complex), m)

    def w_parts(self, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        conj = self.tau_w @ m @ self.tau_w
        return 0.5 * (m + conj), 0.5 * (m - conj)

    def embed(self, m: np.ndarray) -> np.ndarray:
        """Graded embedding End W -> End_{C(M)} E."""
        even, odd = self.w_parts(m)
        return self.twist(even) + kron(self.rep.chirality, odd)

    def clifford_defect(self, a: np.ndarray) -> float:
        """Largest supercommutator of ``a`` with the orthonormal generators.

        Zero exactly when ``a`` (split into parities) lies in End_{C(M)} E.
        """
        g = self.grading
        even = 0.5 * (a + g @ a @ g)
        odd = a - even
        worst = 0.0
        for c in self.gammas:
            comm = (even @ c - c @ even) + (odd @ c + c @ odd)
            worst = max(worst, float(np.max(np.abs(comm))))
        return worst


@dataclass(frozen=True, eq=False)
class TwistingConnection:
    """Grading-preserving connection 1-form on W, omega^W_mu(x) of shape (n, w, w).

    ``field`` is ``None`` for the flat (trivial) connection.
    """

    module: CliffordModule
    field: TrigField | None = None

    @classmethod
    def flat(cls, module: CliffordModule) -> TwistingConnection:
        return cls(module, None)

    @classmethod
    def random(cls, module: CliffordModule, rng: np.random.Generator) -> TwistingConnection:
        raw = random_trig_field(rng, module.n, (module.n, module.w, module.w))
        return cls(module, raw.map(lambda a: module.w_parts(a)[0]))

    def jet(self, x, order: int = 2) -> Jet:
        mod = self.module
        if self.field is None:
            return Jet.constant(np.zeros((mod.n, mod.w, mod.w), complex), mod.n, order)
        return self.field.jet(x, order)


@dataclass(eq=False)
class ModuleJet:
    """Everything pointwise about E at one point ``x``.

    ``clifford``  c(dx^mu) on E, Jet of order 2, shape (n, N, N)
    ``connection`` Omega^E_mu = Omega^S_mu (x) 1 + 1 (x) omega^W_mu, order 1
    """

    module: CliffordModule
    geometry: GeometryJet
    clifford: Jet
    connection: Jet
    twist_connection: Jet

    def __post_init__(self):
        self._products: dict[int, Jet] = {}

    @property
    def n(self) -> int:
        return self.module.n

    @property
    def dim(self) -> int:
        return self.module.dim

    @property
    def x(self) -> np.ndarray:
        return self.geometry.x

    @property
    def grading(self) -> np.ndarray:
        return self.module.grading

    def identity(self) -> np.ndarray:
        return self.module.identity()

    def clifford_products(self, k: int) -> Jet:
        """C^{mu_1..mu_k} = c^{mu_1} ... c^{mu_k}, order 1, shape (n,)*k + (N, N)."""
        if k not in self._products:
            if k == 0:
                self._products[0] = Jet.constant(self.identity(), self.n, 1)
            else:
                prev = self.clifford_products(k - 1)
                c = self.clifford.truncate(1)
                idx = "abcdefgh"[:k - 1]
                self._products[k] = einsum(f"{idx}ij,mjk->{idx}mik", prev, c) if k > 1 else c
        return self._products[k]

    def clifford_riemann(self) -> np.ndarray:
        """c(R)_{mu nu} acting on E (shape (n, n, N, N))."""
        return self.module.spin(clifford_riemann(self.geometry, self.module.rep))


def module_jet(module: CliffordModule, geom: ChartGeometry, twist: TwistingConnection,
               x) -> ModuleJet:
    if geom.n != module.n:
        raise DimensionError(f"module of dimension {module.n} on chart {geom.name!r}")
    gj = geom.jet_at(x)
    c = gj.vielbein.map(lambda h: np.einsum("...ma,aij->...mij", h, module.gammas))
    spin = spinor_connection(gj, module.rep).map(module.spin)
    tw = twist.jet(gj.x, order=2).map(module.twist)
    return ModuleJet(module, gj, c, spin + tw, tw)
