"""Clifford superconnections on E = S (x) W and their canonical companions.

A :class:`Superconnection` is a field-level description: the connection part
is the spin connection tensored with a twisting connection on W, the
connection-free part is a set of seeded trigonometric form fields A_[i]
(i != 1) with values in End_{C(M)} E, each odd for the total grading.
:meth:`Superconnection.at` evaluates everything as jets at a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import CliffordModule, ModuleJet, TwistingConnection, module_jet
from .fields import TrigField, random_trig_field
from .forms import (
    EndForm,
    antisymmetrize,
    beta,
    curvature,
    covariant_one_form,
    d_nabla,
    dot,
    ev_g,
    quantize_form,
    supercommutator_forms,
    wedge,
)
from .geometry import ChartGeometry
from .jets import Jet, einsum

__all__ = [
    "SuperconnectionError",
    "random_form_field",
    "Superconnection",
    "LocalSuperconnection",
    "PerturbedConnection",
    "supercurvature",
    "supercurvature_expansion",
    "cdiff",
    "cdiff_pairs",
    "cdiff_eq24",
    "gamma_canonical",
    "g_projection",
    "associated_connection",
    "varpi",
    "twisting_supercurvature",
    "lemma33_rhs",
    "curvature_comparison_sides",
]


class SuperconnectionError(ValueError):
    """Invalid superconnection data."""


def random_form_field(module: CliffordModule, degree: int, rng: np.random.Generator,
                      scale: float = 1.0) -> TrigField:
    """Random total-odd End_{C(M)}E-valued form field of a single degree.

    Even degrees carry odd End W values, odd degrees even ones.
    """
    n, w = module.n, module.w
    raw = random_trig_field(rng, n, (n,) * degree + (w, w))

    def shape(a):
        a = antisymmetrize(a, degree, lead=1)
        even, odd = module.w_parts(a)
        return scale * module.embed(odd if degree % 2 == 0 else even)

    return raw.map(shape)


@dataclass(frozen=True, eq=False)
class Superconnection:
    module: CliffordModule
    twist: TwistingConnection
    abar: dict[int, TrigField] = field(default_factory=dict)

    def __post_init__(self):
        for k in self.abar:
            if k == 1 or not 0 <= k <= self.module.n:
                raise SuperconnectionError(f"connection-free part of degree {k}")

    @classmethod
    def random(cls, module: CliffordModule, twist: TwistingConnection, degrees,
               rng: np.random.Generator) -> Superconnection:
        return cls(module, twist, {k: random_form_field(module, k, rng) for k in degrees})

    def with_abar(self, abar: dict[int, TrigField]) -> Superconnection:
        return Superconnection(self.module, self.twist, abar)

    def at(self, geom: ChartGeometry, x) -> LocalSuperconnection:
        mj = module_jet(self.module, geom, self.twist, x)
        parts = {k: f.jet(mj.x, order=1) for k, f in self.abar.items()}
        return LocalSuperconnection(mj, mj.connection, EndForm(self.module.n, parts))


@dataclass(frozen=True, eq=False)
class LocalSuperconnection:
    mj: ModuleJet
    connection: Jet  # Omega_mu of A_[1], order 1
    abar: EndForm  # order 1

    @property
    def n(self) -> int:
        return self.mj.n


@dataclass(frozen=True, eq=False)
class PerturbedConnection:
    """A grading-preserving connection nabla^E + theta, generally not Clifford."""

    module: CliffordModule
    twist: TwistingConnection
    theta: TrigField | None

    @classmethod
    def random(cls, module: CliffordModule, twist: TwistingConnection,
               rng: np.random.Generator) -> PerturbedConnection:
        raw = random_trig_field(rng, module.n, (module.n, module.dim, module.dim))
        g = module.grading
        return cls(module, twist, raw.map(lambda a: 0.5 * (a + g @ a @ g)))

    def at(self, geom: ChartGeometry, x) -> tuple[ModuleJet, Jet]:
        mj = module_jet(self.module, geom, self.twist, x)
        if self.theta is None:
            return mj, mj.connection
        return mj, mj.connection + self.theta.jet(mj.x, order=2)

    def provider(self, geom: ChartGeometry):
        """Callable x -> (module jet, connection coefficients) on ``geom``."""
        return lambda x: self.at(geom, x)


# curvature ----------------------------------------------------------------------------

def supercurvature(a: LocalSuperconnection) -> EndForm:
    """F(A) = R^{nabla} + d^{nabla} Abar + Abar^2."""
    g = a.mj.grading
    flat = a.abar.truncate(0)
    return curvature(a.connection) + d_nabla(a.abar, a.connection) + wedge(flat, flat, g)


def supercurvature_expansion(a: LocalSuperconnection) -> dict[int, EndForm]:
    """Degree-by-degree sums of supercommutators [A_[j], A_[k]], j <= k, j + k = i.

    A_[1]^2 is the curvature of the connection part and [A_[1], A_[k]] is
    d^{nabla} A_[k]; the remaining pairs are graded products of forms.
    """
    g = a.mj.grading
    pieces = {k: a.abar.part(k) for k in a.abar.degrees}
    out: dict[int, EndForm] = {}

    def add(i, form):
        out[i] = out[i] + form if i in out else form

    add(2, curvature(a.connection))
    for k, p in pieces.items():
        add(k + 1, d_nabla(p, a.connection))
    keys = sorted(pieces)
    for ix, j in enumerate(keys):
        for k in keys[ix:]:
            if j + k > a.n:
                continue
            if j == k:
                add(j + k, wedge(pieces[j], pieces[j], g))
            else:
                add(j + k, supercommutator_forms(pieces[j], pieces[k], g))
    return {i: f.part(i) for i, f in sorted(out.items()) if i <= a.n}


def twisting_supercurvature(a: LocalSuperconnection) -> EndForm:
    """F(A)^{E/S} = F(A) - c(R)."""
    cr = a.mj.clifford_riemann()
    return supercurvature(a) - EndForm(a.n, {2: Jet(cr)})


# quantised differences ---------------------------------------------------------------

def cdiff(a: LocalSuperconnection) -> Jet:
    """c(Abar)^2 - c(Abar^2), values only (a jet of order 0)."""
    flat = a.abar.truncate(0)
    q = quantize_form(flat, a.mj)
    sq = wedge(flat, flat, a.mj.grading)
    return einsum("pq,qr->pr", q, q) - quantize_form(sq, a.mj)


def cdiff_pairs(a: LocalSuperconnection) -> np.ndarray:
    """sum_{i, j >= 2} (c(A_i) c(A_j) - c(A_i A_j)), values only."""
    mj, g = a.mj, a.mj.grading
    total = np.zeros((mj.dim, mj.dim), complex)
    keys = [k for k in a.abar.degrees if k >= 2]
    for i in keys:
        ci = quantize_form(a.abar.part(i), mj).val
        for j in keys:
            cj = quantize_form(a.abar.part(j), mj).val
            prod = wedge(a.abar.part(i), a.abar.part(j), g)
            total += ci @ cj - quantize_form(prod, mj).val
    return total


def cdiff_eq24(a: LocalSuperconnection) -> np.ndarray:
    """The four-dimensional term list: sum_i c(A_i)^2 - c(A_2^2) + odd anticommutators."""
    mj = a.mj
    if a.n != 4:
        raise SuperconnectionError("the expanded term list is four-dimensional")
    zero = np.zeros((mj.dim, mj.dim), complex)
    c = {k: (quantize_form(a.abar.part(k), mj).val if k in a.abar.parts else zero)
         for k in (2, 3, 4)}
    a2 = a.abar.part(2)
    c22 = quantize_form(wedge(a2, a2, mj.grading), mj).val if a2.parts else zero

    def anti(x, y):
        return x @ y + y @ x

    return (sum(c[k] @ c[k] for k in (2, 3, 4)) - c22
            + anti(c[2], c[3]) + anti(c[2], c[4]) + anti(c[3], c[4]))


# canonical constructions --------------------------------------------------------------

def gamma_canonical(mj: ModuleJet) -> Jet:
    """gamma_mu = -(1/n) g_{mu nu} c(dx^nu), jet of order 2."""
    return einsum("mn,npq->mpq", mj.geometry.metric, mj.clifford) * (-1.0 / mj.n)


def g_projection(alpha: EndForm, mj: ModuleJet) -> Jet:
    """g(alpha)_mu = gamma_mu c(alpha)."""
    return einsum("mpq,qr->mpr", gamma_canonical(mj), quantize_form(alpha, mj))


def associated_connection(a: LocalSuperconnection) -> Jet:
    """Coefficients of nabla^A = nabla^E + g(Abar)."""
    return a.connection + g_projection(a.abar, a.mj)


def varpi(connection: Jet, mj: ModuleJet) -> Jet:
    """Deviation one-form of a connection from being Clifford (jet of order 1)."""
    c = mj.clifford
    gam = mj.geometry.christoffel
    c1 = c.truncate(1)
    k = (c.derivative()
         + einsum("mpq,kqr->mkpr", connection, c1)
         - einsum("kpq,mqr->mkpr", c1, connection)
         + einsum("ksm,spq->mkpq", gam, c1))
    inner = einsum("mpq,mkqr->kpr", c1, k)
    return einsum("nk,kpr->npr", mj.geometry.metric, inner) * -0.5


def _graded_bracket(a: np.ndarray, b: np.ndarray, grading: np.ndarray, pb: int) -> np.ndarray:
    """Supercommutator [a, b] for b of parity ``pb`` and a of any parity."""
    even = 0.5 * (a + grading @ a @ grading)
    odd = a - even
    sign = -1.0 if pb else 1.0
    return (even @ b - b @ even) + (odd @ b - sign * b @ odd)


def lemma33_rhs(alpha: EndForm, mj: ModuleJet) -> np.ndarray:
    """g(alpha) - 1/2 g_{s nu} dx^s (x) c(dx^mu)[g(alpha)_mu, c(dx^nu)], values only."""
    g = g_projection(alpha, mj).val
    c = mj.clifford.val
    metric = mj.geometry.metric.val
    grading = mj.grading
    out = g.copy()
    for nu in range(mj.n):
        acc = sum(c[m] @ _graded_bracket(g[m], c[nu], grading, 1) for m in range(mj.n))
        out = out - 0.5 * metric[:, nu, None, None] * acc[None]
    return out


def curvature_comparison_sides(a: LocalSuperconnection) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the curvature comparison between nabla^A and F(A)."""
    mj = a.mj
    nabla_a = associated_connection(a)
    lhs = quantize_form(curvature(nabla_a) - supercurvature(a), mj).val
    gp = g_projection(a.abar, mj)
    b = beta(a.abar, mj)
    diff = covariant_one_form(gp - b, a.connection, mj)
    rhs = (cdiff(a).val + ev_g(diff, mj).val + 2 * ev_g(dot(b, gp), mj).val
           - ev_g(dot(gp, gp), mj).val)
    return lhs, rhs

