"""Second-order differential operators on sections of E and the decomposition formulas.

A :class:`DiffOp2` is ``s -> a^{mu nu} d_mu d_nu s + b^mu d_mu s + c s`` with
matrix-valued coefficient fields.  Coefficients are produced pointwise as
jets by a callable, so composition can differentiate the inner operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .bundle import ModuleJet
from .fields import TrigField, random_trig_field
from .forms import (
    EndForm,
    beta,
    covariant_one_form,
    curvature,
    d_nabla,
    dot,
    ev_g,
    quantize_form,
)
from .geometry import ChartGeometry
from .jets import Jet, bilinear, einsum
from .superconnection import (
    LocalSuperconnection,
    Superconnection,
    associated_connection,
    cdiff,
    twisting_supercurvature,
    varpi,
)

__all__ = [
    "OperatorError",
    "LocalOp",
    "DiffOp2",
    "ConnectionAt",
    "dirac",
    "dirac_from_connection",
    "superconnection_connection",
    "compose",
    "connection_laplacian",
    "rhs_classical",
    "rhs_connection",
    "rhs_super",
    "rhs_simple_type",
    "pipeline_P",
    "getzler_P",
    "random_sections",
    "apply_local",
    "weak_residual",
]

ConnectionAt = Callable[[np.ndarray], "tuple[ModuleJet, Jet]"]


class OperatorError(ValueError):
    """Unsupported operator composition or inconsistent input."""


@dataclass(frozen=True, eq=False)
class LocalOp:
    """Coefficient jets at one point; ``a`` or ``b`` may be ``None`` (zero)."""

    a: Jet | None
    b: Jet | None
    c: Jet

    def __add__(self, other: LocalOp) -> LocalOp:
        def add(p, q):
            if p is None:
                return q
            return p if q is None else p + q
        return LocalOp(add(self.a, other.a), add(self.b, other.b), self.c + other.c)

    def __neg__(self) -> LocalOp:
        return LocalOp(None if self.a is None else -self.a,
                       None if self.b is None else -self.b, -self.c)


@dataclass(frozen=True, eq=False)
class DiffOp2:
    """Differential operator of order <= 2 given by a pointwise coefficient callable."""

    order: int
    local: Callable[[np.ndarray], LocalOp]

    def at(self, x) -> LocalOp:
        return self.local(np.asarray(x, dtype=float))

    def __add__(self, other: DiffOp2) -> DiffOp2:
        return DiffOp2(max(self.order, other.order), lambda x: self.at(x) + other.at(x))

    def __sub__(self, other: DiffOp2) -> DiffOp2:
        return DiffOp2(max(self.order, other.order), lambda x: self.at(x) + (-other.at(x)))

    def apply(self, section: TrigField, x) -> np.ndarray:
        return apply_local(self.at(x), section.jet(x, order=2))


def apply_local(op: LocalOp, s: Jet) -> np.ndarray:
    """Value of the operator on a section jet (values of shape (N,) or (N, m))."""
    vec = s.val.ndim == 1
    val = s.val[:, None] if vec else s.val
    out = op.c.val @ val
    if op.b is not None:
        d1 = s.d1[..., None] if vec else s.d1
        out = out + np.einsum("mpq,mq...->p...", op.b.val, d1)
    if op.a is not None:
        d2 = s.d2[..., None] if vec else s.d2
        out = out + np.einsum("mnpq,mnq...->p...", op.a.val, d2)
    return out[:, 0] if vec else out


# Dirac operators ----------------------------------------------------------------------

def _first_order(mj: ModuleJet, connection: Jet, extra: Jet | None = None) -> LocalOp:
    c = mj.clifford.truncate(1)
    zero = einsum("mpq,mqr->pr", c, connection)
    return LocalOp(None, c, zero if extra is None else zero + extra)


def dirac(a: Superconnection, geom: ChartGeometry) -> DiffOp2:
    """D_A = c(dx^mu) nabla_mu + c(Abar)."""
    def local(x):
        la = a.at(geom, x)
        return _first_order(la.mj, la.connection, quantize_form(la.abar.truncate(1), la.mj))
    return DiffOp2(1, local)


def dirac_from_connection(connection_at: ConnectionAt) -> DiffOp2:
    """D = c o nabla for an arbitrary connection."""
    def local(x):
        mj, conn = connection_at(x)
        return _first_order(mj, conn.truncate(1))
    return DiffOp2(1, local)


def superconnection_connection(a: Superconnection, geom: ChartGeometry,
                               associated: bool = True) -> ConnectionAt:
    """Pointwise provider of nabla^A (or of the connection part alone)."""
    def at(x):
        la = a.at(geom, x)
        return la.mj, associated_connection(la) if associated else la.connection
    return at


def compose(p: DiffOp2, q: DiffOp2) -> DiffOp2:
    """p o q; the inner operator's coefficients are differentiated once."""
    if p.order + q.order > 2:
        raise OperatorError(f"composite of orders {p.order} and {q.order} exceeds 2")

    def local(x):
        lp = p.at(x)
        lq = lp if q is p else q.at(x)
        mm = lambda u, v: bilinear(np.matmul, u, v)  # noqa: E731
        if p.order == 0:
            return LocalOp(None if lq.a is None else einsum("pq,mnqr->mnpr", lp.c, lq.a),
                           None if lq.b is None else einsum("pq,mqr->mpr", lp.c, lq.b),
                           mm(lp.c, lq.c))
        bp = lp.b
        dc = lq.c.derivative()
        c = einsum("mpq,mqr->pr", bp, dc) + mm(lp.c, lq.c)
        if lp.a is not None:
            # second-order outer operator, zeroth-order inner one
            ddc = dc.derivative()
            a = einsum("mnpq,qr->mnpr", lp.a, lq.c)
            b = 2.0 * einsum("mnpq,mqr->npr", lp.a, dc) + einsum("npq,qr->npr", bp, lq.c)
            return LocalOp(a, b, c + einsum("mnpq,mnqr->pr", lp.a, ddc))
        if q.order == 0 or lq.b is None:
            return LocalOp(None, einsum("mpq,qr->mpr", bp, lq.c), c)
        t = einsum("mpq,nqr->mnpr", bp, lq.b)
        a = t.map(lambda v: 0.5 * (v + np.swapaxes(v, -3, -4)))
        b = (einsum("mpq,mnqr->npr", bp, lq.b.derivative())
             + einsum("npq,qr->npr", bp, lq.c) + einsum("pq,nqr->npr", lp.c, lq.b))
        return LocalOp(a, b, c)

    return DiffOp2(p.order + q.order, local)


def _laplacian(mj: ModuleJet, conn: Jet) -> LocalOp:
    geo = mj.geometry
    eye = mj.identity()
    ginv = geo.inverse.truncate(1)
    gam = geo.christoffel
    a = ginv.map(lambda g: -g[..., None, None] * eye)
    trace = einsum("ml,nml->n", ginv, gam)  # g^{ml} Gamma^n_{ml}
    b = trace.map(lambda t: t[..., None, None] * eye) - 2.0 * einsum("mn,mpq->npq", ginv, conn)
    inner = (conn.derivative()
             + einsum("mpq,nqr->mnpr", conn.truncate(0), conn.truncate(0))
             - einsum("smn,spq->mnpq", gam.truncate(0), conn.truncate(0)))
    c = -einsum("mn,mnpq->pq", ginv.truncate(0), inner)
    return LocalOp(a, b, c)


def connection_laplacian(connection_at: ConnectionAt) -> DiffOp2:
    """-g^{mu nu}(nabla_mu nabla_nu - Gamma^s_{mu nu} nabla_s)."""
    def local(x):
        mj, conn = connection_at(x)
        return _laplacian(mj, conn)
    return DiffOp2(2, local)


def _with_potential(op: LocalOp, potential: Jet) -> LocalOp:
    return LocalOp(op.a, op.b, op.c.truncate(0) + potential.truncate(0))


def _scalar(mj: ModuleJet, value: float) -> Jet:
    return Jet(value * mj.identity())


def rhs_classical(a: Superconnection, geom: ChartGeometry) -> DiffOp2:
    """Laplacian + r/4 + c(R^{E/S}) for a Clifford connection."""
    if a.abar:
        raise OperatorError("classical formula needs a vanishing connection-free part")

    def local(x):
        la = a.at(geom, x)
        mj = la.mj
        twist = curvature(la.connection) - EndForm(mj.n, {2: Jet(mj.clifford_riemann())})
        pot = _scalar(mj, mj.geometry.scalar / 4) + quantize_form(twist, mj).truncate(0)
        return _with_potential(_laplacian(mj, la.connection), pot)

    return DiffOp2(2, local)


def rhs_simple_type(a: Superconnection, geom: ChartGeometry) -> DiffOp2:
    """Classical terms plus c nabla^{End}(Phi) + Phi^2 for A = nabla + Phi."""
    if set(a.abar) - {0}:
        raise OperatorError("simple type allows only a degree-0 connection-free part")
    base = rhs_classical(a.with_abar({}), geom)

    def local(x):
        op = base.at(x)
        if not a.abar:
            return op
        la = a.at(geom, x)
        phi = la.abar.part(0)
        extra = quantize_form(d_nabla(phi, la.connection), la.mj)
        sq = einsum("pq,qr->pr", phi.coeffs(0), phi.coeffs(0))
        return _with_potential(op, extra.truncate(0) + sq.truncate(0))

    return DiffOp2(2, local)


def rhs_connection(connection_at: ConnectionAt) -> DiffOp2:
    """Laplacian of nabla + varpi, plus c(R), ev_g nabla varpi and ev_g(varpi . varpi)."""
    def local(x):
        mj, conn = connection_at(x)
        w = varpi(conn, mj)
        lap = _laplacian(mj, conn.truncate(1) + w)
        pot = (quantize_form(curvature(conn.truncate(1)), mj)
               + ev_g(covariant_one_form(w, conn.truncate(1), mj), mj)
               + ev_g(dot(w, w), mj))
        return _with_potential(lap, pot)

    return DiffOp2(2, local)


def pipeline_P(la: LocalSuperconnection) -> Jet:
    """P(Abar) = c(Abar)^2 - c(Abar^2) + ev_g(beta . beta)."""
    b = beta(la.abar.truncate(0), la.mj)
    return cdiff(la) + ev_g(dot(b, b), la.mj).truncate(0)


def rhs_super(a: Superconnection, geom: ChartGeometry) -> DiffOp2:
    """Laplacian of A_[1] + beta(Abar), plus r/4, c(F^{E/S}) and P(Abar)."""
    def local(x):
        la = a.at(geom, x)
        mj = la.mj
        b = beta(la.abar.truncate(1), mj)
        lap = _laplacian(mj, la.connection + b)
        pot = (_scalar(mj, mj.geometry.scalar / 4)
               + quantize_form(twisting_supercurvature(la), mj).truncate(0)
               + pipeline_P(la))
        return _with_potential(lap, pot)

    return DiffOp2(2, local)


def getzler_P(la: LocalSuperconnection) -> np.ndarray:
    """Closed form 2 g^{ij} c(dx^k ^ dx^l) w_ik w_jl - g^{ij} g^{kl} w_ik w_jl."""
    if set(la.abar.degrees) - {0, 2}:
        raise OperatorError("closed form needs A_[i] = 0 for i > 2")
    if 2 not in la.abar.parts:
        return np.zeros((la.mj.dim, la.mj.dim), complex)
    w = la.abar.value(2)
    ginv = la.mj.geometry.inverse.val
    cc = la.mj.clifford_products(2).val
    ckl = cc + ginv[:, :, None, None] * la.mj.identity()
    ww = np.einsum("ikpq,jlqr->ijklpr", w, w)
    first = 2 * np.einsum("ij,klpq,ijklqr->pr", ginv, ckl, ww)
    second = np.einsum("ij,kl,ijklpr->pr", ginv, ginv, ww)
    return first - second


# weak comparison ---------------------------------------------------------------------

def random_sections(n: int, dim: int, count: int, seed: int) -> list[TrigField]:
    """Seeded complex trigonometric test sections of E."""
    rng = np.random.default_rng(seed)
    return [random_trig_field(rng, n, (dim,)) for _ in range(count)]


def weak_residual(p: DiffOp2, q: DiffOp2, sections: Iterable[TrigField],
                  points: Iterable) -> float:
    """max |(p - q) s (x)| / (1 + |s| + |ds| + |d^2 s|) over sections and points."""
    sections = list(sections)
    worst = 0.0
    for x in points:
        lp, lq = p.at(x), q.at(x)
        for s in sections:
            sj = s.jet(x, order=2)
            diff = apply_local(lp, sj) - apply_local(lq, sj)
            norm = 1.0 + sum(float(np.linalg.norm(v)) for v in (sj.val, sj.d1, sj.d2))
            worst = max(worst, float(np.linalg.norm(diff)) / norm)
    return worst
