"""Residual evaluators for every bundled identity.

Each check takes a :class:`Sample` (one seeded draw of geometry, module,
twisting connection, superconnection, test sections and points) and returns
the largest residual it observed.  The runner in :mod:`superlich.suite`
maps identity ids to these functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bundle import CliffordModule, ModuleJet, TwistingConnection, module_jet
from .degenerate import SplitSpace, m0, m0_quantize_restricted
from .dirac import (
    compose,
    dirac,
    dirac_from_connection,
    getzler_P,
    pipeline_P,
    rhs_classical,
    rhs_connection,
    rhs_simple_type,
    rhs_super,
    superconnection_connection,
    weak_residual,
)
from .fields import TrigField, random_trig_field
from .forms import (
    EndForm,
    antisymmetrize,
    beta,
    c2_tensor,
    covariant_one_form,
    d_nabla,
    dot,
    ev_g,
    quantize_form,
    wedge,
)
from .geometry import ChartGeometry
from .superconnection import (
    PerturbedConnection,
    Superconnection,
    associated_connection,
    cdiff,
    cdiff_eq24,
    cdiff_pairs,
    curvature_comparison_sides,
    g_projection,
    gamma_canonical,
    lemma33_rhs,
    random_form_field,
    supercurvature,
    varpi,
)

__all__ = [
    "Sample",
    "random_end_form",
    "random_section_form",
    "frame_quantize",
    "apply_superconnection",
    "CHECKS",
]


@dataclass(frozen=True, eq=False)
class Sample:
    geometry: ChartGeometry
    module: CliffordModule
    twist: TwistingConnection
    superconnection: Superconnection
    sections: list
    points: np.ndarray
    rng: np.random.Generator

    def local(self, x):
        return self.superconnection.at(self.geometry, x)

    def module_jet(self, x) -> ModuleJet:
        return module_jet(self.module, self.geometry, self.twist, x)


def _max(arr) -> float:
    return float(np.max(np.abs(arr))) if np.size(arr) else 0.0


# random data ---------------------------------------------------------------------------

def random_end_form(module: CliffordModule, degrees, rng: np.random.Generator) -> dict[int, TrigField]:
    """Unconstrained End(E)-valued form fields, one per degree."""
    n, dim = module.n, module.dim
    return {k: random_trig_field(rng, n, (n,) * k + (dim, dim)).map(
        lambda a, k=k: antisymmetrize(a, k, lead=1)) for k in degrees}


def random_section_form(module: CliffordModule, degrees, rng: np.random.Generator,
                        columns: int = 1) -> dict[int, TrigField]:
    """E-valued form fields with ``columns`` probe columns."""
    n, dim = module.n, module.dim
    return {k: random_trig_field(rng, n, (n,) * k + (dim, columns)).map(
        lambda a, k=k: antisymmetrize(a, k, lead=1)) for k in degrees}


def _evaluate(fields: dict[int, TrigField], n: int, x, order: int) -> EndForm:
    return EndForm(n, {k: f.jet(x, order=order) for k, f in fields.items()})


def _random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


# oracles -------------------------------------------------------------------------------

def frame_quantize(alpha: EndForm, mj: ModuleJet, rotation: np.ndarray) -> np.ndarray:
    """c(alpha) in the rotated orthonormal coframe e'^a = Q_ab e^b.

    Sums alpha(e'_{a1}, .., e'_{ak}) c(e'^{a1}) ... c(e'^{ak}) over increasing
    multi-indices, so no 1/k! bookkeeping and no coordinate Clifford products.
    """
    frame = mj.geometry.vielbein.val @ rotation.T  # columns: e'_a in coordinates
    gam = np.einsum("ab,bpq->apq", rotation, mj.module.gammas)
    out = np.zeros((mj.dim, mj.dim), complex)
    for k, j in alpha.parts.items():
        coeff = j.val
        for i in range(k):
            coeff = np.moveaxis(np.tensordot(frame, coeff, axes=([0], [i])), 0, i)
        for idx in combinations(range(mj.n), k):
            prod = np.eye(mj.dim, dtype=complex)
            for a in idx:
                prod = prod @ gam[a]
            out += prod @ coeff[idx]
    return out


def apply_superconnection(la, sigma: EndForm) -> EndForm:
    """A sigma = d^nabla sigma + Abar sigma on E-valued forms."""
    return d_nabla(sigma, la.connection, section=True) + wedge(la.abar, sigma, la.mj.grading)


# checks --------------------------------------------------------------------------------

def check_clifford_relations(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        mj = s.module_jet(x)
        c = mj.clifford.val
        anti = np.einsum("mpq,nqr->mnpr", c, c)
        anti = anti + np.swapaxes(anti, 0, 1)
        target = -2 * mj.geometry.inverse.val[:, :, None, None] * mj.identity()
        worst = max(worst, _max(anti - target), _max(s.module.grading @ c + c @ s.module.grading))
    return worst


def check_quantize(s: Sample) -> float:
    n = s.module.n
    fields = random_end_form(s.module, range(n + 1), s.rng)
    worst = 0.0
    for x in s.points:
        mj = s.module_jet(x)
        alpha = _evaluate(fields, n, mj.x, 0)
        q = _random_rotation(s.rng, n)
        worst = max(worst, _max(quantize_form(alpha, mj).val - frame_quantize(alpha, mj, q)))
    return worst


def check_lemma_2_1(s: Sample) -> float:
    n = s.module.n
    fields = random_section_form(s.module, range(n + 1), s.rng, columns=2)
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        sigma = _evaluate(fields, n, la.mj.x, 2)
        twice = apply_superconnection(la, apply_superconnection(la, sigma))
        direct = wedge(supercurvature(la), sigma.truncate(0), la.mj.grading)
        worst = max(worst, (twice.truncate(0) - direct).max_abs())
    return worst


def check_lemma_2_2(s: Sample) -> float:
    other = random_form_field(s.module, 0, s.rng)
    shifted = s.superconnection.with_abar({**s.superconnection.abar, 0: other})
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        value = cdiff(la).val
        worst = max(worst, _max(value - cdiff_pairs(la)),
                    _max(value - cdiff(shifted.at(s.geometry, x)).val))
    return worst


def check_eq_2_4(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        worst = max(worst, _max(cdiff(la).val - cdiff_eq24(la)))
    return worst


def check_lemma_3_1(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        gam = gamma_canonical(la.mj)
        cg = np.einsum("mpq,mqr->pr", la.mj.clifford.val, gam.val)
        nabla = covariant_one_form(gam, la.connection, la.mj).val
        worst = max(worst, _max(cg - la.mj.identity()), _max(nabla))
    return worst


def check_g_projection(s: Sample) -> float:
    n = s.module.n
    fields = random_end_form(s.module, range(n + 1), s.rng)
    worst = 0.0
    for x in s.points:
        mj = s.module_jet(x)
        alpha = _evaluate(fields, n, mj.x, 1)
        gp = g_projection(alpha, mj)
        cg = np.einsum("mpq,mqr->pr", mj.clifford.val, gp.val)
        again = g_projection(EndForm(n, {1: gp}), mj)
        worst = max(worst, _max(cg - quantize_form(alpha, mj).val), _max(again.val - gp.val))
    return worst


def check_eq_3_3(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        mj, alpha = la.mj, la.abar
        gp = g_projection(alpha, mj)
        g1 = EndForm(mj.n, {1: gp})
        b = beta(alpha, mj)
        q = quantize_form(alpha, mj).val
        lhs = quantize_form(wedge(g1, g1, mj.grading), mj).val + ev_g(dot(gp, gp), mj).val
        rhs = q @ q + 2 * ev_g(dot(b, gp), mj).val
        worst = max(worst, _max(lhs - rhs))
    return worst


def check_eq_3_4(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        mj, alpha = la.mj, la.abar
        gp = g_projection(alpha, mj)
        lhs = c2_tensor(covariant_one_form(gp, la.connection, mj), mj).val
        rhs = (quantize_form(d_nabla(alpha, la.connection), mj).val
               - ev_g(covariant_one_form(beta(alpha, mj), la.connection, mj), mj).val)
        worst = max(worst, _max(lhs - rhs))
    return worst


def check_lemma_3_3(s: Sample) -> float:
    """beta by contraction against the bracket formula, plus the varpi identities."""
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        mj = la.mj
        b = beta(la.abar, mj)
        gp = g_projection(la.abar, mj)
        worst = max(worst,
                    _max(b.val - lemma33_rhs(la.abar, mj)),
                    _max(varpi(associated_connection(la), mj).val - (b.val - gp.val)),
                    _max(varpi(la.connection, mj).val))
    return worst


def check_cor_3_4(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        lhs, rhs = curvature_comparison_sides(s.local(x))
        worst = max(worst, _max(lhs - rhs))
    return worst


def check_lemma_4_1(s: Sample) -> float:
    d_a = dirac(s.superconnection, s.geometry)
    d_conn = dirac_from_connection(superconnection_connection(s.superconnection, s.geometry))
    worst = 0.0
    for x in s.points:
        p, q = d_a.at(x), d_conn.at(x)
        worst = max(worst, _max(p.b.val - q.b.val), _max(p.c.val - q.c.val))
    return worst


def check_eq_1_1(s: Sample) -> float:
    d = dirac(s.superconnection, s.geometry)
    return weak_residual(compose(d, d), rhs_classical(s.superconnection, s.geometry),
                         s.sections, s.points)


PERTURBED_CONNECTIONS = 5


def check_eq_4_2(s: Sample) -> float:
    """Arbitrary connections for the bare family, nabla^A otherwise."""
    if not s.superconnection.abar:
        worst = 0.0
        for _ in range(PERTURBED_CONNECTIONS):
            provider = PerturbedConnection.random(s.module, s.twist, s.rng).provider(s.geometry)
            d = dirac_from_connection(provider)
            worst = max(worst, weak_residual(compose(d, d), rhs_connection(provider),
                                             s.sections, s.points))
        return worst
    d = dirac(s.superconnection, s.geometry)
    provider = superconnection_connection(s.superconnection, s.geometry)
    return weak_residual(compose(d, d), rhs_connection(provider), s.sections, s.points)


def check_thm_4_2(s: Sample) -> float:
    d = dirac(s.superconnection, s.geometry)
    return weak_residual(compose(d, d), rhs_super(s.superconnection, s.geometry),
                         s.sections, s.points)


def check_eq_4_9(s: Sample) -> float:
    """Reduction to the classical formula (bare family) or to the simple-type one (A_[0] only)."""
    a, geom = s.superconnection, s.geometry
    if not a.abar:
        sup, cla = rhs_super(a, geom), rhs_classical(a, geom)
        worst = 0.0
        for x in s.points:
            p, q = sup.at(x), cla.at(x)
            worst = max(worst, _max(p.a.val - q.a.val), _max(p.b.val - q.b.val),
                        _max(p.c.val - q.c.val))
        return worst
    simple = rhs_simple_type(a, geom)
    d = dirac(a, geom)
    return max(weak_residual(rhs_super(a, geom), simple, s.sections, s.points),
               weak_residual(compose(d, d), simple, s.sections, s.points))


def check_eq_4_10(s: Sample) -> float:
    worst = 0.0
    for x in s.points:
        la = s.local(x)
        worst = max(worst, _max(getzler_P(la) - pipeline_P(la).val))
    return worst


M0_PAIRS = 100


def check_m0_relations(s: Sample) -> float:
    worst = 0.0
    n = s.module.n
    for i in range(M0_PAIRS):
        x = s.points[i % len(s.points)]
        gv = s.geometry.jet_at(x).metric.val
        space = SplitSpace(2, n, gv)
        g0 = space.metric()
        a, b = s.rng.normal(size=(2, space.h + space.v))
        ma, mb = m0(a, space), m0(b, space)
        eye = np.eye(space.dim)
        a_h = np.concatenate([a[:space.h], np.zeros(space.v)])
        a_v = a - a_h
        worst = max(worst,
                    _max(ma @ mb + mb @ ma + 2 * (a @ g0 @ b) * eye),
                    _max(m0(a_h, space) @ m0(a_h, space)),
                    _max(space.grading @ ma + ma @ space.grading),
                    _max(m0_quantize_restricted(a, space) - m0(a_h, space) - m0(a_v, space)))
    return worst


CHECKS = {
    "clifford-relations": check_clifford_relations,
    "quantize": check_quantize,
    "lemma-2-1": check_lemma_2_1,
    "lemma-2-2": check_lemma_2_2,
    "eq-2-4": check_eq_2_4,
    "lemma-3-1": check_lemma_3_1,
    "g-projection": check_g_projection,
    "eq-3-3": check_eq_3_3,
    "eq-3-4": check_eq_3_4,
    "lemma-3-3": check_lemma_3_3,
    "cor-3-4": check_cor_3_4,
    "lemma-4-1": check_lemma_4_1,
    "eq-1-1": check_eq_1_1,
    "eq-4-2": check_eq_4_2,
    "thm-4-2": check_thm_4_2,
    "eq-4-9": check_eq_4_9,
    "eq-4-10": check_eq_4_10,
    "m0-relations": check_m0_relations,
}
