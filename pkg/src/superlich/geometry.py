"""Riemannian data on a coordinate chart.

Index conventions (all arrays are numpy, leading axes first):

* ``christoffel[s, m, n]``  = Gamma^s_{mn}
* ``riemann[k, l, m, n]``   = R^k_{lmn}, with
  R^k_{lmn} = d_m Gamma^k_{nl} - d_n Gamma^k_{ml}
  + Gamma^k_{ms} Gamma^s_{nl} - Gamma^k_{ns} Gamma^s_{ml};
  Ricci R_{ln} = R^k_{lkn}, so the unit round sphere has scalar curvature +2.
* ``vielbein[m, a]``  = h^m_a, the lower Cholesky factor of g^{-1}; E_a = h^m_a d_m
  is orthonormal and dx^m = h^m_a e^a.
* ``coframe[a, m]``   = e^a_m, the inverse of the vielbein.
* ``spin[m, a, b]``   = omega_{mab}, defined by
  d_m h^k_b + Gamma^k_{sm} h^s_b = -h^k_a omega_{mab}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import autodiff as ad
from .clifford import CliffordRep, DimensionError
from .jets import Jet, cholesky, einsum, inv

__all__ = [
    "GeometryError",
    "ChartGeometry",
    "GeometryJet",
    "CATALOG",
    "DEFAULT_CATALOG",
    "get_geometry",
    "jet_at",
    "spin_connection",
    "clifford_riemann",
    "spinor_connection",
]


class GeometryError(ValueError):
    """Metric evaluation failed or the metric is not positive definite."""


@dataclass(frozen=True, eq=False)
class ChartGeometry:
    """A chart of R^n with a closed-form metric ``metric(x) -> n x n nested list``.

    ``metric`` must only use arithmetic and the functions of
    :mod:`superlich.autodiff` so that it accepts dual numbers.
    """

    name: str
    n: int
    metric: Callable
    description: str = ""
    box: float = 1.0
    engine: str = "ad"
    fd_step: float = 1e-4

    def with_engine(self, engine: str, fd_step: float = 1e-4) -> ChartGeometry:
        return ChartGeometry(self.name, self.n, self.metric, self.description, self.box,
                             engine, fd_step)

    def metric_jet(self, x) -> Jet:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"point of shape {x.shape} on a {self.n}-dimensional chart")
        try:
            if self.engine == "ad":
                val, d1, d2 = ad.ad_jet(self.metric, x)
            elif self.engine == "fd":
                val, d1, d2 = ad.fd_jet(self.metric, x, self.fd_step)
            else:
                raise GeometryError(f"unknown derivative engine {self.engine!r}")
        except (ArithmeticError, TypeError) as exc:
            raise GeometryError(f"metric evaluation failed at {x}: {exc}") from exc
        jet = Jet(val.real, d1.real, d2.real)
        if not np.all(np.isfinite(jet.val)):
            raise GeometryError(f"non-finite metric at {x}")
        return jet

    def sample_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(-self.box, self.box, size=(count, self.n))

    def jet_at(self, x) -> GeometryJet:
        return jet_at(self, x)


@dataclass(frozen=True, eq=False)
class GeometryJet:
    x: np.ndarray
    metric: Jet  # g_{mn}, order 2
    inverse: Jet  # g^{mn}, order 2
    christoffel: Jet  # order 1
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    vielbein: Jet  # order 2
    coframe: Jet  # order 2
    spin: Jet  # order 1

    @property
    def n(self) -> int:
        return len(self.x)

    def riemann_lowered(self) -> np.ndarray:
        """R_{klmn} = g_{kr} R^r_{lmn}."""
        return np.einsum("kr,rlmn->klmn", self.metric.val, self.riemann)


def _christoffel(g: Jet, g_inv: Jet) -> Jet:
    dg = g.derivative()  # [r, a, b] = d_r g_ab
    # [l, m, n] = d_m g_ln + d_n g_lm - d_l g_mn
    bracket = dg.map(lambda a: np.einsum("...mln->...lmn", a)
                     + np.einsum("...nlm->...lmn", a) - a)
    return 0.5 * einsum("sl,lmn->smn", g_inv, bracket)


def _riemann(gamma: Jet) -> np.ndarray:
    dgam = gamma.d1  # [m, k, n, l] = d_m Gamma^k_{nl}
    g = gamma.val
    return (np.einsum("mknl->klmn", dgam) - np.einsum("nkml->klmn", dgam)
            + np.einsum("kms,snl->klmn", g, g) - np.einsum("kns,sml->klmn", g, g))


def _spin(gamma: Jet, h: Jet, e: Jet) -> Jet:
    dh = h.derivative()  # [m, k, b]
    t = dh.truncate(1) + einsum("ksm,sb->mkb", gamma, h.truncate(1))
    return -einsum("ak,mkb->mab", e.truncate(1), t)


def jet_at(geom: ChartGeometry, x) -> GeometryJet:
    """Levi-Civita jet of ``geom`` at ``x``."""
    x = np.asarray(x, dtype=float)
    return _jet_cached(geom, tuple(x.tolist()))


@lru_cache(maxsize=4096)
def _jet_cached(geom: ChartGeometry, key: tuple) -> GeometryJet:
    x = np.array(key)
    g = geom.metric_jet(x)
    if not np.allclose(g.val, g.val.T, atol=1e-12):
        raise GeometryError(f"metric not symmetric at {x}")
    try:
        np.linalg.cholesky(g.val)
        g_inv = inv(g)
        h = cholesky(g_inv)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"metric not positive definite at {x}") from exc
    e = inv(h)
    gamma = _christoffel(g, g_inv)
    riemann = _riemann(gamma)
    ricci = np.einsum("klkn->ln", riemann)
    scalar = float(np.einsum("ln,ln->", g_inv.val, ricci))
    spin = _spin(gamma, h, e)
    return GeometryJet(x, g, g_inv, gamma, riemann, ricci, scalar, h, e, spin)


def spin_connection(jet: GeometryJet) -> Jet:
    """omega_{mab}, antisymmetric in ab (jet of order 1)."""
    return jet.spin


def spinor_connection(jet: GeometryJet, rep: CliffordRep) -> Jet:
    """Omega_m = 1/4 omega_{mab} gamma^a gamma^b acting on spinors (order 1)."""
    gg = np.einsum("aij,bjk->abik", rep.gammas, rep.gammas)
    return jet.spin.map(lambda w: 0.25 * np.einsum("...mab,abik->...mik", w, gg))


def clifford_riemann(jet: GeometryJet, rep: CliffordRep) -> np.ndarray:
    """c(R)_{mn} = 1/4 R_{bamn} gamma^a gamma^b as a spinor 2-form, shape (n, n, s, s).

    R_{abmn} is the Riemann tensor with its first pair in the orthonormal
    frame, ``h^k_a h^l_b R_{klmn}``. With this ordering c(R) is the curvature
    of the spinor connection, d_m Omega_n - d_n Omega_m + [Omega_m, Omega_n].
    """
    if rep.n != jet.n:
        raise DimensionError(f"rep of dimension {rep.n} on a {jet.n}-dimensional chart")
    h = jet.vielbein.val
    frame = np.einsum("kb,la,klmn->abmn", h, h, jet.riemann_lowered())
    gg = np.einsum("aij,bjk->abik", rep.gammas, rep.gammas)
    return 0.25 * np.einsum("abmn,abik->mnik", frame, gg)


# catalog ------------------------------------------------------------------------------

def _flat(n):
    def metric(x):
        return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    return metric


def _sphere(x):
    lam = 4.0 / (1.0 + x[0] * x[0] + x[1] * x[1]) ** 2
    return [[lam, 0.0], [0.0, lam]]


def _conformal(x):
    lam = ad.exp(0.2 * x[0])
    return [[lam, 0.0], [0.0, lam]]


_TORUS_RADII = (1.0, 1.5, 0.8, 1.2)


def _torus(x):
    return [[_TORUS_RADII[i] ** 2 if i == j else 0.0 for j in range(4)] for i in range(4)]


def _perturbed(x):
    out = []
    s = x[0] + x[1] + x[2] + x[3]
    for m in range(4):
        row = []
        for n in range(4):
            p = (ad.sin(x[m] + x[n] + 0.3 * (m + n + 1))
                 + 0.5 * ad.cos(x[m] - x[n]) * ad.sin(0.25 * (m + n + 1) * s + 0.2))
            row.append((1.0 if m == n else 0.0) + 0.05 * p)
        out.append(row)
    return out


CATALOG: dict[str, ChartGeometry] = {
    g.name: g
    for g in [
        ChartGeometry("flat-r2", 2, _flat(2), "Euclidean plane, g = delta"),
        ChartGeometry("conformal-r2", 2, _conformal,
                      "g = exp(2 phi) delta on R^2 with phi = 0.1 x^1 (flat, harmonic phi)"),
        ChartGeometry("sphere-s2", 2, _sphere,
                      "unit round sphere in stereographic coordinates, g = 4/(1+|x|^2)^2 delta"),
        ChartGeometry("torus-t4", 4, _torus,
                      "product flat torus, g = diag(1, 1.5^2, 0.8^2, 1.2^2)"),
        ChartGeometry("flat-t4", 4, _flat(4), "square flat torus, g = delta on R^4"),
        ChartGeometry("perturbed-r4", 4, _perturbed,
                      "g = delta + 0.05 P(x), P_mn = sin(x_m + x_n + 0.3(m+n+1))"
                      " + 0.5 cos(x_m - x_n) sin((m+n+1) (x_1+..+x_4)/4 + 0.2)"),
    ]
}


DEFAULT_CATALOG = ("flat-r2", "conformal-r2", "sphere-s2", "torus-t4", "perturbed-r4")


def get_geometry(name: str) -> ChartGeometry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown geometry {name!r}; known: {sorted(CATALOG)}") from None
