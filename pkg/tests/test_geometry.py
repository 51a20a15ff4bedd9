import numpy as np
import pytest

from superlich import autodiff as ad
from superlich.bundle import CliffordModule, TwistingConnection, module_jet
from superlich.clifford import DimensionError, build_gammas
from superlich.forms import curvature
from superlich.geometry import (
    CATALOG,
    ChartGeometry,
    GeometryError,
    clifford_riemann,
    get_geometry,
    spin_connection,
    spinor_connection,
)

from conftest import GEOMETRIES


@pytest.mark.parametrize("name", GEOMETRIES)
def test_jet_invariants(name, rng):
    geom = CATALOG[name]
    for x in geom.sample_points(rng, 20):
        j = geom.jet_at(x)
        n = geom.n
        assert np.allclose(j.metric.val @ j.inverse.val, np.eye(n), atol=1e-12)
        assert np.allclose(j.christoffel.val, np.swapaxes(j.christoffel.val, 1, 2), atol=1e-12)
        h = j.vielbein.val
        assert np.allclose(h @ h.T, j.inverse.val, atol=1e-12)
        r = j.riemann_lowered()
        assert np.allclose(r, -np.swapaxes(r, 0, 1), atol=1e-8)
        assert np.allclose(r, -np.swapaxes(r, 2, 3), atol=1e-8)
        assert np.allclose(r, np.transpose(r, (2, 3, 0, 1)), atol=1e-8)
        w = spin_connection(j).val
        assert np.allclose(w, -np.swapaxes(w, 1, 2), atol=1e-12)


def test_flat_chart_is_trivial():
    j = CATALOG["flat-r2"].jet_at([0.3, -0.2])
    assert not j.christoffel.val.any() and not j.riemann.any()
    assert j.scalar == 0 and np.allclose(j.vielbein.val, np.eye(2))
    assert not j.spin.val.any()


@pytest.mark.parametrize("engine", ["ad", "fd"])
def test_round_sphere_scalar_curvature(engine, rng):
    geom = CATALOG["sphere-s2"].with_engine(engine)
    for x in geom.sample_points(rng, 5):
        assert abs(geom.jet_at(x).scalar - 2.0) < 1e-6


def test_engines_agree_on_perturbed_chart(rng):
    geom = CATALOG["perturbed-r4"]
    x = geom.sample_points(rng, 1)[0]
    a, f = geom.jet_at(x), geom.with_engine("fd").jet_at(x)
    assert np.allclose(a.christoffel.val, f.christoffel.val, atol=1e-7)
    assert np.allclose(a.riemann, f.riemann, atol=1e-5)


def test_conformal_scalar_curvature_closed_form(rng):
    def phi(x):
        return 0.3 * ad.sin(x[0]) + 0.2 * x[1] * x[1]

    def metric(x):
        lam = ad.exp(2 * phi(x))
        return [[lam, 0.0], [0.0, lam]]

    geom = ChartGeometry("conformal-test", 2, metric)
    for x in geom.sample_points(rng, 5):
        lap = -0.3 * np.sin(x[0]) + 0.4
        expected = -2 * np.exp(-2 * (0.3 * np.sin(x[0]) + 0.2 * x[1] ** 2)) * lap
        assert abs(geom.jet_at(x).scalar - expected) < 1e-10
    for x in CATALOG["conformal-r2"].sample_points(rng, 5):
        assert abs(CATALOG["conformal-r2"].jet_at(x).scalar) < 1e-12


@pytest.mark.parametrize("name", GEOMETRIES)
def test_spinor_connection_is_clifford_compatible(name, rng):
    geom = CATALOG[name]
    module = CliffordModule.build(geom.n, 1, 0)
    for x in geom.sample_points(rng, 3):
        mj = module_jet(module, geom, TwistingConnection.flat(module), x)
        c, om = mj.clifford, mj.connection.val
        gam = mj.geometry.christoffel.val
        comm = (c.d1 + np.einsum("mpq,kqr->mkpr", om, c.val)
                - np.einsum("kpq,mqr->mkpr", c.val, om)
                + np.einsum("ksm,spq->mkpq", gam, c.val))
        assert np.max(np.abs(comm)) < 1e-8


@pytest.mark.parametrize("name", GEOMETRIES)
def test_clifford_riemann_is_spinor_curvature(name, rng):
    geom = CATALOG[name]
    rep = build_gammas(geom.n)
    x = geom.sample_points(rng, 1)[0]
    j = geom.jet_at(x)
    cr = clifford_riemann(j, rep)
    assert np.allclose(cr, -np.swapaxes(cr, 0, 1), atol=1e-12)
    assert np.allclose(cr, curvature(spinor_connection(j, rep)).value(2), atol=1e-10)


def test_quantized_clifford_riemann_is_quarter_scalar(rng):
    geom = CATALOG["sphere-s2"]
    rep = build_gammas(2)
    j = geom.jet_at(geom.sample_points(rng, 1)[0])
    c = np.einsum("ma,apq->mpq", j.vielbein.val, rep.gammas)
    q = 0.5 * np.einsum("mpq,nqr,mnrs->ps", c, c, clifford_riemann(j, rep))
    assert np.allclose(q, j.scalar / 4 * rep.identity(), atol=1e-12)


def test_flat_charts_have_zero_clifford_riemann():
    for name in ("flat-r2", "torus-t4", "flat-t4"):
        geom = CATALOG[name]
        j = geom.jet_at(np.full(geom.n, 0.1))
        assert np.allclose(clifford_riemann(j, build_gammas(geom.n)), 0)


def test_errors():
    with pytest.raises(KeyError):
        get_geometry("klein-bottle")
    with pytest.raises(DimensionError):
        CATALOG["flat-r2"].jet_at([0.0, 0.0, 0.0])
    with pytest.raises(DimensionError):
        clifford_riemann(CATALOG["flat-r2"].jet_at([0.0, 0.0]), build_gammas(4))
    bad = ChartGeometry("bad", 2, lambda x: [[-1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(GeometryError):
        bad.jet_at([0.0, 0.0])
    odd = ChartGeometry("odd-engine", 2, CATALOG["flat-r2"].metric, engine="symbolic")
    with pytest.raises(GeometryError):
        odd.jet_at([0.0, 0.0])
