"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import json
import time

import numpy as np

from superlich import cli
from superlich.bundle import CliffordModule, TwistingConnection
from superlich.dirac import (
    compose,
    connection_laplacian,
    dirac,
    random_sections,
    rhs_classical,
    superconnection_connection,
    weak_residual,
)
from superlich.fields import TrigField
from superlich.geometry import CATALOG, DEFAULT_CATALOG
from superlich.superconnection import Superconnection, gamma_canonical
from superlich.suite import load_config, run_suite

from conftest import ACCEPTANCE


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def _suite(**kwargs):
    reports = run_suite(load_config(**kwargs))
    worst = max(reports, key=lambda r: -1.0 if r.residual is None else r.residual / r.case.tolerance)
    return reports, worst


def _describe(reports, worst):
    bad = [r.case.case_id for r in reports if not r.passed]
    text = f"{len(reports)} cases, worst {worst.case.case_id} = {worst.residual:.2e}"
    return text + (f"; failing: {', '.join(bad)}" if bad else "")


def test_lich_1():
    start = time.perf_counter()
    geom = CATALOG["sphere-s2"]
    module = CliffordModule.build(2, 1, 0)
    a = Superconnection(module, TwistingConnection.flat(module))
    rng = np.random.default_rng(0)
    points = geom.sample_points(rng, 20)
    d = dirac(a, geom)
    dd = compose(d, d)
    weak = weak_residual(dd, rhs_classical(a, geom), random_sections(2, module.dim, 20, 0), points)
    diff = dd - connection_laplacian(superconnection_connection(a, geom, associated=False))
    probe = 0.0
    for x in points:
        for v in np.eye(module.dim):
            s = TrigField(np.zeros((1, 2), int), v[None].astype(complex), np.zeros((1, 2)))
            probe = max(probe, float(np.max(np.abs(diff.apply(s, x) - 0.5 * v))))
    elapsed = time.perf_counter() - start
    ok = weak < 1e-6 and probe < 1e-6 and elapsed < 5
    assert record("LICH-1", ok, f"weak {weak:.2e}, D^2 - Laplacian - 1/2 on constant spinors "
                                f"{probe:.2e}, {elapsed:.1f}s")


def test_super_1():
    start = time.perf_counter()
    reports, worst = _suite(identities=["thm-4-2"], seeds=5, sections=20, points=20)
    elapsed = time.perf_counter() - start
    families = {(r.case.geometry, r.case.family) for r in reports}
    expected = {(g, f) for g in DEFAULT_CATALOG for f in ("none", "a0", "a2")}
    expected |= {(g, "full-mix") for g in DEFAULT_CATALOG if CATALOG[g].n == 4}
    ok = (families == expected and all(r.passed for r in reports)
          and worst.residual < 1e-6 and elapsed < 60)
    assert record("SUPER-1", ok, f"{_describe(reports, worst)}, 5 seeds, {elapsed:.1f}s")


def test_conn_1():
    reports, worst = _suite(identities=["eq-4-2"], families=["none"])
    ok = all(r.passed for r in reports) and worst.residual < 1e-6
    assert record("CONN-1", ok, f"5 random non-Clifford connections per chart, "
                                f"{_describe(reports, worst)}")


def test_alg_1():
    unit = 0.0
    rng = np.random.default_rng(0)
    for name in DEFAULT_CATALOG:
        geom = CATALOG[name]
        module = CliffordModule.build(geom.n)
        a = Superconnection(module, TwistingConnection.random(module, rng))
        for x in geom.sample_points(rng, 10):
            mj = a.at(geom, x).mj
            cg = np.einsum("mpq,mqr->pr", mj.clifford.val, gamma_canonical(mj).val)
            unit = max(unit, float(np.max(np.abs(cg - mj.identity()))))
    reports, worst = _suite(identities=["g-projection", "lemma-2-2", "eq-2-4", "lemma-4-1",
                                        "m0-relations"])
    ok = unit < 1e-10 and all(r.passed for r in reports) and worst.residual < 1e-10
    assert record("ALG-1", ok, f"c(gamma) = Id {unit:.2e}; {_describe(reports, worst)}")


def test_deriv_1():
    first, w1 = _suite(identities=["lemma-3-1", "lemma-3-3", "eq-3-3"], points=10)
    second, w2 = _suite(identities=["eq-3-4", "cor-3-4"], points=10)
    ok = (all(r.passed for r in first + second) and w1.residual < 1e-8
          and w2.residual < 1e-6)
    assert record("DERIV-1", ok, f"first-derivative tier {_describe(first, w1)}; "
                                 f"second-derivative tier {_describe(second, w2)}")


def test_getz_1():
    reports, worst = _suite(identities=["eq-4-10"], geometries=["flat-t4", "perturbed-r4"])
    ok = all(r.passed for r in reports) and worst.residual < 1e-10
    assert record("GETZ-1", ok, f"closed form vs pipeline P(Abar): {_describe(reports, worst)}")


def test_redux_1():
    bare, wb = _suite(identities=["eq-4-9"], families=["none"])
    simple, ws = _suite(identities=["eq-4-9"], families=["a0"])
    ok = (all(r.passed for r in bare + simple) and wb.residual < 1e-12
          and ws.residual < 1e-8)
    assert record("REDUX-1", ok, f"Abar = 0 coefficientwise {wb.residual:.2e}; "
                                 f"A_[0] only weakly {ws.residual:.2e}")


def test_repro_1(tmp_path):
    bodies, times = [], []
    for name in ("first.jsonl", "second.jsonl"):
        start = time.perf_counter()
        cli.main(["--quiet", "--report", str(tmp_path / name)])
        times.append(time.perf_counter() - start)
        rows = [json.loads(line) for line in (tmp_path / name).read_text().splitlines()]
        for row in rows:
            row.pop("wall_time")
        bodies.append("\n".join(json.dumps(r, sort_keys=True) for r in rows))
    cases = bodies[0].count("\n")
    ok = bodies[0] == bodies[1] and max(times) < 120
    assert record("REPRO-1", ok, f"{cases} cases, identical bodies: {bodies[0] == bodies[1]}, "
                                 f"runs {times[0]:.1f}s and {times[1]:.1f}s")
