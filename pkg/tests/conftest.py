import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from superlich.bundle import CliffordModule, TwistingConnection, module_jet
from superlich.checks import random_end_form
from superlich.forms import EndForm
from superlich.geometry import CATALOG

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GEOMETRIES = ["flat-r2", "conformal-r2", "sphere-s2", "torus-t4", "perturbed-r4"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def setup_module_jet(name, rng, w_plus=1, w_minus=1, twisted=True):
    """Module, twisting connection and module jet at a random point of a catalog chart."""
    geom = CATALOG[name]
    module = CliffordModule.build(geom.n, w_plus, w_minus)
    twist = TwistingConnection.random(module, rng) if twisted else TwistingConnection.flat(module)
    x = geom.sample_points(rng, 1)[0]
    return geom, module, twist, module_jet(module, geom, twist, x)


def random_form(module, degrees, rng, x, order=1):
    fields = random_end_form(module, degrees, rng)
    return EndForm(module.n, {k: f.jet(x, order=order) for k, f in fields.items()})


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
