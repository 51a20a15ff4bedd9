import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superlich.clifford import DimensionError
from superlich.degenerate import SplitSpace, exterior_operators, m0, m0_quantize_restricted

SPACES = [SplitSpace(1, 2), SplitSpace(2, 2), SplitSpace(3, 4),
          SplitSpace(2, 2, np.array([[2.0, 0.3], [0.3, 1.0]]))]


def _max(a):
    return float(np.max(np.abs(a)))


@pytest.mark.parametrize("h", [1, 2, 3])
def test_exterior_operators_anticommute_and_square_to_zero(h):
    eps = exterior_operators(h)
    for a in range(h):
        for b in range(h):
            assert _max(eps[a] @ eps[b] + eps[b] @ eps[a]) == 0
    # e^1 ^ e^2 applied to the vacuum is nonzero, and in the opposite order has the opposite sign
    if h >= 2:
        vac = np.zeros(2 ** h); vac[0] = 1
        assert np.allclose(eps[0] @ eps[1] @ vac, -(eps[1] @ eps[0] @ vac))
        assert _max(eps[0] @ eps[1] @ vac) == 1


@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"h{s.h}v{s.v}")
def test_degenerate_relations_on_random_pairs(space, rng):
    g0 = space.metric()
    eye = np.eye(space.dim)
    for _ in range(100):
        a, b = rng.normal(size=(2, space.h + space.v))
        ma, mb = m0(a, space), m0(b, space)
        assert _max(ma @ mb + mb @ ma + 2 * (a @ g0 @ b) * eye) < 1e-13
        assert _max(space.grading @ ma + ma @ space.grading) == 0


def test_horizontal_and_vertical_examples(rng):
    space = SplitSpace(2, 2)
    a_h = np.array([0.7, -1.1, 0.0, 0.0])
    assert _max(m0(a_h, space) @ m0(a_h, space)) < 1e-15
    e_v = np.array([0.0, 0.0, 1.0, 0.0])
    assert np.allclose(m0(e_v, space) @ m0(e_v, space), -np.eye(space.dim))
    b_v = np.concatenate([[0, 0], rng.normal(size=2)])
    assert _max(m0(a_h, space) @ m0(b_v, space) + m0(b_v, space) @ m0(a_h, space)) < 1e-15
    eps = np.tensordot(a_h[:2], space.exterior, axes=1)
    assert np.allclose(m0_quantize_restricted(a_h, space), np.kron(eps, np.eye(2)))
    c = np.tensordot(b_v[2:], space.vertical_gammas, axes=1)
    assert np.allclose(m0_quantize_restricted(b_v, space), np.kron(space.form_grading, c))


@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6), st.floats(-3, 3))
def test_m0_linear_and_block_decomposed(coords, t):
    space = SPACES[2]
    a = np.array(coords + [0.5])
    b = np.roll(a, 2)
    assert np.allclose(m0(a + t * b, space), m0(a, space) + t * m0(b, space), atol=1e-12)
    a_h = np.concatenate([a[:3], np.zeros(4)])
    assert np.allclose(m0_quantize_restricted(a, space),
                       m0(a_h, space) + m0(a - a_h, space), atol=1e-12)


def test_vertical_metric_relation(rng):
    g = np.array([[2.0, 0.3], [0.3, 1.0]])
    space = SplitSpace(1, 2, g)
    ginv = np.linalg.inv(g)
    c = space.vertical_gammas
    for i in range(2):
        for j in range(2):
            assert np.allclose(c[i] @ c[j] + c[j] @ c[i], -2 * ginv[i, j] * np.eye(2))


def test_dimension_errors():
    space = SplitSpace(2, 2)
    with pytest.raises(DimensionError):
        m0(np.ones(3), space)
    with pytest.raises(DimensionError):
        SplitSpace(2, 2, np.eye(3))
    with pytest.raises(DimensionError):
        SplitSpace(-1, 2)
    with pytest.raises(DimensionError):
        SplitSpace(1, 3).vertical_rep
