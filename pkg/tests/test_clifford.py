from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superlich.clifford import (
    DimensionError,
    Multivector,
    ParityError,
    build_gammas,
    c2,
    parity,
    quantize,
    split_parity,
    supercommutator,
)

EVEN_DIMS = [2, 4, 6, 8]
covectors = st.lists(st.floats(-3, 3), min_size=4, max_size=4).map(np.array)


@pytest.mark.parametrize("n", EVEN_DIMS)
def test_defining_relation_and_chirality(n):
    rep = build_gammas(n)
    eye = rep.identity()
    for a in range(n):
        for b in range(n):
            anti = rep.gammas[a] @ rep.gammas[b] + rep.gammas[b] @ rep.gammas[a]
            assert np.allclose(anti, -2 * (a == b) * eye, atol=1e-14)
        assert np.allclose(rep.chirality @ rep.gammas[a], -rep.gammas[a] @ rep.chirality)
        assert np.allclose(rep.gammas[a].conj().T, -rep.gammas[a])
    assert np.allclose(rep.chirality @ rep.chirality, eye)


def test_two_dimensional_chirality_is_minus_i_gamma12():
    rep = build_gammas(2)
    assert np.allclose(rep.chirality, -1j * rep.gammas[0] @ rep.gammas[1])


def test_build_is_deterministic():
    assert np.array_equal(build_gammas(4).gammas, build_gammas(4).gammas)


@pytest.mark.parametrize("n", [0, 1, 3, 10, 2.0])
def test_bad_dimensions_rejected(n):
    with pytest.raises(DimensionError):
        build_gammas(n)


def test_quantize_basics():
    rep = build_gammas(4)
    assert np.allclose(quantize(Multivector.scalar(4), rep), rep.identity())
    assert np.allclose(quantize(Multivector.basis(4, 0, 1), rep), rep.gammas[0] @ rep.gammas[1])
    assert np.allclose(quantize(Multivector.basis(4, 1, 0), rep), -rep.gammas[0] @ rep.gammas[1])
    with pytest.raises(DimensionError):
        quantize(Multivector.scalar(2), rep)


@given(covectors, covectors)
def test_quantized_wedge_of_two_covectors(v, w):
    rep = build_gammas(4)
    lhs = quantize(Multivector.vector(v).wedge(Multivector.vector(w)), rep)
    rhs = rep.clifford(v) @ rep.clifford(w) + (v @ w) * rep.identity()
    assert np.allclose(lhs, rhs, atol=1e-12)
    assert np.allclose(c2(v, w, rep), lhs - (v @ w) * rep.identity(), atol=1e-12)
    assert np.allclose(c2(v, w, rep) + c2(w, v, rep), -2 * (v @ w) * rep.identity(), atol=1e-12)


def test_c2_on_basis_covectors():
    rep = build_gammas(2)
    e1, e2 = np.eye(2)
    assert np.allclose(c2(e1, e1, rep), -rep.identity())
    assert np.allclose(c2(e1, e2, rep), rep.gammas[0] @ rep.gammas[1])


@pytest.mark.parametrize("n", [2, 4])
def test_quantize_is_an_isomorphism(n):
    rep = build_gammas(n)
    blades = [b for k in range(n + 1) for b in combinations(range(n), k)]
    images = np.array([rep.blade(b).ravel() for b in blades])
    assert len(blades) == rep.dim ** 2
    assert np.linalg.matrix_rank(images) == len(blades)


@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2 ** 32 - 1))
def test_quantize_is_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    rep = build_gammas(4)
    blades = [b for k in range(5) for b in combinations(range(4), k)]

    def rand():
        return Multivector(4, {bl: complex(*rng.normal(size=2)) for bl in blades})

    u, v = rand(), rand()
    assert np.allclose(quantize(a * u + b * v, rep), a * quantize(u, rep) + b * quantize(v, rep))


def test_multivector_validation():
    with pytest.raises(ValueError):
        Multivector(3, {(1, 0): 1.0})
    with pytest.raises(DimensionError):
        Multivector(2, {(0, 2): 1.0})
    assert Multivector(2, {(0,): 0.0}).coeffs == {}
    assert Multivector.basis(3, 1, 1).coeffs == {}


def _homogeneous(rng, grading, p):
    m = rng.normal(size=grading.shape) + 1j * rng.normal(size=grading.shape)
    return split_parity(m, grading)[p]


def test_supercommutator_signs_and_jacobi(rng):
    rep = build_gammas(4)
    g = rep.chirality
    a, b, c = (_homogeneous(rng, g, 1) for _ in range(3))
    e = _homogeneous(rng, g, 0)
    assert np.allclose(supercommutator(a, a, grading=g), 2 * a @ a)
    assert np.allclose(supercommutator(e, b, grading=g), e @ b - b @ e)
    assert np.allclose(supercommutator(rep.identity(), b, grading=g), 0)

    def br(x, y):
        return supercommutator(x, y, grading=g)

    # odd a, b, c: [a,[b,c]] = [[a,b],c] - [b,[a,c]]
    assert np.allclose(br(a, br(b, c)), br(br(a, b), c) - br(b, br(a, c)), atol=1e-10)


def test_supercommutator_graded_antisymmetry(rng):
    g = build_gammas(4).chirality
    for pa in (0, 1):
        for pb in (0, 1):
            a, b = _homogeneous(rng, g, pa), _homogeneous(rng, g, pb)
            sign = (-1) ** (pa * pb)
            assert np.allclose(supercommutator(a, b, grading=g),
                               -sign * supercommutator(b, a, grading=g), atol=1e-12)


def test_mixed_parity_needs_flags(rng):
    g = build_gammas(2).chirality
    mixed = rng.normal(size=(2, 2)) + 0j
    with pytest.raises(ParityError):
        parity(mixed, g)
    with pytest.raises(ParityError):
        supercommutator(mixed, mixed)
    flagged = supercommutator(mixed, mixed, pa=1, pb=1)
    assert np.allclose(flagged, 2 * mixed @ mixed)
