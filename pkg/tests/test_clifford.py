from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ncg_residue.clifford import (AntisymTensor3, build_rep, clifford_three_form, clifford_vector, supertrace,
                                  wedge_pairing)
from ncg_residue.errors import DimensionError

DIMS = (2, 4, 6, 8, 10, 12)


@pytest.mark.parametrize("n", DIMS)
def test_generators_anticommute(n):
    rep = build_rep(n)
    I = rep.identity
    for i, a in enumerate(rep.generators):
        for j, b in enumerate(rep.generators):
            assert_allclose(a @ b + b @ a, -2 * (i == j) * I, atol=1e-14)


@pytest.mark.parametrize("n", DIMS)
def test_generators_anti_hermitian(n):
    for g in build_rep(n).generators:
        assert_allclose(g.conj().T, -g, atol=1e-14)


@pytest.mark.parametrize("n", DIMS)
def test_grading_is_involution_anticommuting_with_vectors(n):
    rep = build_rep(n)
    g = rep.grading
    assert_allclose(g @ g, rep.identity, atol=1e-13)
    assert_allclose(g.conj().T, g, atol=1e-13)
    for e in rep.generators:
        assert_allclose(g @ e + e @ g, 0, atol=1e-13)


@pytest.mark.parametrize("n", [0, 1, 3, 7, 14, -2])
def test_bad_dimension(n):
    with pytest.raises(DimensionError):
        build_rep(n)


def test_trace_of_identity():
    for n in DIMS:
        rep = build_rep(n)
        assert np.trace(rep.identity).real == 2 ** (n // 2)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from((2, 4, 6)), st.integers(0, 2 ** 32 - 1))
def test_clifford_relation(n, seed):
    rng = np.random.default_rng(seed)
    rep = build_rep(n)
    u, v = rng.uniform(-1, 1, (2, n))
    cu, cv = clifford_vector(rep, u), clifford_vector(rep, v)
    assert_allclose(cu @ cv + cv @ cu, -2 * (u @ v) * rep.identity, atol=1e-12)


def test_clifford_vector_shape_checked():
    with pytest.raises(DimensionError):
        clifford_vector(build_rep(4), [1.0, 2.0])


@pytest.mark.parametrize("n", (2, 4, 6))
def test_supertrace_of_generator_products(n):
    rep = build_rep(n)
    m = n // 2
    for q in range(n + 1):
        for idx in combinations(range(n), q):
            val = supertrace(rep, rep.product(idx))
            expect = 2 ** m / (1j ** m) if q == n else 0.0
            assert abs(val - expect) < 1e-12


def test_supertrace_shape_checked():
    with pytest.raises(DimensionError):
        supertrace(build_rep(4), np.eye(2))


def test_antisym_tensor_signs():
    T = AntisymTensor3(4, {(0, 1, 2): 2.0, (1, 2, 3): -1.5})
    assert T(0, 1, 2) == 2.0
    assert T(1, 0, 2) == -2.0
    assert T(2, 0, 1) == 2.0
    assert T(3, 2, 1) == 1.5
    assert T(0, 0, 1) == 0.0
    D = T.dense()
    assert_allclose(D, -np.swapaxes(D, 0, 1))
    assert_allclose(D, -np.swapaxes(D, 1, 2))
    assert AntisymTensor3.from_dense(D).components == T.components


def test_antisym_tensor_rejects_unordered():
    with pytest.raises(DimensionError):
        AntisymTensor3(4, {(1, 0, 2): 1.0})
    with pytest.raises(DimensionError):
        AntisymTensor3(4, {(0, 1, 4): 1.0})


def test_antisym_evaluate_is_multilinear():
    rng = np.random.default_rng(3)
    T = AntisymTensor3.random(6, rng)
    u, v, w = rng.uniform(-1, 1, (3, 6))
    direct = sum(T(i, j, k) * u[i] * v[j] * w[k] for i in range(6) for j in range(6) for k in range(6))
    assert_allclose(T.evaluate(u, v, w), direct, rtol=1e-12)
    assert_allclose(T.evaluate(v, u, w), -direct, rtol=1e-12)


def test_three_form_on_basis_triple():
    rep = build_rep(4)
    T = AntisymTensor3(4, {(0, 2, 3): 1.0})
    assert_allclose(clifford_three_form(rep, T), rep.product((0, 2, 3)))


def test_wedge_pairing_is_determinant():
    rng = np.random.default_rng(0)
    A = rng.uniform(-1, 1, (4, 4))
    assert_allclose(wedge_pairing(A), np.linalg.det(A))
