import numpy as np
import pytest
from numpy.testing import assert_allclose

from ncg_residue.clifford import AntisymTensor3, build_rep, clifford_three_form, clifford_vector
from ncg_residue.errors import DimensionError
from ncg_residue.operators import (KINDS, JetData, PerturbationSpec, anticommutator_coefficients,
                                   clifford_vector_symbol, commutator_laplacian_f, dirac_symbol,
                                   inverse_power_symbols, laplacian_symbol, sandwich_uv)
from ncg_residue.symbols import compose

XI = np.array([0.3, -0.8, 0.5, 1.1])


def test_perturbation_matrices():
    rep = build_rep(4)
    rng = np.random.default_rng(0)
    X, Y = rng.uniform(-1, 1, (2, 4))
    T = AntisymTensor3.random(4, rng)
    assert_allclose(PerturbationSpec().matrix(rep), 0)
    assert_allclose(PerturbationSpec("grading").matrix(rep), rep.grading)
    assert_allclose(PerturbationSpec("vector_grading", X=X).matrix(rep), clifford_vector(rep, X) @ rep.grading)
    assert_allclose(PerturbationSpec("torsion_grading", T=T).matrix(rep),
                    1j * clifford_three_form(rep, T) @ rep.grading)
    assert_allclose(PerturbationSpec("torsion_vector", T=T, Y=Y).matrix(rep),
                    clifford_three_form(rep, T) + 1j * clifford_vector(rep, Y))


def test_perturbation_validation():
    with pytest.raises(ValueError):
        PerturbationSpec("bogus")
    with pytest.raises(ValueError):
        PerturbationSpec("vector_grading")
    with pytest.raises(DimensionError):
        PerturbationSpec("vector_grading", X=np.ones(3)).matrix(build_rep(4))


@pytest.mark.parametrize("kind", KINDS)
def test_random_jets_reproducible(kind):
    a, b = JetData.random(4, 11, kind), JetData.random(4, 11, kind)
    assert_allclose(a.f2, a.f2.T)
    assert_allclose(a.f1, b.f1)
    assert a.perturbation.kind == kind
    assert np.all(np.abs(a.dv) <= 1)


def test_jet_validation():
    z = np.zeros(4)
    with pytest.raises(ValueError):
        JetData(4, z, np.triu(np.ones((4, 4))), z, z, np.zeros((4, 4)))
    with pytest.raises(DimensionError):
        JetData(4, np.zeros(3), np.zeros((4, 4)), z, z, np.zeros((4, 4)))
    with pytest.raises(DimensionError):
        JetData(3, np.zeros(3), np.zeros((3, 3)), np.zeros(3), np.zeros(3), np.zeros((3, 3)))


def test_derived_jet_quantities():
    jets = JetData(2, [1.0, 2.0], [[1.0, 0.5], [0.5, 3.0]], [1.0, -1.0], [2.0, 1.0], [[1.0, 0.0], [0.0, 2.0]])
    assert jets.laplacian_coord() == 4.0
    assert jets.g_uv() == 1.0
    # sum_jk f_j u_k dv_jk = 1*1*1 + 2*(-1)*2
    assert jets.g_u_nabla_v() == -3.0


@pytest.mark.parametrize("kind", KINDS)
def test_laplacian_symbol_pieces(kind):
    rep = build_rep(4)
    pert = PerturbationSpec.random(kind, 4, np.random.default_rng(1))
    lap = laplacian_symbol(rep, pert)
    Phi = pert.matrix(rep)
    cxi = clifford_vector(rep, XI)
    assert_allclose(lap.evaluate(2, XI), (XI @ XI) * np.eye(rep.side), atol=1e-12)
    assert_allclose(lap.evaluate(1, XI), 1j * (cxi @ Phi + Phi @ cxi), atol=1e-12)
    assert_allclose(lap.evaluate(0, XI), Phi @ Phi, atol=1e-12)
    A = anticommutator_coefficients(rep, pert)
    assert_allclose(sum(x * a for x, a in zip(XI, A)), cxi @ Phi + Phi @ cxi, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_inverse_powers(kind, k):
    rep = build_rep(4)
    pert = PerturbationSpec.random(kind, 4, np.random.default_rng(2))
    D = dirac_symbol(rep, pert)
    op = D
    for _ in range(k - 1):
        op = compose(op, D)
    prod = compose(op, inverse_power_symbols(rep, pert, k), -1)
    assert_allclose(prod.evaluate(0, XI), np.eye(rep.side), atol=1e-12)
    assert_allclose(prod.evaluate(-1, XI), 0, atol=1e-12)


def test_inverse_power_range():
    with pytest.raises(ValueError):
        inverse_power_symbols(build_rep(2), PerturbationSpec(), 5)


def test_commutator_pieces_unperturbed():
    rep = build_rep(4)
    jets = JetData.random(4, 3)
    comm = commutator_laplacian_f(rep, jets.perturbation, jets)
    assert_allclose(comm.evaluate(1, XI), -2j * (jets.f1 @ XI) * np.eye(rep.side), atol=1e-12)
    assert_allclose(comm.evaluate(0, XI), -np.trace(jets.f2) * np.eye(rep.side), atol=1e-12)


def test_sandwich_leading_piece():
    rep = build_rep(4)
    jets = JetData.random(4, 4, "grading")
    s = sandwich_uv(rep, jets, commutator_laplacian_f(rep, jets.perturbation, jets))
    cu, cv = clifford_vector(rep, jets.u), clifford_vector(rep, jets.v)
    assert_allclose(s.evaluate(1, XI), -2j * (jets.f1 @ XI) * cu @ cv, atol=1e-12)


def test_clifford_vector_symbol_jets():
    rep = build_rep(2)
    s = clifford_vector_symbol(rep, [1.0, 0.0], [[0.0, 1.0], [2.0, 0.0]])
    assert s.jet_order == 1
    assert_allclose(s.d_x(1).evaluate(0, XI[:2]), clifford_vector(rep, [2.0, 0.0]))
