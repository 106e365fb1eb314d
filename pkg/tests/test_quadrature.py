import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ncg_residue.quadrature import (cauchy_pi_plus, cubature_sphere_integral, integrate_monomials, line_integral,
                                    mc_sphere_oracle, sphere_cubature, sphere_monomial_integral,
                                    sphere_monomial_integral_exact, sphere_volume, torus_integrate)


@pytest.mark.parametrize("n,vol", [(1, 2.0), (2, 2 * np.pi), (3, 4 * np.pi), (4, 2 * np.pi ** 2),
                                   (6, np.pi ** 3)])
def test_sphere_volumes(n, vol):
    assert_allclose(sphere_volume(n), vol, rtol=1e-14)


def test_exact_monomial_integrals():
    assert sphere_monomial_integral_exact(4, (0, 0, 0, 0)) == 2 * sympy.pi ** 2
    assert sphere_monomial_integral_exact(3, (2, 0, 0)) == 4 * sympy.pi / 3
    assert sphere_monomial_integral_exact(3, (1, 0, 0)) == 0
    assert_allclose(float(sphere_monomial_integral_exact(6, (2, 2, 0, 0, 0, 0))),
                    sphere_monomial_integral(6, (2, 2, 0, 0, 0, 0)), rtol=1e-14)


def test_odd_monomials_vanish():
    assert sphere_monomial_integral(4, (1, 2, 0, 0)) == 0.0


def test_monomial_shape_checked():
    with pytest.raises(ValueError):
        sphere_monomial_integral(3, (1, 1))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from((2, 3, 4, 5, 6)), st.lists(st.integers(0, 3), min_size=6, max_size=6))
def test_cubature_exact_for_monomials(n, exps):
    alpha = tuple(2 * e for e in exps[:n])
    deg = sum(alpha)
    val = cubature_sphere_integral(n, lambda p: np.prod(p ** np.array(alpha), axis=1), degree=max(deg, 2))
    assert_allclose(val, sphere_monomial_integral(n, alpha), rtol=1e-12)


def test_cubature_weights_sum_to_volume():
    for n in (2, 3, 4, 5):
        pts, w = sphere_cubature(n, 6)
        assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
        assert_allclose(w.sum(), sphere_volume(n), rtol=1e-13)


def test_monte_carlo_within_error_bars():
    alpha = (2, 0, 0, 0)
    est, err = mc_sphere_oracle(4, lambda p: p[:, 0] ** 2, samples=20_000, seed=1)
    assert abs(est - sphere_monomial_integral(4, alpha)) < 5 * err


def test_monte_carlo_sample_floor():
    with pytest.raises(ValueError):
        mc_sphere_oracle(3, lambda p: p[:, 0], samples=100)


def test_integrate_monomials_sum():
    coeffs = {(2, 0): np.eye(2), (0, 2): 2 * np.eye(2), (1, 1): np.ones((2, 2))}
    assert_allclose(integrate_monomials(2, coeffs), 3 * np.pi * np.eye(2))


@pytest.mark.parametrize("fn,exact", [
    (lambda t: 1 / (1 + t ** 2), np.pi),
    (lambda t: 1 / (1 + t ** 2) ** 3, 3 * np.pi / 8),
    (lambda t: t ** 2 / (1 + t ** 2) ** 2, np.pi / 2),
    (lambda t: np.exp(-t ** 2), math.sqrt(math.pi)),
])
def test_line_integral(fn, exact):
    assert_allclose(line_integral(fn), exact, rtol=1e-12)


def test_cauchy_pi_plus_of_simple_pole():
    t = np.array([-2.0, 0.5, 3.0])
    h = lambda z: 1 / (1 + z ** 2)
    assert_allclose(cauchy_pi_plus(h, t), -0.5j / (t - 1j), atol=1e-13)


def test_torus_integral_of_trig_polynomial():
    dens = lambda x: 3 + np.cos(x[:, 0]) * np.sin(2 * x[:, 1])
    assert_allclose(torus_integrate(dens, 2), 3 * (2 * np.pi) ** 2, rtol=1e-13)
    with pytest.raises(ValueError):
        torus_integrate(dens, 2, grid=8)
