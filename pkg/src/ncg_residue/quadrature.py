"""
Sphere, line and torus integration.

The exact sphere-monomial formula drives the residue densities.  The other
routines are independent numerical oracles used to cross-check them.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
import sympy
from scipy.special import roots_jacobi, roots_legendre


# ---------------------------------------------------------------------------
# exact monomial integrals

def sphere_monomial_integral(n: int, alpha) -> float:
    """``int_{S^(n-1)} xi^alpha d sigma`` for ``xi`` in ``R^n``.

    Equals ``2 prod Gamma((a_i + 1)/2) / Gamma((|a| + n)/2)`` when every
    exponent is even and zero otherwise.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or n < 1:
        raise ValueError(f"need a multi-index of length {n}")
    if any(a % 2 for a in alpha):
        return 0.0
    logv = math.log(2.0) + sum(math.lgamma((a + 1) / 2) for a in alpha) - math.lgamma((sum(alpha) + n) / 2)
    return math.exp(logv)


@lru_cache(maxsize=None)
def sphere_monomial_integral_exact(n: int, alpha: tuple) -> sympy.Expr:
    """Exact (sympy) version of :func:`sphere_monomial_integral`."""
    if any(a % 2 for a in alpha):
        return sympy.Integer(0)
    val = 2 * sympy.prod([sympy.gamma(sympy.Rational(a + 1, 2)) for a in alpha]) \
        / sympy.gamma(sympy.Rational(sum(alpha) + n, 2))
    return sympy.nsimplify(sympy.simplify(val))


def sphere_volume(n: int) -> float:
    """Volume of the unit sphere ``S^(n-1)`` in ``R^n``."""
    return sphere_monomial_integral(n, (0,) * n)


def integrate_monomials(n: int, coeffs: Mapping[tuple, np.ndarray]) -> np.ndarray:
    """``sum_alpha C_alpha int_{S^(n-1)} xi^alpha``."""
    total = None
    for alpha, C in coeffs.items():
        w = sphere_monomial_integral(n, alpha)
        if w:
            total = w * np.asarray(C) if total is None else total + w * np.asarray(C)
    if total is None:
        C = next(iter(coeffs.values()), np.zeros((1, 1)))
        total = np.zeros_like(np.asarray(C), dtype=complex)
    return total


def integrate_term_over_sphere(term) -> np.ndarray:
    """Integrate a homogeneous piece over the unit cosphere (``|xi|^-2q = 1`` there)."""
    num = term.numerator
    if num.is_zero():
        return np.zeros((term.side, term.side), dtype=complex)
    return integrate_monomials(term.dim, num.terms)


# ---------------------------------------------------------------------------
# sphere oracles

def mc_sphere_oracle(n: int, integrand: Callable[[np.ndarray], np.ndarray], samples: int = 10_000,
                     seed: int = 0):
    """Monte Carlo estimate of ``int_{S^(n-1)} F`` with its standard error.

    ``integrand`` maps points of shape ``(N, n)`` to values of shape ``(N, ...)``.
    """
    if samples < 10_000:
        raise ValueError("use at least 10^4 samples")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((samples, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = np.asarray(integrand(pts))
    vol = sphere_volume(n)
    est = vol * vals.mean(axis=0)
    err = vol * vals.std(axis=0, ddof=1) / math.sqrt(samples)
    return est, err


@lru_cache(maxsize=None)
def sphere_cubature(n: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Product Gauss rule on ``S^(n-1)`` exact for polynomials of total degree ``<= degree``.

    Hyperspherical angles: each polar angle uses Gauss-Jacobi nodes in
    ``cos(theta)``, the last azimuth a trapezoid rule.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    k = degree // 2 + 1
    n_phi = degree + 1
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    base = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    w = np.full(n_phi, 2 * np.pi / n_phi)
    # grow from S^1 to S^(n-1): x = (t, sqrt(1-t^2) * y)
    for d in range(3, n + 1):
        a = (d - 3) / 2
        t, wt = roots_jacobi(k, a, a)
        s = np.sqrt(1 - t ** 2)
        base = np.concatenate([t[:, None, None].repeat(len(base), 1),
                               (s[:, None, None] * base[None, :, :])], axis=2).reshape(-1, d)
        w = (wt[:, None] * w[None, :]).reshape(-1)
    return base, w


def cubature_sphere_integral(n: int, integrand: Callable[[np.ndarray], np.ndarray], degree: int = 8):
    pts, w = sphere_cubature(n, degree)
    vals = np.asarray(integrand(pts))
    return np.tensordot(w, vals, axes=1)


# ---------------------------------------------------------------------------
# xi_n line oracle

@lru_cache(maxsize=None)
def _tangent_line_rule(panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``R`` from composite Gauss-Legendre in ``theta`` with ``t = tan(theta)``."""
    x, w = roots_legendre(nodes)
    edges = np.linspace(-np.pi / 2, np.pi / 2, panels + 1)
    theta, wt = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        theta.append((a + b) / 2 + (b - a) / 2 * x)
        wt.append((b - a) / 2 * w)
    theta = np.concatenate(theta)
    wt = np.concatenate(wt)
    return np.tan(theta), wt / np.cos(theta) ** 2


def line_integral(fn: Callable[[np.ndarray], np.ndarray], panels: int = 16, nodes: int = 32):
    """``int_R fn`` for integrands decaying at least like ``|t|^-2``.

    The substitution ``t = tan(theta)`` maps the line onto a bounded interval
    on which a rational integrand with poles off the real axis stays smooth.
    """
    t, w = _tangent_line_rule(panels, nodes)
    return np.tensordot(w, np.asarray(fn(t)), axes=1)


def cauchy_pi_plus(h: Callable[[np.ndarray], np.ndarray], xi_n, radius: float = 0.5, points: int = 64):
    """Numeric principal part at ``+i``: ``(1/2 pi i) oint h(z) / (xi_n - z) dz`` on ``|z - i| = radius``.

    ``h`` maps complex points of shape ``(P,)`` to values ``(P, ...)``; the
    result has shape ``xi_n.shape + value shape``.
    """
    theta = 2 * np.pi * np.arange(points) / points
    z = 1j + radius * np.exp(1j * theta)
    hz = np.asarray(h(z))
    xi_n = np.asarray(xi_n, dtype=complex)
    kern = (z - 1j)[None, :] / (xi_n.reshape(-1, 1) - z[None, :]) / points
    out = np.tensordot(kern, hz, axes=(1, 0))
    return out.reshape(xi_n.shape + hz.shape[1:])


# ---------------------------------------------------------------------------
# torus

def torus_integrate(density: Callable[[np.ndarray], np.ndarray], n: int, grid: int = 16) -> float:
    """Trapezoid rule for a smooth periodic density on ``[0, 2 pi)^n``.

    ``density`` receives grid points of shape ``(grid**n, n)``.
    """
    if grid < 16:
        raise ValueError("use at least 16 points per axis")
    axis = 2 * np.pi * np.arange(grid) / grid
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    vals = np.asarray(density(mesh))
    return vals.mean(axis=0) * (2 * np.pi) ** n
