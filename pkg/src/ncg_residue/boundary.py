"""
Half-space calculus in the normal variable ``xi_n``.

Boundary integrands are sums of

    C * xi'^alpha * R(xi_n)

with ``C`` a square matrix, ``xi'`` the tangential covariables and ``R`` a
rational function whose only poles are at ``xi_n = +i`` and ``xi_n = -i``.
Every ``R`` is kept in canonical partial-fraction form over the basis

* ``("poly", k)``  for ``xi_n^k``,
* ``("+", k)``     for ``(xi_n - i)^(-k)``,
* ``("-", k)``     for ``(xi_n + i)^(-k)``.

The scalar partial-fraction data are computed exactly over the Gaussian
rationals.  Matrix coefficients are either complex floats or, in exact mode,
object arrays of Gaussian rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np
import sympy
from sympy.polys.domains import QQ, QQ_I

from .errors import DivergenceError, DimensionError
from .symbols import Symbol, SymbolTerm

Basis = tuple  # ("poly" | "+" | "-", k)


# ---------------------------------------------------------------------------
# exact scalar helpers

def to_gaussian(z) -> "QQ_I.dtype":
    """Exact Gaussian rational equal to the given number (floats are taken at face value)."""
    if isinstance(z, QQ_I.dtype):
        return z
    if isinstance(z, sympy.Basic):
        return QQ_I.from_sympy(sympy.nsimplify(z))
    if isinstance(z, Fraction):
        return QQ_I(QQ(z.numerator, z.denominator), 0)
    z = complex(z)
    re, im = Fraction(z.real), Fraction(z.imag)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


def gaussian_to_complex(z) -> complex:
    z = to_gaussian(z)
    return complex(float(z.x), float(z.y))


def exact_matrix(M) -> np.ndarray:
    """Object array of Gaussian rationals with the same entries as ``M``."""
    M = np.asarray(M)
    out = np.empty(M.shape, dtype=object)
    for idx in np.ndindex(M.shape):
        out[idx] = to_gaussian(M[idx])
    return out


def _series_power(c0, c1, power: int, order: int) -> list:
    """Taylor coefficients in t of ``(c0 + c1 t)^power`` up to ``t^order`` (power may be negative)."""
    out = []
    inv = c0 ** -1 if power < 0 else None
    for j in range(order + 1):
        binom = QQ_I(QQ(_gen_binom(power, j)), 0)
        if power >= 0:
            if j > power:
                out.append(QQ_I.zero)
                continue
            out.append(binom * c0 ** (power - j) * c1 ** j)
        else:
            out.append(binom * inv ** (j - power) * c1 ** j)
    return out


def _gen_binom(p: int, j: int) -> Fraction:
    num = 1
    for r in range(j):
        num *= (p - r)
    return Fraction(num, math.factorial(j))


def _series_mul(a: list, b: list, order: int) -> list:
    return [sum((a[i] * b[k - i] for i in range(k + 1)), QQ_I.zero) for k in range(order + 1)]


@lru_cache(maxsize=None)
def taylor_at_pole(k: int, other: int, sign: int, order: int) -> tuple:
    """Taylor coefficients about ``xi = sign*i`` of ``xi^k / (xi + sign*i)^other``.

    ``sign = +1`` expands ``xi^k/(xi+i)^other`` around ``+i``; ``sign = -1``
    expands ``xi^k/(xi-i)^other`` around ``-i``.
    """
    p = QQ_I(0, sign)
    num = _series_power(p, QQ_I.one, k, order)
    den = _series_power(2 * p, QQ_I.one, -other, order)
    return tuple(_series_mul(num, den, order))


def derivative_at(k: int, other: int, order: int, sign: int = 1):
    """Exact ``d^order/dxi^order [xi^k (xi + sign*i)^(-other)]`` at ``xi = sign*i``."""
    return taylor_at_pole(k, other, sign, order)[order] * math.factorial(order)


def _poly_mul(a: list, b: list) -> list:
    out = [QQ_I.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def partial_fraction_basis(k: int, a: int, b: int) -> tuple:
    """Canonical decomposition of ``xi^k / ((xi - i)^a (xi + i)^b)``.

    Returns ``((basis, coefficient), ...)`` with exact Gaussian-rational
    coefficients; zero coefficients are omitted.
    """
    if min(k, a, b) < 0:
        raise ValueError("exponents must be non-negative")
    out: dict = {}
    if a == 0 and b == 0:
        return ((("poly", k), QQ_I.one),)
    if a:
        tay = taylor_at_pole(k, b, +1, a - 1)
        for r in range(1, a + 1):
            out[("+", r)] = tay[a - r]
    if b:
        tay = taylor_at_pole(k, a, -1, b - 1)
        for r in range(1, b + 1):
            out[("-", r)] = tay[b - r]
    if k >= a + b:
        # polynomial part: quotient of xi^k by (xi - i)^a (xi + i)^b
        den = [QQ_I.one]
        for _ in range(a):
            den = _poly_mul(den, [QQ_I(0, -1), QQ_I.one])
        for _ in range(b):
            den = _poly_mul(den, [QQ_I(0, 1), QQ_I.one])
        rem = [QQ_I.zero] * k + [QQ_I.one]
        deg_den = len(den) - 1
        for power in range(k - deg_den, -1, -1):
            c = rem[power + deg_den]
            if c:
                out[("poly", power)] = c
                for i, d in enumerate(den):
                    rem[power + i] -= c * d
    return tuple((basis, c) for basis, c in sorted(out.items()) if c)


def _basis_triple(basis: Basis) -> tuple[int, int, int]:
    kind, k = basis
    if kind == "poly":
        return (k, 0, 0)
    if kind == "+":
        return (0, k, 0)
    return (0, 0, k)


def evaluate_basis(basis: Basis, xn) -> np.ndarray:
    xn = np.asarray(xn, dtype=complex)
    kind, k = basis
    if kind == "poly":
        return xn ** k
    if kind == "+":
        return (xn - 1j) ** (-k)
    return (xn + 1j) ** (-k)


# ---------------------------------------------------------------------------
# boundary integrands

Key = tuple  # (xi' multi-index, basis)


@dataclass(frozen=True)
class PlaneRational:
    """Sum of ``C * xi'^alpha * basis(xi_n)`` in canonical partial-fraction form."""

    dim: int
    side: int
    terms: Mapping[Key, np.ndarray] = field(default_factory=dict)
    exact: bool = False

    def __post_init__(self):
        clean = {}
        for (alpha, basis), C in self.terms.items():
            if len(alpha) != self.dim - 1:
                raise DimensionError(f"tangential multi-index {alpha} has wrong length")
            if basis[0] not in ("poly", "+", "-") or basis[1] < (0 if basis[0] == "poly" else 1):
                raise ValueError(f"bad basis element {basis}")
            if self.exact:
                C = np.asarray(C, dtype=object)
                if any(C.flat):
                    clean[(tuple(alpha), basis)] = C
            else:
                C = np.asarray(C, dtype=complex)
                if np.any(np.abs(C) > 1e-13):
                    clean[(tuple(alpha), basis)] = C
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # construction -------------------------------------------------------
    @classmethod
    def from_scalar_rational(cls, dim: int, k: int, a: int, b: int, M=None, alpha=None,
                             exact: bool = False) -> "PlaneRational":
        """``M * xi'^alpha * xi_n^k / ((xi_n - i)^a (xi_n + i)^b)``."""
        alpha = tuple(alpha) if alpha is not None else (0,) * (dim - 1)
        M = np.eye(1) if M is None else M
        M = exact_matrix(M) if exact else np.asarray(M, dtype=complex)
        acc: dict = {}
        for basis, c in partial_fraction_basis(k, a, b):
            cc = c if exact else gaussian_to_complex(c)
            acc[(alpha, basis)] = acc.get((alpha, basis), 0) + M * cc
        return cls(dim, M.shape[0], acc, exact)

    def _coerce(self, c):
        return to_gaussian(c) if self.exact else gaussian_to_complex(c)

    def _check(self, other: "PlaneRational"):
        if (self.dim, self.side, self.exact) != (other.dim, other.side, other.exact):
            raise DimensionError("incompatible boundary integrands")

    def is_zero(self) -> bool:
        return not self.terms

    # linear structure ---------------------------------------------------
    def __add__(self, other: "PlaneRational") -> "PlaneRational":
        self._check(other)
        out = dict(self.terms)
        for key, C in other.terms.items():
            out[key] = out[key] + C if key in out else C
        return PlaneRational(self.dim, self.side, out, self.exact)

    def __neg__(self) -> "PlaneRational":
        return self.scale(-1)

    def __sub__(self, other: "PlaneRational") -> "PlaneRational":
        return self + (-other)

    def scale(self, c) -> "PlaneRational":
        c = self._coerce(c)
        return PlaneRational(self.dim, self.side, {k: C * c for k, C in self.terms.items()}, self.exact)

    def lmul(self, M) -> "PlaneRational":
        M = exact_matrix(M) if self.exact else np.asarray(M, dtype=complex)
        return PlaneRational(self.dim, self.side, {k: M @ C for k, C in self.terms.items()}, self.exact)

    def rmul(self, M) -> "PlaneRational":
        M = exact_matrix(M) if self.exact else np.asarray(M, dtype=complex)
        return PlaneRational(self.dim, self.side, {k: C @ M for k, C in self.terms.items()}, self.exact)

    def __matmul__(self, other: "PlaneRational") -> "PlaneRational":
        """Product of integrands (matrix order preserved), re-expanded canonically."""
        self._check(other)
        out: dict = {}
        for (a1, b1), C1 in self.terms.items():
            for (a2, b2), C2 in other.terms.items():
                alpha = tuple(x + y for x, y in zip(a1, a2))
                k1, p1, m1 = _basis_triple(b1)
                k2, p2, m2 = _basis_triple(b2)
                P = C1 @ C2
                for basis, c in partial_fraction_basis(k1 + k2, p1 + p2, m1 + m2):
                    key = (alpha, basis)
                    term = P * self._coerce(c)
                    out[key] = out[key] + term if key in out else term
        return PlaneRational(self.dim, self.side, out, self.exact)

    # projections --------------------------------------------------------
    def _select(self, kind: str) -> "PlaneRational":
        return PlaneRational(self.dim, self.side,
                             {k: C for k, C in self.terms.items() if k[1][0] == kind}, self.exact)

    def pi_plus(self) -> "PlaneRational":
        """Principal parts at ``xi_n = +i``."""
        return self._select("+")

    def pi_minus(self) -> "PlaneRational":
        """Principal parts at ``xi_n = -i``."""
        return self._select("-")

    def polynomial_part(self) -> "PlaneRational":
        return self._select("poly")

    def d_xi_n(self) -> "PlaneRational":
        out: dict = {}
        for (alpha, (kind, k)), C in self.terms.items():
            if kind == "poly":
                if k == 0:
                    continue
                key, c = (alpha, ("poly", k - 1)), k
            else:
                key, c = (alpha, (kind, k + 1)), -k
            out[key] = out[key] + C * c if key in out else C * c
        return PlaneRational(self.dim, self.side, out, self.exact)

    def trace(self) -> "PlaneRational":
        out = {}
        for key, C in self.terms.items():
            t = sum(np.diagonal(C), QQ_I.zero) if self.exact else np.trace(C)
            out[key] = np.array([[t]], dtype=object if self.exact else complex)
        return PlaneRational(self.dim, 1, out, self.exact)

    def coefficient(self, alpha, basis) -> np.ndarray:
        C = self.terms.get((tuple(alpha), basis))
        if C is None:
            return np.full((self.side, self.side), QQ_I.zero, dtype=object) if self.exact \
                else np.zeros((self.side, self.side), dtype=complex)
        return C

    def to_complex(self) -> "PlaneRational":
        if not self.exact:
            return self
        conv = np.vectorize(gaussian_to_complex, otypes=[complex])
        return PlaneRational(self.dim, self.side, {k: conv(C) for k, C in self.terms.items()}, False)

    def evaluate(self, xi_prime, xi_n) -> np.ndarray:
        """Numeric value for ``xi_prime`` of shape ``(..., dim-1)`` and ``xi_n`` of shape ``(...)``."""
        r = self.to_complex()
        xi_prime = np.asarray(xi_prime, dtype=float)
        xi_n = np.asarray(xi_n)
        shape = np.broadcast_shapes(xi_prime.shape[:-1], xi_n.shape)
        out = np.zeros(shape + (self.side, self.side), dtype=complex)
        for (alpha, basis), C in r.terms.items():
            mono = np.prod(xi_prime ** np.asarray(alpha), axis=-1)
            out += (mono * evaluate_basis(basis, xi_n))[..., None, None] * C
        return out

    # integration --------------------------------------------------------
    def contour_integral(self) -> dict:
        """``int_R d xi_n`` per tangential monomial, by the residue at ``+i``.

        Returns ``{alpha: matrix}``; in exact mode the entries are sympy
        expressions.  Integrands without ``|xi_n|^-2`` decay raise
        :class:`DivergenceError`.
        """
        out = {}
        for (alpha, (kind, k)), C in self.terms.items():
            if kind == "poly":
                raise DivergenceError(f"polynomial part xi_n^{k} present for tangential monomial {alpha}")
        alphas = sorted({alpha for alpha, _ in self.terms})
        for alpha in alphas:
            plus = self.coefficient(alpha, ("+", 1))
            minus = self.coefficient(alpha, ("-", 1))
            tail = plus + minus
            if self.exact:
                bad = any(tail.flat)
            else:
                bad = np.any(np.abs(tail) > 1e-12 * max(1.0, float(np.max(np.abs(plus)))))
            if bad:
                raise DivergenceError(f"integrand decays only like 1/xi_n for tangential monomial {alpha}")
            if self.exact:
                conv = np.vectorize(lambda z: 2 * sympy.pi * sympy.I * QQ_I.to_sympy(z), otypes=[object])
                out[alpha] = conv(plus)
            else:
                out[alpha] = 2j * np.pi * plus
        return out


# ---------------------------------------------------------------------------
# module-level operations

def restrict_to_boundary(s, exact: bool = False) -> PlaneRational:
    """Boundary form of a homogeneous piece on ``|xi'| = 1``.

    ``|xi|^2`` becomes ``1 + xi_n^2`` and every numerator monomial splits into
    a tangential part and a power of ``xi_n``.  Accepts a :class:`SymbolTerm`
    or a single-piece :class:`Symbol`.
    """
    if isinstance(s, Symbol):
        if len(s.terms) > 1:
            raise ValueError("restrict a single homogeneous piece at a time")
        if not s.terms:
            return PlaneRational(s.dim, s.side, {}, exact)
        s = next(iter(s.terms.values()))
    if not isinstance(s, SymbolTerm):
        raise TypeError("expected a SymbolTerm whose denominator is a power of |xi|^2")
    dim, q = s.dim, s.inv_power
    out = PlaneRational(dim, s.side, {}, exact)
    for alpha, C in s.numerator.terms.items():
        out = out + PlaneRational.from_scalar_rational(dim, alpha[-1], q, q, C, alpha[:-1], exact)
    return out


def partial_fractions(numerator, a: int, b: int) -> dict:
    """Exact decomposition of ``p(xi_n) / ((xi_n - i)^a (xi_n + i)^b)``.

    ``numerator`` lists the coefficients of ``p`` from the constant term up.
    Returns ``{basis: Gaussian rational}``.
    """
    out: dict = {}
    for k, c in enumerate(numerator):
        c = to_gaussian(c)
        if not c:
            continue
        for basis, coef in partial_fraction_basis(k, a, b):
            out[basis] = out.get(basis, QQ_I.zero) + c * coef
    return {k: v for k, v in sorted(out.items()) if v}


def pi_plus(r: PlaneRational) -> PlaneRational:
    return r.pi_plus()


def pi_minus(r: PlaneRational) -> PlaneRational:
    return r.pi_minus()


def polynomial_part(r: PlaneRational) -> PlaneRational:
    return r.polynomial_part()


def d_xi_n(r: PlaneRational) -> PlaneRational:
    return r.d_xi_n()


def contour_integral(r: PlaneRational) -> dict:
    return r.contour_integral()
