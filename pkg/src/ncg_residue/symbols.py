"""
Pseudodifferential symbols at a single base point.

A homogeneous piece of a symbol is stored as ``N(x, xi) / |xi|^(2q)`` where the
numerator ``N`` is a matrix-valued polynomial in ``xi``.  The x-dependence is
kept only through Taylor jets at the base point: ``jets[beta]`` is the
numerator of ``d_x^beta`` of the piece, evaluated there.

A :class:`Symbol` is a finite collection of such pieces, one per degree, with
two pieces of bookkeeping:

``jet_order``
    the largest ``|beta|`` whose jets are known (``math.inf`` means every
    missing jet is genuinely zero, e.g. x-constant or polynomial symbols);
``floor``
    the lowest degree that is still exact (``-math.inf`` for symbols with a
    finite, fully known expansion).  Pieces below the floor are discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Optional

import numpy as np

from .errors import DimensionError, JetDepthError, SymbolInversionError, TruncationError

Multi = tuple
PRUNE_TOL = 1e-13


# ---------------------------------------------------------------------------
# multi-index helpers

@lru_cache(maxsize=None)
def multi_indices(dim: int, total: int) -> tuple[Multi, ...]:
    """All multi-indices of length ``dim`` with ``|alpha| == total``."""
    if dim == 0:
        return ((),) if total == 0 else ()
    if dim == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in multi_indices(dim - 1, total - first):
            out.append((first,) + rest)
    return tuple(out)


def zero_index(dim: int) -> Multi:
    return (0,) * dim


def unit_index(dim: int, i: int) -> Multi:
    return tuple(1 if k == i else 0 for k in range(dim))


def add_index(a: Multi, b: Multi) -> Multi:
    return tuple(x + y for x, y in zip(a, b))


def sub_index(a: Multi, b: Multi) -> Multi:
    return tuple(x - y for x, y in zip(a, b))


def index_factorial(a: Multi) -> int:
    return math.prod(math.factorial(k) for k in a)


def index_binomial(a: Multi, b: Multi) -> int:
    return math.prod(math.comb(x, y) for x, y in zip(a, b))


def _unit_steps(alpha: Multi) -> Iterator[int]:
    for axis, k in enumerate(alpha):
        for _ in range(k):
            yield axis


def _freeze(M) -> np.ndarray:
    arr = np.array(M, dtype=complex)
    arr.setflags(write=False)
    return arr


def _is_small(M: np.ndarray) -> bool:
    return not np.any(np.abs(M) > PRUNE_TOL)


# ---------------------------------------------------------------------------
# matrix-coefficient polynomials in xi

@dataclass(frozen=True)
class XiPolynomial:
    """Matrix-valued polynomial ``sum_alpha C_alpha xi^alpha``."""

    dim: int
    side: int
    terms: Mapping[Multi, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, coeff in self.terms.items():
            if len(alpha) != self.dim:
                raise DimensionError(f"multi-index {alpha} has wrong length for dim {self.dim}")
            coeff = np.asarray(coeff, dtype=complex)
            if coeff.shape != (self.side, self.side):
                raise DimensionError(f"coefficient shape {coeff.shape} != {(self.side, self.side)}")
            if not _is_small(coeff):
                clean[tuple(int(a) for a in alpha)] = _freeze(coeff)
        object.__setattr__(self, "terms", clean)

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim: int, side: int) -> "XiPolynomial":
        return cls(dim, side, {})

    @classmethod
    def constant(cls, dim: int, M) -> "XiPolynomial":
        M = np.asarray(M, dtype=complex)
        return cls(dim, M.shape[0], {zero_index(dim): M})

    @classmethod
    def monomial(cls, alpha: Multi, M) -> "XiPolynomial":
        M = np.asarray(M, dtype=complex)
        return cls(len(alpha), M.shape[0], {tuple(alpha): M})

    @classmethod
    def linear(cls, coeffs: Iterable[np.ndarray]) -> "XiPolynomial":
        """``sum_i xi_i M_i`` from a sequence of matrices."""
        coeffs = [np.asarray(M, dtype=complex) for M in coeffs]
        dim = len(coeffs)
        return cls(dim, coeffs[0].shape[0], {unit_index(dim, i): M for i, M in enumerate(coeffs)})

    @classmethod
    def norm_sq_power(cls, dim: int, side: int, k: int) -> "XiPolynomial":
        """``|xi|^(2k) * Id`` expanded by the multinomial theorem."""
        return cls(dim, side, {
            tuple(2 * a for a in half): (math.factorial(k) / index_factorial(half)) * np.eye(side)
            for half in multi_indices(dim, k)
        })

    # structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Largest ``|alpha|`` present; -1 for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def is_homogeneous(self, deg: int) -> bool:
        return all(sum(a) == deg for a in self.terms)

    def _same_shape(self, other: "XiPolynomial"):
        if (self.dim, self.side) != (other.dim, other.side):
            raise DimensionError(
                f"incompatible polynomials: dim/side {(self.dim, self.side)} vs {(other.dim, other.side)}")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "XiPolynomial") -> "XiPolynomial":
        self._same_shape(other)
        out = dict(self.terms)
        for alpha, C in other.terms.items():
            out[alpha] = out[alpha] + C if alpha in out else C
        return XiPolynomial(self.dim, self.side, out)

    def __neg__(self) -> "XiPolynomial":
        return self.scale(-1)

    def __sub__(self, other: "XiPolynomial") -> "XiPolynomial":
        return self + (-other)

    def scale(self, c: complex) -> "XiPolynomial":
        if c == 0:
            return XiPolynomial.zero(self.dim, self.side)
        return XiPolynomial(self.dim, self.side, {a: c * C for a, C in self.terms.items()})

    def __matmul__(self, other: "XiPolynomial") -> "XiPolynomial":
        self._same_shape(other)
        out: dict = {}
        for a, A in self.terms.items():
            for b, B in other.terms.items():
                key = add_index(a, b)
                P = A @ B
                out[key] = out[key] + P if key in out else P
        return XiPolynomial(self.dim, self.side, out)

    def lmul(self, M) -> "XiPolynomial":
        """Left multiplication by a constant matrix."""
        return XiPolynomial(self.dim, self.side, {a: M @ C for a, C in self.terms.items()})

    def rmul(self, M) -> "XiPolynomial":
        """Right multiplication by a constant matrix."""
        return XiPolynomial(self.dim, self.side, {a: C @ M for a, C in self.terms.items()})

    def times_xi(self, i: int, c: complex = 1.0) -> "XiPolynomial":
        e = unit_index(self.dim, i)
        return XiPolynomial(self.dim, self.side, {add_index(a, e): c * C for a, C in self.terms.items()})

    def d(self, i: int) -> "XiPolynomial":
        """Partial derivative in ``xi_i``."""
        out = {}
        for a, C in self.terms.items():
            if a[i]:
                b = a[:i] + (a[i] - 1,) + a[i + 1:]
                out[b] = a[i] * C
        return XiPolynomial(self.dim, self.side, out)

    def map_coefficients(self, fn: Callable[[np.ndarray], np.ndarray], side: Optional[int] = None):
        side = self.side if side is None else side
        return XiPolynomial(self.dim, side, {a: fn(C) for a, C in self.terms.items()})

    def evaluate(self, xi) -> np.ndarray:
        """Evaluate at points ``xi`` of shape ``(..., dim)``; returns ``(..., side, side)``.

        Complex points are allowed (used by contour oracles).
        """
        xi = np.asarray(xi)
        lead = xi.shape[:-1]
        if not self.terms:
            return np.zeros(lead + (self.side, self.side), dtype=complex)
        exps = np.array(list(self.terms), dtype=int)
        coeffs = np.stack([np.asarray(C, dtype=complex) for C in self.terms.values()])
        pts = xi.reshape(-1, self.dim)
        mono = np.ones((len(pts), len(exps)), dtype=complex if np.iscomplexobj(pts) else float)
        for i in range(self.dim):
            mono = mono * pts[:, i:i + 1] ** exps[None, :, i]
        out = mono @ coeffs.reshape(len(exps), -1)
        return out.reshape(lead + (self.side, self.side))

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(C))) for C in self.terms.values()), default=0.0)


# ---------------------------------------------------------------------------
# homogeneous pieces

@dataclass(frozen=True)
class SymbolTerm:
    """Homogeneous piece ``N / |xi|^(2q)`` of a fixed degree, with x-jets."""

    dim: int
    side: int
    degree: int
    inv_power: int
    jets: Mapping[Multi, XiPolynomial] = field(default_factory=dict)

    def __post_init__(self):
        if self.inv_power < 0:
            raise ValueError("inv_power must be non-negative")
        clean = {}
        want = self.degree + 2 * self.inv_power
        for beta, poly in self.jets.items():
            if len(beta) != self.dim:
                raise DimensionError(f"x multi-index {beta} has wrong length")
            if poly.is_zero():
                continue
            if not poly.is_homogeneous(want):
                raise ValueError(f"numerator is not homogeneous of degree {want}")
            clean[tuple(beta)] = poly
        object.__setattr__(self, "jets", clean)

    @classmethod
    def from_value(cls, degree: int, inv_power: int, numerator: XiPolynomial) -> "SymbolTerm":
        return cls(numerator.dim, numerator.side, degree, inv_power, {zero_index(numerator.dim): numerator})

    @property
    def numerator(self) -> XiPolynomial:
        """Numerator at the base point."""
        return self.jets.get(zero_index(self.dim), XiPolynomial.zero(self.dim, self.side))

    @property
    def jet_depth(self) -> int:
        return max((sum(b) for b in self.jets), default=0)

    def is_zero(self) -> bool:
        return not self.jets

    def _map(self, fn) -> "SymbolTerm":
        return SymbolTerm(self.dim, self.side, self.degree, self.inv_power,
                          {b: fn(p) for b, p in self.jets.items()})

    def with_inv_power(self, q: int) -> "SymbolTerm":
        """Same piece rewritten over ``|xi|^(2q)`` with ``q >= inv_power``."""
        dq = q - self.inv_power
        if dq < 0:
            raise ValueError("can only raise the inverse power")
        if dq == 0:
            return self
        factor = XiPolynomial.norm_sq_power(self.dim, self.side, dq)
        return SymbolTerm(self.dim, self.side, self.degree, q,
                          {b: p @ factor for b, p in self.jets.items()})

    def __add__(self, other: "SymbolTerm") -> "SymbolTerm":
        if self.degree != other.degree:
            raise ValueError("cannot add pieces of different degree")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        q = max(self.inv_power, other.inv_power)
        a, b = self.with_inv_power(q), other.with_inv_power(q)
        jets = dict(a.jets)
        for beta, p in b.jets.items():
            jets[beta] = jets[beta] + p if beta in jets else p
        return SymbolTerm(self.dim, self.side, self.degree, q, jets)

    def scale(self, c: complex) -> "SymbolTerm":
        return self._map(lambda p: p.scale(c))

    def lmul(self, M) -> "SymbolTerm":
        return self._map(lambda p: p.lmul(M))

    def rmul(self, M) -> "SymbolTerm":
        return self._map(lambda p: p.rmul(M))

    def truncate_jets(self, order) -> "SymbolTerm":
        if order == math.inf:
            return self
        return SymbolTerm(self.dim, self.side, self.degree, self.inv_power,
                          {b: p for b, p in self.jets.items() if sum(b) <= order})

    def mul(self, other: "SymbolTerm", jet_order=math.inf) -> "SymbolTerm":
        """Pointwise product; x-jets combine by the Leibniz rule."""
        jets: dict = {}
        for b1, p1 in self.jets.items():
            for b2, p2 in other.jets.items():
                gamma = add_index(b1, b2)
                if sum(gamma) > jet_order:
                    continue
                prod_ = p1 @ p2
                c = index_binomial(gamma, b1)
                if c != 1:
                    prod_ = prod_.scale(c)
                jets[gamma] = jets[gamma] + prod_ if gamma in jets else prod_
        return SymbolTerm(self.dim, self.side, self.degree + other.degree,
                          self.inv_power + other.inv_power, jets)

    def d_xi(self, i: int) -> "SymbolTerm":
        """Exact ``d/dxi_i``; the degree drops by one."""
        q = self.inv_power
        if q == 0:
            return SymbolTerm(self.dim, self.side, self.degree - 1, 0,
                              {b: p.d(i) for b, p in self.jets.items()})
        nsq = XiPolynomial.norm_sq_power(self.dim, self.side, 1)
        return SymbolTerm(self.dim, self.side, self.degree - 1, q + 1,
                          {b: p.d(i) @ nsq - p.times_xi(i, 2 * q) for b, p in self.jets.items()})

    def d_x(self, i: int) -> "SymbolTerm":
        """Shift the jets by one derivative in ``x_i``."""
        e = unit_index(self.dim, i)
        jets = {}
        for b, p in self.jets.items():
            if b[i]:
                jets[sub_index(b, e)] = p
        return SymbolTerm(self.dim, self.side, self.degree, self.inv_power, jets)

    def evaluate(self, xi) -> np.ndarray:
        """Value at the base point for ``xi`` of shape ``(..., dim)``, real or complex."""
        xi = np.asarray(xi)
        num = self.numerator.evaluate(xi)
        if self.inv_power:
            nsq = np.sum(xi * xi, axis=-1)
            num = num / (nsq ** self.inv_power)[..., None, None]
        return num


# ---------------------------------------------------------------------------
# full symbols

def _floor_of_product(a: "Symbol", b: "Symbol") -> float:
    return max(a.floor + b.order, a.order + b.floor)


@dataclass(frozen=True)
class Symbol:
    """Finite sum of homogeneous pieces, keyed by degree."""

    dim: int
    side: int
    terms: Mapping[int, SymbolTerm] = field(default_factory=dict)
    order: Optional[int] = None
    jet_order: float = math.inf
    floor: float = -math.inf

    def __post_init__(self):
        clean = {}
        for deg, t in self.terms.items():
            if t.degree != deg:
                raise ValueError(f"piece keyed by degree {deg} has degree {t.degree}")
            if (t.dim, t.side) != (self.dim, self.side):
                raise DimensionError("piece does not match symbol dimensions")
            if deg < self.floor:
                continue
            t = t.truncate_jets(self.jet_order)
            if not t.is_zero():
                clean[int(deg)] = t
        object.__setattr__(self, "terms", dict(sorted(clean.items(), reverse=True)))
        if self.order is None:
            object.__setattr__(self, "order", max(clean, default=0))
        elif clean and max(clean) > self.order:
            raise ValueError(f"piece of degree {max(clean)} exceeds order {self.order}")

    # constructors -------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[SymbolTerm], order=None, jet_order=math.inf,
                   floor=-math.inf) -> "Symbol":
        terms = list(terms)
        if not terms:
            raise ValueError("need at least one piece to infer dimensions")
        acc: dict = {}
        for t in terms:
            acc[t.degree] = acc[t.degree] + t if t.degree in acc else t
        return cls(terms[0].dim, terms[0].side, acc, order, jet_order, floor)

    @classmethod
    def zero(cls, dim: int, side: int, order: int = 0, jet_order=math.inf, floor=-math.inf) -> "Symbol":
        return cls(dim, side, {}, order, jet_order, floor)

    @classmethod
    def constant(cls, dim: int, M) -> "Symbol":
        """x- and xi-independent matrix symbol of order 0."""
        M = np.asarray(M, dtype=complex)
        return cls(dim, M.shape[0], {0: SymbolTerm.from_value(0, 0, XiPolynomial.constant(dim, M))}, 0)

    @classmethod
    def identity(cls, dim: int, side: int) -> "Symbol":
        return cls.constant(dim, np.eye(side))

    @classmethod
    def polynomial(cls, poly: XiPolynomial, degree: int) -> "Symbol":
        return cls(poly.dim, poly.side, {degree: SymbolTerm.from_value(degree, 0, poly)}, degree)

    @classmethod
    def jet_matrix(cls, dim: int, jets: Mapping[Multi, np.ndarray], jet_order) -> "Symbol":
        """Order-0, xi-independent symbol with matrix-valued x-jets."""
        side = next(iter(jets.values())).shape[0] if jets else 1
        term = SymbolTerm(dim, side, 0, 0, {b: XiPolynomial.constant(dim, M) for b, M in jets.items()})
        return cls(dim, side, {0: term}, 0, jet_order)

    # access -------------------------------------------------------------
    def term(self, degree: int) -> SymbolTerm:
        if degree < self.floor:
            raise TruncationError(f"degree {degree} lies below the exact floor {self.floor}")
        return self.terms.get(degree, SymbolTerm(self.dim, self.side, degree, 0, {}))

    def piece(self, degree: int) -> "Symbol":
        """The single homogeneous piece of the given degree, as an exact symbol."""
        return Symbol(self.dim, self.side, {degree: self.term(degree)}, degree, self.jet_order)

    def degrees(self) -> list[int]:
        return list(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        """Exact, with every piece polynomial in xi."""
        return self.floor == -math.inf and all(t.inv_power == 0 and t.degree >= 0
                                               for t in self.terms.values())

    def evaluate(self, degree: int, xi) -> np.ndarray:
        return self.term(degree).evaluate(xi)

    def _check(self, other: "Symbol"):
        if (self.dim, self.side) != (other.dim, other.side):
            raise DimensionError(
                f"incompatible symbols: dim/side {(self.dim, self.side)} vs {(other.dim, other.side)}")

    # linear structure ---------------------------------------------------
    def __add__(self, other: "Symbol") -> "Symbol":
        self._check(other)
        terms = dict(self.terms)
        for d, t in other.terms.items():
            terms[d] = terms[d] + t if d in terms else t
        return Symbol(self.dim, self.side, terms, max(self.order, other.order),
                      min(self.jet_order, other.jet_order), max(self.floor, other.floor))

    def __neg__(self) -> "Symbol":
        return self.scale(-1)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self + (-other)

    def scale(self, c: complex) -> "Symbol":
        return Symbol(self.dim, self.side, {d: t.scale(c) for d, t in self.terms.items()},
                      self.order, self.jet_order, self.floor)

    def lmul(self, M) -> "Symbol":
        return Symbol(self.dim, self.side, {d: t.lmul(M) for d, t in self.terms.items()},
                      self.order, self.jet_order, self.floor)

    def rmul(self, M) -> "Symbol":
        return Symbol(self.dim, self.side, {d: t.rmul(M) for d, t in self.terms.items()},
                      self.order, self.jet_order, self.floor)

    # derivatives --------------------------------------------------------
    def d_xi(self, i: int) -> "Symbol":
        return Symbol(self.dim, self.side, {d - 1: t.d_xi(i) for d, t in self.terms.items()},
                      self.order - 1, self.jet_order, self.floor - 1)

    def d_x(self, i: int) -> "Symbol":
        if self.jet_order < 1:
            raise JetDepthError(f"x-derivative requested but only {self.jet_order} jet orders are known")
        return Symbol(self.dim, self.side, {d: t.d_x(i) for d, t in self.terms.items()},
                      self.order, self.jet_order - 1, self.floor)

    def d_xi_alpha(self, alpha: Multi) -> "Symbol":
        out = self
        for i in _unit_steps(alpha):
            out = out.d_xi(i)
        return out

    def d_x_alpha(self, alpha: Multi) -> "Symbol":
        if sum(alpha) > self.jet_order:
            raise JetDepthError(
                f"need x-jets of order {sum(alpha)}, symbol carries only {self.jet_order}")
        out = self
        for i in _unit_steps(alpha):
            out = out.d_x(i)
        return out


# ---------------------------------------------------------------------------
# products

def multiply(a: Symbol, b: Symbol) -> Symbol:
    """Pointwise product ``a(x, xi) b(x, xi)`` (matrix order preserved)."""
    a._check(b)
    jet_order = min(a.jet_order, b.jet_order)
    floor = _floor_of_product(a, b)
    acc: dict = {}
    for da, ta in a.terms.items():
        for db, tb in b.terms.items():
            if da + db < floor:
                continue
            t = ta.mul(tb, jet_order)
            acc[t.degree] = acc[t.degree] + t if t.degree in acc else t
    return Symbol(a.dim, a.side, acc, a.order + b.order, jet_order, floor)


def compose(a: Symbol, b: Symbol, lowest_degree: Optional[int] = None) -> Symbol:
    """Symbol of the operator product, exact down to ``lowest_degree``.

    Uses ``sum_alpha (-i)^|alpha| / alpha! d_xi^alpha a  d_x^alpha b``.  With
    ``lowest_degree=None`` the expansion must terminate on its own, which
    requires ``a`` to be an exact polynomial symbol.
    """
    a._check(b)
    bound = _floor_of_product(a, b)
    if lowest_degree is None:
        if not a.is_polynomial():
            if bound == -math.inf:
                raise ValueError("lowest_degree is required unless the left factor is a polynomial symbol")
            lowest_degree = int(bound)
        max_alpha = a.order if a.is_polynomial() else a.order + b.order - lowest_degree
        floor = bound
    else:
        if lowest_degree < bound:
            raise TruncationError(
                f"degree {lowest_degree} requested but the product is only exact down to {bound}")
        max_alpha = a.order + b.order - lowest_degree
        floor = lowest_degree
    if a.is_polynomial():
        max_alpha = min(max_alpha, a.order)

    result = Symbol.zero(a.dim, a.side, a.order + b.order, min(a.jet_order, b.jet_order), floor)
    cache = {zero_index(a.dim): a}
    for size in range(0, max(max_alpha, -1) + 1):
        for alpha in multi_indices(a.dim, size):
            if size:
                i = next(k for k, v in enumerate(alpha) if v)
                da = cache[sub_index(alpha, unit_index(a.dim, i))].d_xi(i)
                cache[alpha] = da
            else:
                da = a
            live = Symbol(da.dim, da.side, da.terms, da.order, da.jet_order,
                          max(da.floor, floor - b.order))
            if live.is_zero():
                continue
            db = b.d_x_alpha(alpha)
            coef = (-1j) ** size / index_factorial(alpha)
            contribution = multiply(live, db).scale(coef)
            contribution = Symbol(a.dim, a.side, contribution.terms, a.order + b.order,
                                  contribution.jet_order, floor)
            result = result + contribution
    return Symbol(a.dim, a.side, result.terms, a.order + b.order, result.jet_order, floor)


# ---------------------------------------------------------------------------
# functions and commutators

def function_symbol(dim: int, side: int, jets: Mapping[Multi, float], jet_order=None) -> Symbol:
    """Scalar function ``f`` as an order-0 symbol, from its derivatives at the base point.

    ``jets`` maps an x multi-index to the derivative ``d_x^beta f``.  The jet
    order defaults to the largest ``|beta|`` supplied.
    """
    if jet_order is None:
        jet_order = max((sum(b) for b in jets), default=0)
    mats = {tuple(b): complex(v) * np.eye(side) for b, v in jets.items() if v != 0}
    term = SymbolTerm(dim, side, 0, 0, {b: XiPolynomial.constant(dim, M) for b, M in mats.items()})
    return Symbol(dim, side, {0: term}, 0, jet_order)


def function_from_derivatives(f0: float, f1, f2, side: int) -> Symbol:
    """Function symbol with value, gradient and Hessian (jet order 2)."""
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    n = f1.shape[0]
    jets = {zero_index(n): f0}
    for j in range(n):
        jets[unit_index(n, j)] = f1[j]
        for l in range(j, n):
            jets[add_index(unit_index(n, j), unit_index(n, l))] = f2[j, l]
    return function_symbol(n, side, jets, jet_order=2)


def commutator_with_function(S: Symbol, f: Symbol, lowest_degree: Optional[int] = None) -> Symbol:
    """Symbol of ``[S, f]`` for a scalar function ``f``.

    Sums ``D_x^beta f / beta! * d_xi^beta S`` over ``|beta| >= 1`` with
    ``D_x = -i d_x``.
    """
    S._check(f)
    if lowest_degree is None:
        if not S.is_polynomial():
            raise ValueError("lowest_degree is required for non-polynomial symbols")
        max_beta = S.order
        floor = -math.inf
    else:
        if lowest_degree < S.floor - 1:
            raise TruncationError(
                f"degree {lowest_degree} requested but the commutator is only exact down to {S.floor - 1}")
        max_beta = S.order - lowest_degree
        floor = lowest_degree
    out = Symbol.zero(S.dim, S.side, S.order - 1, min(S.jet_order, f.jet_order), floor)
    for size in range(1, max_beta + 1):
        for beta in multi_indices(S.dim, size):
            dS = S.d_xi_alpha(beta)
            if lowest_degree is not None:
                dS = Symbol(dS.dim, dS.side, dS.terms, dS.order, dS.jet_order, max(dS.floor, lowest_degree))
            if dS.is_zero():
                continue
            df = f.d_x_alpha(beta).scale((-1j) ** size / index_factorial(beta))
            out = out + multiply(dS, df)
    return Symbol(S.dim, S.side, out.terms, S.order - 1, out.jet_order, floor)


def commutator_product_symbol(S: Symbol, f: Symbol, h: Symbol, k: int, n: int) -> SymbolTerm:
    """Degree ``-n`` piece of the symbol of ``[S, f][S, h]`` at the base point.

    Direct multi-index sum over ``|a'| + |a''| + |b| + |d| + i + j = n + 2k``
    with ``|b|, |d| >= 1`` of

        D^b f D^(a'+d) h / (a'! a''! b! d!)
            * d_xi^(a'+a''+b) sigma_(k-i) * d_xi^d D_x^(a'') sigma_(k-j).

    Only the value at the base point is returned (no jets).
    """
    if 2 * k + n < 2:
        raise ValueError("need 2k + n >= 2")
    dim, side = S.dim, S.side
    total = n + 2 * k
    max_ij = total - 2
    if S.floor > k - max_ij:
        raise TruncationError(f"need pieces of S down to degree {k - max_ij}, exact only to {S.floor}")

    def jet_value(sym: Symbol, gamma: Multi) -> complex:
        if sum(gamma) > sym.jet_order:
            raise JetDepthError(f"need x-jets of order {sum(gamma)}")
        poly = sym.term(0).jets.get(tuple(gamma))
        if poly is None:
            return 0.0
        return complex(poly.terms.get(zero_index(dim), np.zeros((side, side)))[0, 0])

    def D(sym, gamma):
        return (-1j) ** sum(gamma) * jet_value(sym, gamma)

    @lru_cache(maxsize=None)
    def xi_derivative(deg: int, alpha: Multi) -> SymbolTerm:
        t = S.term(deg)
        for i in _unit_steps(alpha):
            t = t.d_xi(i)
        return t

    def x_jet(t: SymbolTerm, gamma: Multi) -> SymbolTerm:
        if sum(gamma) > S.jet_order:
            raise JetDepthError(f"need x-jets of S of order {sum(gamma)}")
        poly = t.jets.get(tuple(gamma), XiPolynomial.zero(dim, side))
        return SymbolTerm.from_value(t.degree, t.inv_power, poly)

    acc = SymbolTerm(dim, side, -n, 0, {})
    for i in range(0, max_ij + 1):
        for j in range(0, max_ij + 1 - i):
            rest = total - i - j
            for b in range(1, rest):
                for d in range(1, rest - b + 1):
                    for a1 in range(0, rest - b - d + 1):
                        a2 = rest - b - d - a1
                        for beta in multi_indices(dim, b):
                            fb = D(f, beta)
                            if fb == 0:
                                continue
                            for delta in multi_indices(dim, d):
                                for alpha1 in multi_indices(dim, a1):
                                    hd = D(h, add_index(alpha1, delta))
                                    if hd == 0:
                                        continue
                                    for alpha2 in multi_indices(dim, a2):
                                        left = xi_derivative(k - i, add_index(add_index(alpha1, alpha2), beta))
                                        if left.is_zero():
                                            continue
                                        right = x_jet(S.term(k - j), alpha2)
                                        if right.is_zero():
                                            continue
                                        for ax in _unit_steps(delta):
                                            right = right.d_xi(ax)
                                        coef = fb * hd * (-1j) ** a2 / (
                                            index_factorial(alpha1) * index_factorial(alpha2)
                                            * index_factorial(beta) * index_factorial(delta))
                                        acc = acc + left.mul(right, 0).scale(coef)
    return acc


# ---------------------------------------------------------------------------
# parametrix

def parametrix_inverse(S: Symbol, depth: int) -> Symbol:
    """Right parametrix ``B`` of an order-2 symbol with leading part ``c |xi|^2 Id``.

    ``compose(S, B)`` equals the identity symbol at every degree ``0 .. -depth``.
    The result carries pieces of degree ``-2 .. -2-depth``.
    """
    if S.order != 2:
        raise SymbolInversionError(f"expected an order-2 symbol, got order {S.order}")
    dim, side = S.dim, S.side
    lead = S.term(2)
    nsq = XiPolynomial.norm_sq_power(dim, side, 1)
    value = lead.numerator
    e11 = (2,) + (0,) * (dim - 1)
    C = value.terms.get(e11)
    lam = complex(C[0, 0]) if C is not None else 0.0
    if (lam == 0 or lead.inv_power != 0 or set(lead.jets) != {zero_index(dim)}
            or not (value - nsq.scale(lam)).is_zero()):
        raise SymbolInversionError("leading symbol is not an x-constant multiple of |xi|^2 Id")
    if S.floor > 2 - depth:
        raise TruncationError(f"parametrix to depth {depth} needs S exact down to degree {2 - depth}")

    inv_lead = Symbol(dim, side, {-2: SymbolTerm.from_value(-2, 1, XiPolynomial.constant(dim, np.eye(side) / lam))}, -2)
    s = {l: S.piece(2 - l) for l in range(depth + 1)}
    b = {0: inv_lead}
    for j in range(1, depth + 1):
        acc = Symbol.zero(dim, side, -j)
        for k in range(j):
            for l in range(j - k + 1):
                size = j - k - l
                for alpha in multi_indices(dim, size):
                    ds = s[l].d_xi_alpha(alpha)
                    if ds.is_zero():
                        continue
                    db = b[k].d_x_alpha(alpha)
                    acc = acc + multiply(ds, db).scale((-1j) ** size / index_factorial(alpha))
        bj = multiply(inv_lead, acc).scale(-1)
        b[j] = Symbol(dim, side, bj.terms, -2 - j, bj.jet_order)
    terms = {}
    jet_order = math.inf
    for j, sym in b.items():
        terms[-2 - j] = sym.term(-2 - j)
        jet_order = min(jet_order, sym.jet_order)
    return Symbol(dim, side, terms, -2, jet_order, -2 - depth)


def symbol_power(S: Symbol, k: int) -> Symbol:
    """``S`` composed with itself ``k`` times, exact as far as the factors allow."""
    if k < 1:
        raise ValueError("power must be positive")
    out = S
    for _ in range(k - 1):
        out = compose(out, S)
    return out
