"""
Symbols of Dirac-type operators at a normal-coordinate base point.

At the base point the metric is Euclidean and all connection terms vanish, so
``D + Phi`` has the flat symbol ``sqrt(-1) c(xi) + Phi``.  Everything else
(squares, inverse powers, commutators with ``f``, sandwiches by ``c(u)`` and
``c(v)``) is derived from it with the generic symbol calculus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clifford import AntisymTensor3, CliffordRep, clifford_three_form, clifford_vector
from .errors import DimensionError
from .symbols import (Symbol, SymbolTerm, XiPolynomial, commutator_with_function, compose,
                      function_from_derivatives, parametrix_inverse, symbol_power, unit_index,
                      zero_index)

KINDS = ("none", "grading", "vector_grading", "torsion_grading", "torsion_vector")


@dataclass(frozen=True)
class PerturbationSpec:
    """Zeroth-order perturbation ``Phi`` of the Dirac operator.

    ``kind`` selects ``0``, ``gamma``, ``c(X) gamma``, ``sqrt(-1) c(T) gamma``
    or ``c(T) + sqrt(-1) c(Y)``.
    """

    kind: str = "none"
    X: Optional[np.ndarray] = None
    T: Optional[AntisymTensor3] = None
    Y: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}; expected one of {KINDS}")
        needs = {"vector_grading": ("X",), "torsion_grading": ("T",), "torsion_vector": ("T", "Y")}
        for name in needs.get(self.kind, ()):
            if getattr(self, name) is None:
                raise ValueError(f"perturbation {self.kind!r} requires {name}")
        for name in ("X", "Y"):
            val = getattr(self, name)
            if val is not None:
                arr = np.array(val, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    def check_dim(self, n: int):
        for name in ("X", "Y"):
            val = getattr(self, name)
            if val is not None and val.shape != (n,):
                raise DimensionError(f"{name} has shape {val.shape}, expected ({n},)")
        if self.T is not None and self.T.dim != n:
            raise DimensionError(f"T has dimension {self.T.dim}, expected {n}")

    def matrix(self, rep: CliffordRep) -> np.ndarray:
        """The endomorphism ``Phi``."""
        self.check_dim(rep.dim)
        if self.kind == "none":
            return np.zeros((rep.side, rep.side), dtype=complex)
        if self.kind == "grading":
            return np.array(rep.grading)
        if self.kind == "vector_grading":
            return clifford_vector(rep, self.X) @ rep.grading
        if self.kind == "torsion_grading":
            return 1j * clifford_three_form(rep, self.T) @ rep.grading
        return clifford_three_form(rep, self.T) + 1j * clifford_vector(rep, self.Y)

    @classmethod
    def random(cls, kind: str, n: int, rng: np.random.Generator) -> "PerturbationSpec":
        if kind == "none":
            return cls()
        if kind == "grading":
            return cls("grading")
        if kind == "vector_grading":
            return cls(kind, X=rng.uniform(-1, 1, n))
        if kind == "torsion_grading":
            return cls(kind, T=AntisymTensor3.random(n, rng))
        if kind == "torsion_vector":
            return cls(kind, T=AntisymTensor3.random(n, rng), Y=rng.uniform(-1, 1, n))
        raise ValueError(f"unknown perturbation kind {kind!r}")


@dataclass(frozen=True)
class JetData:
    """Pointwise data at the base point.

    ``f1[j] = d_j f``, ``f2[j, l] = d_j d_l f``, ``dv[j, k] = d_j v_k``.
    ``du`` is accepted for symmetry but never enters the densities.
    """

    n: int
    f1: np.ndarray
    f2: np.ndarray
    u: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    du: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.n
        if n < 2 or n % 2:
            raise DimensionError(f"dimension must be even and >= 2, got {n}")
        shapes = {"f1": (n,), "f2": (n, n), "u": (n,), "v": (n,), "dv": (n, n)}
        if self.du is not None:
            shapes["du"] = (n, n)
        for name, shape in shapes.items():
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.allclose(self.f2, self.f2.T, atol=1e-12):
            raise ValueError("f2 (Hessian of f) must be symmetric")
        self.perturbation.check_dim(n)

    @classmethod
    def random(cls, n: int, seed: int, kind: str = "none") -> "JetData":
        """Components uniform in [-1, 1]; the Hessian is symmetrised after the draw."""
        rng = np.random.default_rng(seed)
        f1 = rng.uniform(-1, 1, n)
        f2 = rng.uniform(-1, 1, (n, n))
        f2 = (f2 + f2.T) / 2
        u = rng.uniform(-1, 1, n)
        v = rng.uniform(-1, 1, n)
        dv = rng.uniform(-1, 1, (n, n))
        pert = PerturbationSpec.random(kind, n, rng)
        return cls(n, f1, f2, u, v, dv, pert)

    @classmethod
    def plain(cls, n: int, f1=None, f2=None, perturbation: Optional[PerturbationSpec] = None) -> "JetData":
        """Data for the bare commutator: ``u = v = 0`` placeholders, no ``dv``."""
        z = np.zeros(n)
        return cls(n, z if f1 is None else f1, np.zeros((n, n)) if f2 is None else f2, z, z,
                   np.zeros((n, n)), perturbation or PerturbationSpec())

    def laplacian_coord(self) -> float:
        """``sum_j d_j^2 f`` (the coordinate Laplacian, positive convention)."""
        return float(np.trace(self.f2))

    def grad_f(self) -> np.ndarray:
        return np.array(self.f1)

    def g_uv(self) -> float:
        return float(self.u @ self.v)

    def g_u_nabla_v(self) -> float:
        """``g(u, nabla_{grad f} v) = sum_{j,k} d_j f u_k d_j v_k`` at the base point."""
        return float(np.einsum("j,k,jk->", self.f1, self.u, self.dv))


# ---------------------------------------------------------------------------
# operator symbols

def _clifford_xi(rep: CliffordRep) -> XiPolynomial:
    return XiPolynomial.linear([1j * g for g in rep.generators])


def dirac_symbol(rep: CliffordRep, pert: PerturbationSpec) -> Symbol:
    """``sigma(D + Phi) = sqrt(-1) c(xi) + Phi`` (x-flat)."""
    n, side = rep.dim, rep.side
    terms = {1: SymbolTerm.from_value(1, 0, _clifford_xi(rep)),
             0: SymbolTerm.from_value(0, 0, XiPolynomial.constant(n, pert.matrix(rep)))}
    return Symbol(n, side, terms, 1)


def laplacian_symbol(rep: CliffordRep, pert: PerturbationSpec) -> Symbol:
    """Symbol of ``(D + Phi)^2`` by composing the Dirac symbol with itself."""
    D = dirac_symbol(rep, pert)
    return compose(D, D)


def anticommutator_coefficients(rep: CliffordRep, pert: PerturbationSpec) -> list[np.ndarray]:
    """``A_i = c(e_i) Phi + Phi c(e_i)``."""
    Phi = pert.matrix(rep)
    return [g @ Phi + Phi @ g for g in rep.generators]


def inverse_power_symbols(rep: CliffordRep, pert: PerturbationSpec, k: int) -> Symbol:
    """Symbol of ``(D + Phi)^(-k)`` with its top two degrees exact."""
    if not 1 <= k <= rep.dim + 2:
        raise ValueError(f"power must satisfy 1 <= k <= n + 2, got {k}")
    lap = laplacian_symbol(rep, pert)
    inv2 = parametrix_inverse(lap, 1)
    if k % 2 == 0:
        return symbol_power(inv2, k // 2)
    inv1 = compose(dirac_symbol(rep, pert), inv2)
    if k == 1:
        return inv1
    return compose(symbol_power(inv2, (k - 1) // 2), inv1)


def function_symbol_from_jets(jets: JetData, side: int) -> Symbol:
    return function_from_derivatives(0.0, jets.f1, jets.f2, side)


def commutator_laplacian_f(rep: CliffordRep, pert: PerturbationSpec, jets: JetData) -> Symbol:
    """Symbol of ``[(D + Phi)^2, f]``."""
    return commutator_with_function(laplacian_symbol(rep, pert), function_symbol_from_jets(jets, rep.side))


def clifford_vector_symbol(rep: CliffordRep, v, dv=None) -> Symbol:
    """``c(v)`` as an order-0 symbol; first x-jets ``c(d_j v)`` when ``dv`` is given."""
    n = rep.dim
    jets = {zero_index(n): clifford_vector(rep, v)}
    if dv is None:
        return Symbol.jet_matrix(n, jets, 0)
    dv = np.asarray(dv, dtype=float)
    for j in range(n):
        jets[unit_index(n, j)] = clifford_vector(rep, dv[j])
    return Symbol.jet_matrix(n, jets, 1)


def sandwich_uv(rep: CliffordRep, jets: JetData, commutator: Symbol) -> Symbol:
    """Symbol of ``c(u) P c(v)``; ``c(v)`` carries first jets from ``dv``."""
    cu = clifford_vector_symbol(rep, jets.u)
    cv = clifford_vector_symbol(rep, jets.v, jets.dv)
    return compose(cu, compose(commutator, cv))
