"""
Gamma-matrix realisation of the Euclidean Clifford algebra in even dimension.

Conventions
-----------
The generators are anti-Hermitian and satisfy

    gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij Id,

so Clifford multiplication by a vector squares to minus its length.  The
grading (chirality) operator is ``(sqrt(-1))**m * gamma_1 ... gamma_n`` with
``n = 2m``; it squares to the identity and anticommutes with every generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError

MAX_DIM = 12

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


def _kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


@dataclass(frozen=True)
class CliffordRep:
    """Concrete generators and grading for ``Cl(R^n)`` with n even."""

    dim: int
    generators: tuple[np.ndarray, ...]
    grading: np.ndarray

    @property
    def m(self) -> int:
        return self.dim // 2

    @property
    def side(self) -> int:
        return 2 ** self.m

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.side, dtype=complex)

    def product(self, indices: Sequence[int]) -> np.ndarray:
        """Ordered product ``gamma_{i1} gamma_{i2} ...`` (0-based indices)."""
        out = self.identity
        for i in indices:
            out = out @ self.generators[i]
        return out


def build_rep(n: int) -> CliffordRep:
    """Build anti-Hermitian gamma matrices for ``n = 2m``, ``2 <= n <= 12``.

    Jordan-Wigner construction: for the k-th qubit the Hermitian pair
    ``Z...Z X I...I`` and ``Z...Z Y I...I`` anticommute with everything else;
    multiplying by ``sqrt(-1)`` turns squares ``+1`` into ``-1``.
    """
    if not isinstance(n, (int, np.integer)) or n % 2 or not 2 <= n <= MAX_DIM:
        raise DimensionError(f"dimension must be even and in [2, {MAX_DIM}], got {n!r}")
    m = n // 2
    gens = []
    for k in range(m):
        head = [_SIGMA_Z] * k
        tail = [_ID2] * (m - k - 1)
        for pauli in (_SIGMA_X, _SIGMA_Y):
            g = 1j * _kron_all(head + [pauli] + tail)
            g.setflags(write=False)
            gens.append(g)
    vol = _kron_all([_ID2] * m)
    for g in gens:
        vol = vol @ g
    grading = (1j ** m) * vol
    grading.setflags(write=False)
    return CliffordRep(dim=n, generators=tuple(gens), grading=grading)


def _check_vector(rep: CliffordRep, v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (rep.dim,):
        raise DimensionError(f"expected a length-{rep.dim} vector, got shape {arr.shape}")
    return arr


def clifford_vector(rep: CliffordRep, v) -> np.ndarray:
    """Clifford multiplication ``c(v) = sum_i v_i gamma_i``."""
    arr = _check_vector(rep, v)
    return np.tensordot(arr, np.stack(rep.generators), axes=1)


@dataclass(frozen=True)
class AntisymTensor3:
    """Totally antisymmetric 3-tensor stored on strictly increasing triples.

    Indices are 0-based.  Evaluation on any triple applies the permutation
    sign, and vanishes on repeated indices.
    """

    dim: int
    components: Mapping[tuple[int, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.components).items():
            a, b, c = key
            if not (0 <= a < b < c < self.dim):
                raise DimensionError(f"triple {key} is not strictly increasing in range({self.dim})")
            if value != 0:
                clean[(int(a), int(b), int(c))] = float(value)
        object.__setattr__(self, "components", clean)

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "AntisymTensor3":
        n = dense.shape[0]
        return cls(n, {t: dense[t] for t in combinations(range(n), 3)})

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "AntisymTensor3":
        triples = list(combinations(range(dim), 3))
        values = rng.uniform(-1.0, 1.0, size=len(triples))
        return cls(dim, dict(zip(triples, values)))

    def __call__(self, i: int, j: int, k: int) -> float:
        if len({i, j, k}) < 3:
            return 0.0
        order = sorted((i, j, k))
        perm = [order.index(x) for x in (i, j, k)]
        inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
        return (-1) ** inversions * self.components.get(tuple(order), 0.0)

    def dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * 3)
        for (a, b, c), t in self.components.items():
            for (i, j, k), s in (((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                                 ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)):
                out[i, j, k] = s * t
        return out

    def evaluate(self, u, v, w) -> float:
        """``T(u, v, w)`` for vectors u, v, w."""
        return float(np.einsum("ijk,i,j,k->", self.dense(), u, v, w))


def clifford_three_form(rep: CliffordRep, T: AntisymTensor3) -> np.ndarray:
    """``c(T) = sum_{a<b<c} T_abc gamma_a gamma_b gamma_c``."""
    if T.dim != rep.dim:
        raise DimensionError(f"3-form of dimension {T.dim} on a rep of dimension {rep.dim}")
    out = np.zeros((rep.side, rep.side), dtype=complex)
    for triple, value in T.components.items():
        out += value * rep.product(triple)
    return out


def supertrace(rep: CliffordRep, M: np.ndarray) -> complex:
    """``Str(M) = Tr(grading @ M)``."""
    M = np.asarray(M)
    if M.shape != (rep.side, rep.side):
        raise DimensionError(f"expected a {rep.side}x{rep.side} matrix, got {M.shape}")
    return complex(np.trace(rep.grading @ M))


def wedge_pairing(covectors) -> float:
    """Pair ``w_1 ^ ... ^ w_n`` with the standard volume form (a determinant)."""
    arr = np.asarray(covectors, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"need n covectors of length n, got shape {arr.shape}")
    return float(np.linalg.det(arr))
