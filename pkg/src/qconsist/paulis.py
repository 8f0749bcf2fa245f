"""Pauli-string algebra, dense Hermitian primitives, and the local Pauli basis.

Conventions used throughout the package:

* qubits are numbered 1..n externally; bit twiddling is 0-based internally,
* qubit 1 is the most significant tensor factor, so ``dense_matrix("XZ")``
  equals ``kron(X, Z)`` and basis state ``|q1 q2 ... qn>`` has index
  ``q1*2^(n-1) + ... + qn``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonHermitianError,
    PauliFormatError,
    SubsetError,
    SupportError,
)

PAULI_CHARS = "IXYZ"

ONE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Largest dense dimension we are willing to diagonalize (n = 12 qubits).
MAX_DENSE_DIM = 4096


@dataclass(frozen=True, order=True)
class PauliString:
    """An n-qubit Pauli string, stored as its label, e.g. ``"IXZ"``."""

    factors: str

    def __post_init__(self) -> None:
        if not self.factors or any(c not in PAULI_CHARS for c in self.factors):
            raise PauliFormatError(f"bad Pauli label {self.factors!r}")

    @property
    def n(self) -> int:
        return len(self.factors)

    def support(self) -> tuple[int, ...]:
        """1-based positions carrying a non-identity factor."""
        return tuple(q for q, c in enumerate(self.factors, start=1) if c != "I")

    def is_identity(self) -> bool:
        return set(self.factors) == {"I"}

    def restrict(self, subset: tuple[int, ...]) -> "PauliString":
        """The ordered tensor factor of this string over ``subset``.

        Requires the support to lie inside ``subset``; anything acting
        outside would be silently dropped, so that case is an error.
        """
        members = set(subset)
        outside = [q for q in self.support() if q not in members]
        if outside:
            raise SupportError(
                f"{self.factors} acts on {outside} outside subset {sorted(members)}"
            )
        return PauliString("".join(self.factors[q - 1] for q in sorted(members)))

    def embed(self, subset: tuple[int, ...], n: int) -> "PauliString":
        """Inverse of restrict: place the factors on ``subset`` within n qubits."""
        ordered = sorted(subset)
        if len(ordered) != len(self.factors):
            raise DimensionMismatchError(
                f"{len(self.factors)}-qubit string cannot sit on subset {ordered}"
            )
        chars = ["I"] * n
        for c, q in zip(self.factors, ordered):
            if not 1 <= q <= n:
                raise SubsetError(f"qubit {q} outside 1..{n}")
            chars[q - 1] = c
        return PauliString("".join(chars))

    @staticmethod
    def identity(n: int) -> "PauliString":
        return PauliString("I" * n)

    def __str__(self) -> str:
        return self.factors


def dense_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the string (qubit 1 = leftmost kron factor)."""
    out = ONE_QUBIT[p.factors[0]]
    for c in p.factors[1:]:
        out = np.kron(out, ONE_QUBIT[c])
    return out


def require_hermitian(A: np.ndarray, tol: float = 1e-12, what: str = "matrix") -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"{what} is not square: shape {A.shape}")
    dev = np.max(np.abs(A - A.conj().T))
    if dev > tol:
        raise NonHermitianError(f"{what} deviates from Hermitian by {dev:.3e}")


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(A† B)."""
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch {A.shape} vs {B.shape}")
    return complex(np.trace(A.conj().T @ B))


def pauli_expansion(H: np.ndarray, tol: float = 1e-12) -> dict[PauliString, float]:
    """Expand a Hermitian matrix over all Pauli strings on its qubit count.

    Returns real coefficients beta_P = Tr(P H) / 2^c, so that
    sum_P beta_P * dense_matrix(P) reconstructs H.
    """
    require_hermitian(H, tol=tol, what="expansion input")
    dim = H.shape[0]
    c = dim.bit_length() - 1
    if 2**c != dim:
        raise DimensionMismatchError(f"dimension {dim} is not a power of two")
    out: dict[PauliString, float] = {}
    for chars in product(PAULI_CHARS, repeat=c):
        p = PauliString("".join(chars))
        coeff = np.trace(dense_matrix(p) @ H) / dim
        out[p] = float(coeff.real)
    return out


def hermitian_eigensystem(A: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Rejects matrices above dimension 4096; everything here is desk scale and
    dense diagonalization is the simplest method meeting the residual contract.
    """
    require_hermitian(A, tol=tol, what="eigensystem input")
    if A.shape[0] > MAX_DENSE_DIM:
        raise DimensionMismatchError(
            f"dimension {A.shape[0]} exceeds the dense cap {MAX_DENSE_DIM}"
        )
    w, V = np.linalg.eigh(A)
    return w, V


@dataclass(frozen=True)
class LocalPauliBasis:
    """The ordered set of non-identity Pauli strings local to some subset.

    ``elements`` excludes the identity and is sorted by (support, label) so
    that coefficient vectors index reproducibly across runs and processes.
    """

    n: int
    layout: tuple[tuple[int, ...], ...]
    elements: tuple[PauliString, ...]
    index: dict[PauliString, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "index", {p: i for i, p in enumerate(self.elements)}
        )

    @property
    def d(self) -> int:
        return len(self.elements)

    def covering_subset(self, p: PauliString) -> int:
        """Index of the first layout subset containing supp(p)."""
        supp = set(p.support())
        for i, C in enumerate(self.layout):
            if supp <= set(C):
                return i
        raise SupportError(f"{p.factors} not local to any subset in the layout")


def _normalize_layout(layout, n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for C in layout:
        C = tuple(sorted(set(int(q) for q in C)))
        if not C:
            raise SubsetError("empty subset in layout")
        if C[0] < 1 or C[-1] > n:
            raise SubsetError(f"subset {C} outside 1..{n}")
        out.append(C)
    if not out:
        raise SubsetError("layout has no subsets")
    return tuple(out)


def local_pauli_set(layout, n: int) -> LocalPauliBasis:
    """All non-identity strings supported inside some layout subset."""
    layout = _normalize_layout(layout, n)
    seen: set[PauliString] = set()
    for C in layout:
        for chars in product(PAULI_CHARS, repeat=len(C)):
            if set(chars) == {"I"}:
                continue
            seen.add(PauliString("".join(chars)).embed(C, n))
    elements = tuple(sorted(seen, key=lambda p: (p.support(), p.factors)))
    return LocalPauliBasis(n=n, layout=layout, elements=elements)


@functools.lru_cache(maxsize=64)
def pauli_table(basis: LocalPauliBasis) -> tuple[np.ndarray, np.ndarray]:
    """Row-sparse form of every basis element, for the solver kernels.

    A Pauli string has exactly one nonzero per row: P[r, r ^ xmask] with a
    unit-modulus value. Returns (cols, vals) of shape (d, 2^n) such that
    P_p[r, cols[p, r]] = vals[p, r].
    """
    dim = 2**basis.n
    rows = np.arange(dim)
    cols = np.empty((basis.d, dim), dtype=np.int32)
    vals = np.empty((basis.d, dim), dtype=np.complex128)
    for p_idx, p in enumerate(basis.elements):
        xmask = 0
        v = np.ones(dim, dtype=np.complex128)
        for q, c in enumerate(p.factors, start=1):
            bit = (rows >> (basis.n - q)) & 1
            if c == "X":
                xmask |= 1 << (basis.n - q)
            elif c == "Y":
                xmask |= 1 << (basis.n - q)
                v = v * (-1j) * np.where(bit, -1.0, 1.0)
            elif c == "Z":
                v = v * np.where(bit, -1.0, 1.0)
        cols[p_idx] = rows ^ xmask
        vals[p_idx] = v
    return cols, vals


def embed_operator(M: np.ndarray, subset: tuple[int, ...], n: int) -> np.ndarray:
    """Place an operator on ``subset`` (ascending order) inside n qubits."""
    ordered = sorted(set(subset))
    c = len(ordered)
    if M.shape != (2**c, 2**c):
        raise DimensionMismatchError(
            f"operator shape {M.shape} does not fit subset {ordered}"
        )
    if not ordered or ordered[0] < 1 or ordered[-1] > n:
        raise SubsetError(f"subset {ordered} outside 1..{n}")
    rest = [q for q in range(1, n + 1) if q not in ordered]
    big = np.kron(M, np.eye(2 ** len(rest), dtype=complex))
    # big currently lives on qubit order (subset..., rest...); permute to 1..n.
    order = ordered + rest
    perm = np.argsort(order)
    tensor = big.reshape((2,) * (2 * n))
    tensor = tensor.transpose(tuple(perm) + tuple(n + p for p in perm))
    return np.ascontiguousarray(tensor.reshape(2**n, 2**n))
