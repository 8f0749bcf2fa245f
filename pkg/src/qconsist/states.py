"""Density matrices: validation, partial trace, distances, and measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NegativityError,
    NonHermitianError,
    SubsetError,
    TraceError,
)
from .paulis import PauliString, dense_matrix

MAX_QUBITS = 12

# Downstream optimizers hand back near-PSD iterates; this is the default
# slack before validation rejects instead of clipping.
DEFAULT_DENSITY_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return 2**self.n


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise DimensionMismatchError(f"dimension {dim} is not a power of two")
    return n


def validate_density(M: np.ndarray, tol: float = DEFAULT_DENSITY_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace, and positivity within ``tol``.

    Eigenvalues in [-tol, 0) are clipped to zero and the matrix renormalized;
    anything worse raises. Inputs that already satisfy the constraints
    exactly are passed through unchanged.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"not square: shape {M.shape}")
    n = _qubit_count(M.shape[0])
    dev = np.max(np.abs(M - M.conj().T))
    if dev > tol:
        raise NonHermitianError(f"Hermiticity violated by {dev:.3e}")
    tr = np.trace(M).real
    if abs(tr - 1.0) > tol:
        raise TraceError(f"trace {tr:.12g} is not 1 within {tol:.1e}")
    H = (M + M.conj().T) / 2
    w, V = np.linalg.eigh(H)
    if w[0] < -tol:
        raise NegativityError(f"eigenvalue {w[0]:.3e} below -{tol:.1e}")
    if w[0] < 0 or abs(tr - 1.0) > 1e-14:
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        H = (V * w) @ V.conj().T
        H = (H + H.conj().T) / 2
    out = H.copy()
    out.setflags(write=False)
    return DensityMatrix(n=n, matrix=out)


def partial_trace(state: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not in ``keep`` (1-based, result in ascending order)."""
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise SubsetError("keep set is empty")
    if keep[0] < 1 or keep[-1] > state.n:
        raise SubsetError(f"keep set {keep} outside 1..{state.n}")
    n = state.n
    drop = [q for q in range(1, n + 1) if q not in keep]
    tensor = state.matrix.reshape((2,) * (2 * n))
    for q in reversed(drop):
        ax = q - 1
        # trace over the (ket, bra) axis pair of qubit q; earlier kept axes
        # keep their positions because we walk from the highest dropped qubit.
        tensor = np.trace(tensor, axis1=ax, axis2=ax + tensor.ndim // 2)
    dim = 2 ** len(keep)
    out = np.ascontiguousarray(tensor.reshape(dim, dim))
    out.setflags(write=False)
    return DensityMatrix(n=len(keep), matrix=out)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """L1 distance ||rho - sigma||_1, via the spectrum of the difference."""
    if rho.matrix.shape != sigma.matrix.shape:
        raise DimensionMismatchError(
            f"shape mismatch {rho.matrix.shape} vs {sigma.matrix.shape}"
        )
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(np.sum(np.abs(w)))


def expectation(state: DensityMatrix, p: PauliString) -> float:
    if p.n != state.n:
        raise DimensionMismatchError(f"{p.n}-qubit string vs {state.n}-qubit state")
    val = np.trace(dense_matrix(p) @ state.matrix)
    return float(val.real)


def povm_two_outcome(p: PauliString, state: DensityMatrix) -> tuple[float, float]:
    """Outcome probabilities of measuring {(I+P)/2, (I-P)/2}.

    The difference of the two probabilities equals the expectation of P, and
    any two-outcome measurement distinguishes two states by at most half
    their trace distance, which is what makes this measurement a witness.
    """
    if p.n != state.n:
        raise DimensionMismatchError(f"{p.n}-qubit string vs {state.n}-qubit state")
    e = expectation(state, p)
    return (1.0 + e) / 2.0, (1.0 - e) / 2.0


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionMismatchError(f"qubit count {n} outside 1..{MAX_QUBITS}")


def random_pure(rng: np.random.Generator, n: int) -> DensityMatrix:
    """Haar-style random pure state from a normalized complex Gaussian vector."""
    _check_n(n)
    dim = 2**n
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    M = np.outer(v, v.conj())
    M.setflags(write=False)
    return DensityMatrix(n=n, matrix=M)


def random_mixed(rng: np.random.Generator, n: int, rank: int | None = None) -> DensityMatrix:
    """Random full-rank (or rank-limited) mixed state, normalized G G†."""
    _check_n(n)
    dim = 2**n
    r = dim if rank is None else int(rank)
    if not 1 <= r <= dim:
        raise DimensionMismatchError(f"rank {r} outside 1..{dim}")
    G = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    M = G @ G.conj().T
    M /= np.trace(M).real
    M = (M + M.conj().T) / 2
    M.setflags(write=False)
    return DensityMatrix(n=n, matrix=M)


def pure_state(vec: np.ndarray) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).ravel()
    n = _qubit_count(v.size)
    v = v / np.linalg.norm(v)
    M = np.outer(v, v.conj())
    M.setflags(write=False)
    return DensityMatrix(n=n, matrix=M)


def maximally_mixed(n: int) -> DensityMatrix:
    _check_n(n)
    M = np.eye(2**n, dtype=complex) / 2**n
    M.setflags(write=False)
    return DensityMatrix(n=n, matrix=M)


def bell_phi_plus() -> DensityMatrix:
    return pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2))


def singlet() -> DensityMatrix:
    return pure_state(np.array([0, 1, -1, 0]) / np.sqrt(2))


def ghz(n: int) -> DensityMatrix:
    _check_n(n)
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return pure_state(v)
