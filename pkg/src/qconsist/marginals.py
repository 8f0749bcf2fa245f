"""Consistency instances in both coordinate systems, and the maps between them.

A consistency instance hands out density matrices on overlapping qubit
subsets and asks whether one global state has them all as marginals. The
same question can be posed in expectation coordinates: the instance is then
a real vector alpha indexed by the local Pauli basis, and consistency means
some global state reproduces every expectation. The two forms are linked by
a linear bijection; the expectation form is what the solver consumes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    OverlapMismatchError,
    QconsistError,
    SubsetError,
)
from .paulis import LocalPauliBasis, PauliString, dense_matrix, local_pauli_set
from .states import (
    DensityMatrix,
    partial_trace,
    random_mixed,
    singlet,
    validate_density,
)

OVERLAP_TOL = 1e-8

# Promise gap carried by the canonical pairwise-singlet preset below. The
# squared Euclidean infeasibility of that target exceeds 0.6 (certified by
# the solver's convergence bound), and 0.6/sqrt(36) = 0.1.
SINGLET_TRIANGLE_BETA = 0.1
SINGLET_TRIANGLE_LAYOUT = ((1, 2), (2, 3), (1, 3))


@dataclass(frozen=True)
class AlphaVector:
    """Expectation values indexed by a local Pauli basis.

    The identity's expectation is always 1 and is never stored.
    """

    basis: LocalPauliBasis
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.basis.d,):
            raise DimensionMismatchError(
                f"expected {self.basis.d} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise QconsistError("alpha vector has non-finite entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, p: PauliString) -> float:
        return float(self.values[self.basis.index[p]])


@dataclass(frozen=True)
class ConsistencyInstance:
    """Marginal-form instance: subsets, their density matrices, and the gap beta."""

    n: int
    layout: tuple[tuple[int, ...], ...]
    marginals: tuple[DensityMatrix, ...]
    beta: float

    def __post_init__(self) -> None:
        if len(self.layout) != len(self.marginals):
            raise DimensionMismatchError("one marginal per subset required")
        for C, rho in zip(self.layout, self.marginals):
            if not C or min(C) < 1 or max(C) > self.n:
                raise SubsetError(f"subset {C} outside 1..{self.n}")
            if rho.n != len(C):
                raise DimensionMismatchError(
                    f"marginal on {rho.n} qubits attached to subset {C}"
                )
        if not self.beta > 0:
            raise QconsistError(f"beta must be positive, got {self.beta}")

    @property
    def m(self) -> int:
        return len(self.layout)


@dataclass(frozen=True)
class ConsistencyPrimeInstance:
    """Expectation-form instance with Euclidean promise gap beta_prime.

    NO instances may carry out-of-range entries (|alpha_P| > 1); only
    finiteness is enforced here.
    """

    n: int
    basis: LocalPauliBasis
    alphas: AlphaVector
    beta_prime: float

    def __post_init__(self) -> None:
        if self.alphas.basis is not self.basis and self.alphas.basis != self.basis:
            raise DimensionMismatchError("alpha vector indexed by a different basis")
        if self.basis.n != self.n:
            raise DimensionMismatchError("basis qubit count differs from instance")
        if not self.beta_prime > 0:
            raise QconsistError(f"beta_prime must be positive, got {self.beta_prime}")

    @property
    def layout(self) -> tuple[tuple[int, ...], ...]:
        return self.basis.layout


def marginals_to_alphas(inst: ConsistencyInstance, basis: LocalPauliBasis) -> AlphaVector:
    """Read off alpha_P = Tr((P|C_i) rho_i) for each basis element.

    Every subset covering P must give the same value within OVERLAP_TOL;
    marginals that disagree on an overlap cannot come from one state, and
    the map is only well defined when they agree, so disagreement raises.
    The first covering subset supplies the stored value.
    """
    if basis.layout != inst.layout:
        raise DimensionMismatchError("basis was built from a different layout")
    values = np.empty(basis.d)
    for idx, p in enumerate(basis.elements):
        supp = set(p.support())
        first_i = -1
        first_val = 0.0
        for i, C in enumerate(inst.layout):
            if not supp <= set(C):
                continue
            restricted = dense_matrix(p.restrict(C))
            val = float(np.trace(restricted @ inst.marginals[i].matrix).real)
            if first_i < 0:
                first_i, first_val = i, val
            elif abs(val - first_val) > OVERLAP_TOL:
                raise OverlapMismatchError(first_i, i, p.factors, first_val, val)
        values[idx] = first_val
    return AlphaVector(basis=basis, values=values)


@dataclass(frozen=True)
class MarginalReconstruction:
    """Raw marginal matrices rebuilt from expectation coordinates.

    Off the consistent set the formula can produce indefinite matrices, so
    instead of failing the reconstruction reports the minimum eigenvalue of
    each matrix and whether it clears the PSD tolerance.
    """

    matrices: tuple[np.ndarray, ...]
    min_eigs: tuple[float, ...]
    psd_ok: tuple[bool, ...]
    tol: float


def alphas_to_marginals(
    alpha: AlphaVector, layout=None, tol: float = 1e-9
) -> MarginalReconstruction:
    """Rebuild each marginal as 2^-|C| (I + sum over covered P of alpha_P P|C)."""
    basis = alpha.basis
    if layout is None:
        layout = basis.layout
    matrices = []
    min_eigs = []
    psd_ok = []
    for C in layout:
        c = len(C)
        M = np.eye(2**c, dtype=complex)
        members = set(C)
        for idx, p in enumerate(basis.elements):
            if set(p.support()) <= members:
                M = M + alpha.values[idx] * dense_matrix(p.restrict(tuple(C)))
        M /= 2**c
        w = np.linalg.eigvalsh(M)
        matrices.append(M)
        min_eigs.append(float(w[0]))
        psd_ok.append(bool(w[0] >= -tol))
    return MarginalReconstruction(
        matrices=tuple(matrices),
        min_eigs=tuple(min_eigs),
        psd_ok=tuple(psd_ok),
        tol=tol,
    )


@dataclass(frozen=True)
class PrimeImage:
    """Result of converting an expectation-form instance to marginal form.

    A reconstructed marginal that is not PSD cannot be a density matrix, so
    no global state matches the expectations and the instance is
    automatically NO; in that case ``instance`` is None.
    """

    beta: float
    automatic_no: bool
    instance: ConsistencyInstance | None
    reconstruction: MarginalReconstruction


def consistency_from_prime(p: ConsistencyPrimeInstance) -> PrimeImage:
    """Map an expectation-form instance to marginal form, gap beta'/sqrt(d).

    Infeasibility measured as Euclidean distance beta' in expectation space
    guarantees some marginal is at least beta'/sqrt(d) away in trace
    distance, so YES maps to YES and NO maps to NO with the scaled gap.
    """
    beta = p.beta_prime / np.sqrt(p.basis.d)
    recon = alphas_to_marginals(p.alphas, p.layout)
    if not all(recon.psd_ok):
        return PrimeImage(beta=beta, automatic_no=True, instance=None, reconstruction=recon)
    marginals = tuple(validate_density(M) for M in recon.matrices)
    inst = ConsistencyInstance(n=p.n, layout=p.layout, marginals=marginals, beta=beta)
    return PrimeImage(beta=beta, automatic_no=False, instance=inst, reconstruction=recon)


def marginals_of_state(state: DensityMatrix, layout, beta: float = 0.1) -> ConsistencyInstance:
    """YES instance by construction: marginals of an actual global state."""
    layout = tuple(tuple(sorted(set(C))) for C in layout)
    marginals = tuple(partial_trace(state, C) for C in layout)
    return ConsistencyInstance(n=state.n, layout=layout, marginals=marginals, beta=beta)


def state_alphas(state: DensityMatrix, basis: LocalPauliBasis) -> AlphaVector:
    """Expectation vector of a state, computed directly from the basis table."""
    inst = marginals_of_state(state, basis.layout)
    return marginals_to_alphas(inst, basis)


def _haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases.conj()


def singlet_triangle_instance(
    weight: float = 1.0,
    beta: float = SINGLET_TRIANGLE_BETA,
    rng: np.random.Generator | None = None,
) -> ConsistencyInstance:
    """Pairwise-singlet NO instance: every pair of three qubits claims the
    (weight-damped) singlet as its marginal.

    A singlet marginal pins qubit pairs to a maximally entangled state, and
    one qubit cannot be maximally entangled with two partners at once, so
    for weight near 1 no global state exists. At weight w the claimed
    marginal is w * singlet + (1-w) * I/4, still a legal density matrix.
    With ``rng`` given, all three marginals are conjugated by a shared
    triple of random single-qubit unitaries, which preserves the
    infeasibility gap exactly.

    The default ``beta`` is sound for weight = 1 only; callers using
    smaller weights must certify their own gap.
    """
    if not 0.0 <= weight <= 1.0:
        raise QconsistError(f"weight {weight} outside [0, 1]")
    base = weight * singlet().matrix + (1 - weight) * np.eye(4) / 4
    locals_ = [np.eye(2, dtype=complex)] * 3
    if rng is not None:
        locals_ = [_haar_unitary(rng, 2) for _ in range(3)]
    marginals = []
    for (qa, qb) in SINGLET_TRIANGLE_LAYOUT:
        U = np.kron(locals_[qa - 1], locals_[qb - 1])
        marginals.append(validate_density(U @ base @ U.conj().T))
    return ConsistencyInstance(
        n=3,
        layout=SINGLET_TRIANGLE_LAYOUT,
        marginals=tuple(marginals),
        beta=beta,
    )


def perturbed_no_prime(
    rng: np.random.Generator,
    layout,
    n: int,
    epsilon: float = 0.25,
) -> ConsistencyPrimeInstance:
    """NO instance with a certified gap: push one coordinate out of range.

    Starting from the expectation vector of a random state, one entry is
    moved to 1 + epsilon in magnitude. Every state keeps each expectation
    within [-1, 1], so the Euclidean distance to the consistent set is at
    least epsilon, making beta' = epsilon sound.
    """
    if not epsilon > 0:
        raise QconsistError(f"epsilon must be positive, got {epsilon}")
    basis = local_pauli_set(layout, n)
    alpha = state_alphas(random_mixed(rng, n), basis)
    values = alpha.values.copy()
    idx = int(rng.integers(basis.d))
    sign = 1.0 if values[idx] >= 0 else -1.0
    values[idx] = sign * (1.0 + epsilon)
    return ConsistencyPrimeInstance(
        n=n,
        basis=basis,
        alphas=AlphaVector(basis=basis, values=values),
        beta_prime=epsilon,
    )
