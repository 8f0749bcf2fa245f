"""Euclidean distance from a target expectation vector to the consistent set.

The consistent set K' is the image of all n-qubit density matrices under
the expectation map sigma -> (Tr(P sigma))_P over the local Pauli basis.
Deciding membership of a target alpha reduces to minimizing

    g(sigma) = sum_P (Tr(P sigma) - alpha_P)^2

over density matrices. ``fw_distance`` does this with Frank-Wolfe, whose
linear subproblem over states is a minimum-eigenvector computation and
whose duality gap certifies a lower bound on the true distance.
``pg_distance`` is an independent projected-gradient implementation used to
cross-check fw results; it shares nothing with the compiled kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from ._fw_fallback import STATUS_ACCEPT, STATUS_BUDGET, STATUS_GAP, STATUS_REJECT
from .errors import ConfigError, DimensionMismatchError
from .marginals import AlphaVector
from .paulis import LocalPauliBasis, dense_matrix, hermitian_eigensystem, pauli_table
from .states import DensityMatrix, validate_density

# Witness matrices come out of optimizers with O(1e-12) PSD violations.
WITNESS_TOL = 1e-7


@dataclass(frozen=True)
class OracleConfig:
    """Budget and tolerances for a distance computation.

    ``cold_retry`` only affects the warm-started membership oracle: when a
    query is inconclusive within budget from the warm state, it is retried
    once from the maximally mixed state. ``seed`` is carried for interface
    uniformity and reproducibility bookkeeping; both solvers are
    deterministic and never draw from it.
    """

    max_iters: int = 2000
    gap_tol: float = 1e-8
    dist_tol: float = 1e-6
    cold_retry: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.gap_tol > 0 and self.dist_tol > 0):
            raise ConfigError("tolerances must be positive")


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a distance computation.

    ``distance`` is the residual norm at the final iterate (an upper bound
    on the true distance); ``distance_lower`` is the best certified lower
    bound from the duality gap, so the true distance lies in
    [distance_lower, distance]. ``fw_gap`` is the duality gap at the last
    evaluated iterate (0.0 if the distance target was met before any
    gradient evaluation).
    """

    distance: float
    witness: DensityMatrix
    fw_gap: float
    iters: int
    distance_lower: float
    status: int
    obj_history: np.ndarray | None = None
    gap_history: np.ndarray | None = None


def _as_target(alpha: AlphaVector) -> np.ndarray:
    return np.ascontiguousarray(alpha.values, dtype=np.float64)


def expectations_of(M: np.ndarray, basis: LocalPauliBasis) -> np.ndarray:
    """Expectation vector of a (density) matrix over the basis elements."""
    cols, vals = pauli_table(basis)
    return backend.active().expectation_image(cols, vals, np.ascontiguousarray(M))


def gradient_operator(sigma: DensityMatrix, alpha: AlphaVector) -> np.ndarray:
    """Gradient of g at sigma: 2 sum_P (Tr(P sigma) - alpha_P) dense(P)."""
    basis = alpha.basis
    if sigma.n != basis.n:
        raise DimensionMismatchError(
            f"{sigma.n}-qubit state against a {basis.n}-qubit basis"
        )
    resid = expectations_of(sigma.matrix, basis) - alpha.values
    G = np.zeros((sigma.dim, sigma.dim), dtype=complex)
    for r_p, p in zip(resid, basis.elements):
        if r_p != 0.0:
            G += (2.0 * r_p) * dense_matrix(p)
    return G


def fw_distance(alpha: AlphaVector, cfg: OracleConfig, record: bool = False) -> OracleResult:
    """Frank-Wolfe distance from alpha to the consistent set.

    Starts at the maximally mixed state. Stops when the duality gap falls
    below gap_tol, the distance falls below dist_tol, or the budget runs
    out; the objective is non-increasing throughout.
    """
    basis = alpha.basis
    cols, vals = pauli_table(basis)
    dim = 2**basis.n
    sigma = np.eye(dim, dtype=np.complex128) / dim
    # basis elements are traceless, so the image of I/dim is exactly zero
    aim = np.zeros(basis.d)
    dist, lower, gap, iters, status, objh, gaph = backend.active().fw_run(
        cols, vals, _as_target(alpha), sigma, aim,
        cfg.max_iters, cfg.gap_tol, cfg.dist_tol, 0.0, record,
    )
    return OracleResult(
        distance=dist,
        witness=validate_density(sigma, tol=WITNESS_TOL),
        fw_gap=gap,
        iters=iters,
        distance_lower=lower,
        status=status,
        obj_history=objh,
        gap_history=gaph,
    )


def _project_simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(w) + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(w - theta, 0.0)


def pg_distance(alpha: AlphaVector, cfg: OracleConfig, record: bool = False) -> OracleResult:
    """Projected-gradient distance oracle, independent of the fw kernels.

    Steps along the negative gradient with the exact Lipschitz step
    1/(2*2^n) (the expectation map scales Frobenius norm by 2^(n/2), so the
    gradient is 2*2^n-Lipschitz), then projects back onto density matrices
    by clipping the spectrum to the probability simplex. Stopping mirrors
    fw_distance, including the duality-gap certificate.
    """
    basis = alpha.basis
    if basis.n > 8:
        raise DimensionMismatchError("pg_distance is capped at 8 qubits")
    dim = 2**basis.n
    dense = [dense_matrix(p) for p in basis.elements]
    target = _as_target(alpha)

    sigma = np.eye(dim, dtype=complex) / dim
    step = 1.0 / (2.0 * dim)
    best_lb2 = 0.0
    gap = 0.0
    status = STATUS_BUDGET
    obj_hist: list[float] = []
    gap_hist: list[float] = []
    iters = 0

    def image(M: np.ndarray) -> np.ndarray:
        return np.array([np.trace(P @ M).real for P in dense])

    aim = image(sigma)
    for _ in range(cfg.max_iters):
        resid = aim - target
        ub2 = float(resid @ resid)
        if np.sqrt(ub2) <= cfg.dist_tol:
            status = STATUS_ACCEPT
            break
        G = np.zeros((dim, dim), dtype=complex)
        for r_p, P in zip(resid, dense):
            G += (2.0 * r_p) * P
        _, V = np.linalg.eigh(G)
        vmin = V[:, 0]
        av = image(np.outer(vmin, vmin.conj()))
        gap = float(2.0 * (resid @ (aim - av)))
        if record:
            obj_hist.append(ub2)
            gap_hist.append(gap)
        iters += 1
        lb2 = ub2 - gap
        if lb2 > best_lb2:
            best_lb2 = lb2
        if gap <= cfg.gap_tol:
            status = STATUS_GAP
            break
        stepped = sigma - step * G
        ws, Vs = hermitian_eigensystem((stepped + stepped.conj().T) / 2)
        ws = _project_simplex(ws)
        sigma = (Vs * ws) @ Vs.conj().T
        aim = image(sigma)

    resid = aim - target
    dist = float(np.sqrt(resid @ resid))
    return OracleResult(
        distance=dist,
        witness=validate_density(sigma, tol=WITNESS_TOL),
        fw_gap=float(gap),
        iters=iters,
        distance_lower=float(np.sqrt(best_lb2)) if best_lb2 > 0 else 0.0,
        status=status,
        obj_history=np.array(obj_hist) if record else None,
        gap_history=np.array(gap_hist) if record else None,
    )


def check_membership_config(beta_prime: float, cfg: OracleConfig) -> None:
    """Tolerances must leave the decision threshold beta'/2 meaningful.

    dist_tol <= beta'/4 keeps the accept test strict; gap_tol <= beta'^2/8
    makes the certified bracket [lower, distance] thinner than beta'/4 near
    the threshold, so the decision does not depend on solver slack.
    """
    if not beta_prime > 0:
        raise ConfigError(f"beta_prime must be positive, got {beta_prime}")
    if cfg.dist_tol > beta_prime / 4:
        raise ConfigError(
            f"dist_tol {cfg.dist_tol:g} exceeds beta_prime/4 = {beta_prime / 4:g}"
        )
    if cfg.gap_tol > beta_prime**2 / 8:
        raise ConfigError(
            f"gap_tol {cfg.gap_tol:g} exceeds beta_prime^2/8 = {beta_prime**2 / 8:g}"
        )


def membership(alpha: AlphaVector, beta_prime: float, cfg: OracleConfig) -> bool:
    """YES (True) iff the distance to the consistent set is <= beta'/2.

    Correct whenever the promise holds (true distance 0 or >= beta');
    strictly inside the gap the answer is deterministic but unspecified.
    """
    check_membership_config(beta_prime, cfg)
    basis = alpha.basis
    cols, vals = pauli_table(basis)
    dim = 2**basis.n
    thr = beta_prime / 2.0
    sigma = np.eye(dim, dtype=np.complex128) / dim
    aim = np.zeros(basis.d)
    dist, _, _, _, status, _, _ = backend.active().fw_run(
        cols, vals, _as_target(alpha), sigma, aim,
        cfg.max_iters, cfg.gap_tol, thr, thr, False,
    )
    return status != STATUS_REJECT and dist <= thr


class ConsistencyOracle:
    """Warm-started membership oracle for the feasibility solver.

    Consecutive queries along a random walk are close together, so the
    optimizer state from the last accepted point is an excellent start for
    the next query; each query works on a copy and the state is committed
    only on acceptance. Cheap certified screens (norm cap sqrt(d), per-entry
    cap 1) reject far points without running the solver.

    Answers are deterministic given the query sequence. Instances are not
    thread-safe; concurrent chains need their own oracle.
    """

    def __init__(self, basis: LocalPauliBasis, beta_prime: float, cfg: OracleConfig):
        check_membership_config(beta_prime, cfg)
        self.basis = basis
        self.beta_prime = float(beta_prime)
        self.cfg = cfg
        self.threshold = self.beta_prime / 2.0
        self._cols, self._vals = pauli_table(basis)
        self._norm_cap = float(np.sqrt(basis.d)) + self.threshold
        dim = 2**basis.n
        self._sigma0 = np.eye(dim, dtype=np.complex128) / dim
        self.calls = 0
        self.fw_iters = 0
        self.screened = 0
        self.retries = 0
        self.reset()

    def reset(self) -> None:
        self._sigma = self._sigma0.copy()
        self._aim = np.zeros(self.basis.d)

    def snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        """Warm state (sigma, image) as of the last accepted query."""
        return self._sigma.copy(), self._aim.copy()

    def restore(self, snap: tuple[np.ndarray, np.ndarray]) -> None:
        """Adopt a state captured by snapshot (jumping the walk elsewhere)."""
        sigma, aim = snap
        self._sigma = sigma.copy()
        self._aim = aim.copy()

    def _run(self, y, sigma, aim):
        return backend.active().fw_run(
            self._cols, self._vals, y, sigma, aim,
            self.cfg.max_iters, self.cfg.gap_tol, self.threshold, self.threshold, False,
        )

    def __call__(self, y: np.ndarray) -> bool:
        y = np.ascontiguousarray(y, dtype=np.float64)
        # any consistent vector has Euclidean norm <= sqrt(d) and entries in [-1, 1]
        if np.sqrt(y @ y) > self._norm_cap or np.max(np.abs(y)) > 1.0 + self.threshold:
            self.screened += 1
            return False
        sigma = self._sigma.copy()
        aim = self._aim.copy()
        dist, _, _, iters, status, _, _ = self._run(y, sigma, aim)
        self.calls += 1
        self.fw_iters += iters
        if self.cfg.cold_retry and status == STATUS_BUDGET and dist > self.threshold:
            # Inconclusive from a warm state that may sit far from this
            # query (the walk jumped); one restart from the center decides
            # points the stale start could not certify within budget.
            sigma = self._sigma0.copy()
            aim = np.zeros(self.basis.d)
            dist, _, _, iters, status, _, _ = self._run(y, sigma, aim)
            self.retries += 1
            self.fw_iters += iters
        accept = status != STATUS_REJECT and dist <= self.threshold
        if accept:
            self._sigma = sigma
            self._aim = aim
        return accept
