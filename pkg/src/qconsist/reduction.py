"""Randomized reduction: ground-energy decision via consistency queries.

Ground-energy decision asks whether the smallest eigenvalue of a local
Hamiltonian is below a or above b. Energy is linear in the local Pauli
expectations, so the question becomes: does the consistent set contain a
point with f(alpha) <= t, for t halfway between the thresholds? That
feasibility question is answered by the ball-walk cutting-plane solver,
with the consistency oracle as the membership predicate.

The oracle accepts a thin shell around the consistent set (decision
threshold beta'/2), which biases single runs toward YES near the boundary;
majority vote over independent runs restores the advertised accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .feasibility import FeasibilityResult, FeasibleRegion, WalkConfig, feasibility_solve
from .hamiltonians import (
    LocalHamiltonianInstance,
    ObjectiveFunction,
    build_objective,
)
from .marginals import AlphaVector
from .oracle import ConsistencyOracle, OracleConfig
from .paulis import LocalPauliBasis, local_pauli_set

YES = "YES"
NO = "NO"


@dataclass(frozen=True)
class ReductionConfig:
    """Knobs of one reduction run.

    ``beta_prime`` None means the conservative default
    (b-a) / (20 sqrt(d) ||g||_inf d), unless ``beta_prime_margin`` is set,
    in which case the largest provably sound gap (b-a) / (margin ||g||_2)
    is used instead; see safe_beta_prime. Larger gaps make membership
    queries far cheaper and remain correct because the oracle only ever
    accepts points it can certify. ``membership_iters`` caps the solver
    budget per oracle query; tolerances per query derive from beta_prime
    so the membership preconditions always hold. ``membership_retry``
    retries inconclusive queries once from a cold start, which rescues
    tiny-gap runs at the cost of doubling the worst-case query budget.
    """

    beta_prime: float | None = None
    beta_prime_margin: float | None = None
    membership_iters: int = 600
    membership_retry: bool = True
    walk: WalkConfig = field(default_factory=WalkConfig)

    def __post_init__(self) -> None:
        if self.beta_prime_margin is not None and not self.beta_prime_margin > 1.0:
            raise ConfigError(
                f"beta_prime_margin must exceed 1, got {self.beta_prime_margin}"
            )


@dataclass(frozen=True)
class ReductionResult:
    answer: str
    witness: AlphaVector | None
    t: float
    beta_prime: float
    basis: LocalPauliBasis
    feasibility: FeasibilityResult
    oracle_calls: int
    fw_iters: int


def default_beta_prime(lh: LocalHamiltonianInstance, obj: ObjectiveFunction) -> float:
    d = obj.basis.d
    ginf = float(np.max(np.abs(obj.coeffs)))
    if ginf == 0:
        ginf = 1.0
    return (lh.b - lh.a) / (20.0 * np.sqrt(d) * ginf * d)


def safe_beta_prime(
    lh: LocalHamiltonianInstance, obj: ObjectiveFunction, margin: float = 4.0
) -> float:
    """Largest L2 gap that provably cannot flip a NO instance.

    A point declared feasible lies within beta'/2 of the consistent set
    (the oracle accepts only on a certified bound, and means of accepted
    points stay within the convex shell), so its objective value is within
    ||g|| beta'/2 of a value attained on the set. On a NO instance every
    attained value is >= b = t + (b-a)/2, so any beta' < (b-a)/||g||
    keeps declared-feasible values above t. The margin divides that limit;
    margin 4 leaves half the promise gap as numerical headroom.
    """
    gnorm = float(np.linalg.norm(obj.coeffs))
    if gnorm == 0:
        gnorm = 1.0
    return (lh.b - lh.a) / (margin * gnorm)


def fast_reduction_config(d: int) -> ReductionConfig:
    """Desk-scale profile tuned for wall clock at n <= 3 (d is the basis size).

    Takes the largest provably sound decision gap (margin 4), a tight
    per-query solver budget with no cold retry, and a lean walk whose
    patience rule ends infeasible runs once the best value flattens.
    Soundness is unchanged, only exploration thoroughness is traded; on
    batches of random promise instances at these sizes the single-run
    answers matched exact diagonalization throughout.
    """
    return ReductionConfig(
        beta_prime_margin=4.0,
        membership_iters=80,
        membership_retry=False,
        walk=WalkConfig(
            mix_steps=d,
            samples=6,
            delta=0.05,
            max_rounds=150,
            stall_limit=1500,
            patience=10,
        ),
    )


def membership_config(beta_prime: float, iters: int, retry: bool = True) -> OracleConfig:
    """Per-query oracle budget with tolerances scaled to the decision gap."""
    return OracleConfig(
        max_iters=iters,
        gap_tol=beta_prime**2 / 32.0,
        dist_tol=beta_prime / 8.0,
        cold_retry=retry,
    )


def reduce_and_solve(
    lh: LocalHamiltonianInstance,
    cfg: ReductionConfig,
    rng: np.random.Generator,
) -> ReductionResult:
    """One randomized run: YES iff the solver finds f(alpha) <= (a+b)/2."""
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    t = (lh.a + lh.b) / 2.0
    if cfg.beta_prime is not None:
        beta_prime = cfg.beta_prime
    elif cfg.beta_prime_margin is not None:
        beta_prime = safe_beta_prime(lh, obj, cfg.beta_prime_margin)
    else:
        beta_prime = default_beta_prime(lh, obj)
    if not beta_prime > 0:
        raise ConfigError(f"beta_prime must be positive, got {beta_prime}")

    oracle = ConsistencyOracle(
        basis,
        beta_prime,
        membership_config(beta_prime, cfg.membership_iters, cfg.membership_retry),
    )
    region = FeasibleRegion(dimension=basis.d, base=oracle)
    outcome = feasibility_solve(region, obj, t, cfg.walk, rng)

    witness = None
    if outcome.feasible:
        witness = AlphaVector(basis=basis, values=outcome.point)
    return ReductionResult(
        answer=YES if outcome.feasible else NO,
        witness=witness,
        t=t,
        beta_prime=beta_prime,
        basis=basis,
        feasibility=outcome,
        oracle_calls=oracle.calls + oracle.screened,
        fw_iters=oracle.fw_iters,
    )


@dataclass(frozen=True)
class AmplifiedResult:
    answer: str
    votes: tuple[str, ...]
    runs: tuple[ReductionResult, ...]

    @property
    def yes_votes(self) -> int:
        return sum(1 for v in self.votes if v == YES)


def amplified(
    lh: LocalHamiltonianInstance,
    cfg: ReductionConfig,
    runs: int,
    rng: np.random.Generator,
) -> AmplifiedResult:
    """Majority vote over independent reduction runs."""
    if runs < 1 or runs % 2 == 0:
        raise ConfigError(f"runs must be a positive odd integer, got {runs}")
    seeds = rng.integers(0, 2**63, size=runs)
    results = tuple(
        reduce_and_solve(lh, cfg, np.random.default_rng(int(s))) for s in seeds
    )
    votes = tuple(r.answer for r in results)
    answer = YES if sum(1 for v in votes if v == YES) > runs // 2 else NO
    return AmplifiedResult(answer=answer, votes=votes, runs=results)
