"""Single-round verifier for marginal claims against a candidate state.

Each round challenges the prover's state on one subset: pick a subset index
i and a Pauli Q supported there, and compare the measured acceptance
probability against the target computed from the claimed marginal rho_i.
On consistent pairs the two match exactly; if every global state is at
least beta away from some claimed marginal in trace distance, then some
(i, Q) shows a probability deviation of at least beta / (2 * 4^k).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionMismatchError
from .marginals import ConsistencyInstance
from .paulis import PAULI_CHARS, PauliString, dense_matrix
from .states import DensityMatrix, expectation


@dataclass(frozen=True)
class VerifierRound:
    """One drawn challenge: subset index, Pauli string, target, threshold."""

    i: int
    subset: tuple[int, ...]
    q: PauliString
    target_r: float
    threshold_s: float


def _round_for(inst: ConsistencyInstance, i: int, q: PauliString) -> VerifierRound:
    C = inst.layout[i]
    rho = inst.marginals[i]
    r = 0.5 + 0.5 * float(np.trace(dense_matrix(q) @ rho.matrix).real)
    s = 0.5 * inst.beta / 4 ** len(C)
    return VerifierRound(i=i, subset=C, q=q, target_r=r, threshold_s=s)


def draw_round(inst: ConsistencyInstance, rng: np.random.Generator) -> VerifierRound:
    """Uniform subset index, uniform Pauli string (identity included)."""
    i = int(rng.integers(inst.m))
    C = inst.layout[i]
    chars = "".join(PAULI_CHARS[int(c)] for c in rng.integers(0, 4, size=len(C)))
    return _round_for(inst, i, PauliString(chars))


def acceptance_probability(sigma: DensityMatrix, rnd: VerifierRound) -> float:
    """Exact probability 1/2 + Tr((Q x I) sigma)/2 for the drawn challenge."""
    if max(rnd.subset) > sigma.n:
        raise DimensionMismatchError(
            f"round on subset {rnd.subset} against a {sigma.n}-qubit state"
        )
    q_global = rnd.q.embed(rnd.subset, sigma.n)
    return 0.5 + 0.5 * expectation(sigma, q_global)


def verifier_gap(
    inst: ConsistencyInstance, sigma: DensityMatrix
) -> tuple[float, tuple[int, PauliString]]:
    """Exhaustive max over (i, Q) of |acceptance probability - target|.

    The deviation for one challenge is |gamma_Q| / 2 with
    gamma_Q = Tr((Q x I) sigma) - Tr(Q rho_i).
    """
    best = -1.0
    arg = (0, PauliString.identity(len(inst.layout[0])))
    for i, C in enumerate(inst.layout):
        for chars in product(PAULI_CHARS, repeat=len(C)):
            q = PauliString("".join(chars))
            rnd = _round_for(inst, i, q)
            dev = abs(acceptance_probability(sigma, rnd) - rnd.target_r)
            if dev > best:
                best = dev
                arg = (i, q)
    return best, arg


def simulate_rounds(
    inst: ConsistencyInstance,
    sigma: DensityMatrix,
    N: int,
    rng: np.random.Generator,
) -> dict[tuple[int, str], tuple[int, int]]:
    """Monte-Carlo rounds: returns (accepts, trials) per drawn (i, Q)."""
    counts: dict[tuple[int, str], tuple[int, int]] = {}
    for _ in range(N):
        rnd = draw_round(inst, rng)
        p = acceptance_probability(sigma, rnd)
        hit = int(rng.random() < p)
        key = (rnd.i, rnd.q.factors)
        acc, tot = counts.get(key, (0, 0))
        counts[key] = (acc + hit, tot + 1)
    return counts
