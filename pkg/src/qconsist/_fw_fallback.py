"""Pure-numpy solver kernel: Frank-Wolfe distance iterations over states.

This module and the compiled extension ``_fw_kernel`` implement the same
contract; ``backend`` picks one at import time. Both operate on the
row-sparse Pauli table (cols, vals) produced by ``paulis.pauli_table``:
each basis element has exactly one nonzero per row, so an expectation
Tr(P sigma) is a dim-length dot product and the gradient operator
assembles in O(d * dim).

``fw_run`` mutates ``sigma`` and ``aim`` in place so callers can warm-start
consecutive queries; ``aim`` must equal the expectation image of ``sigma``
on entry.

Status codes: 0 duality gap reached gap_tol, 1 distance reached dist_tol
(accept), -1 certified lower bound exceeded reject_thr (reject), 2 budget
exhausted, 3 stalled with a zero step.
"""
from __future__ import annotations

import numpy as np

NAME = "python"

STATUS_GAP = 0
STATUS_ACCEPT = 1
STATUS_REJECT = -1
STATUS_BUDGET = 2
STATUS_STALL = 3


def expectation_image(cols: np.ndarray, vals: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Expectations of every table row against sigma: aim[p] = Re Tr(P_p sigma)."""
    dim = sigma.shape[0]
    rows = np.arange(dim)
    # Tr(P sigma) = sum_r P[r, c(r)] * sigma[c(r), r]
    return np.einsum("pr,pr->p", vals, sigma[cols, rows[None, :]]).real.copy()


def fw_run(
    cols: np.ndarray,
    vals: np.ndarray,
    target: np.ndarray,
    sigma: np.ndarray,
    aim: np.ndarray,
    max_iters: int,
    gap_tol: float,
    dist_tol: float,
    reject_thr: float = 0.0,
    record: bool = False,
):
    """Frank-Wolfe on g(sigma) = sum_p (Tr(P_p sigma) - target_p)^2.

    The linear subproblem over density matrices is solved by the minimum
    eigenvector of the gradient operator; the step size is the exact
    minimizer of the quadratic objective along the segment, clamped to
    [0, 1]. Each iteration certifies a lower bound g(sigma) - gap on the
    optimum, which powers early rejection in membership queries.

    Returns (dist, lower, gap, iters, status, obj_hist, gap_hist) where
    obj_hist records the squared objective at each evaluated iterate.
    """
    d, dim = cols.shape
    rows = np.arange(dim)
    best_lb2 = 0.0
    gap = 0.0
    status = STATUS_BUDGET
    obj_hist: list[float] = []
    gap_hist: list[float] = []
    reject2 = reject_thr * reject_thr if reject_thr > 0 else -1.0
    iters = 0

    for _ in range(max_iters):
        r = aim - target
        ub2 = float(r @ r)
        if np.sqrt(ub2) <= dist_tol:
            status = STATUS_ACCEPT
            break

        G = np.zeros((dim, dim), dtype=np.complex128)
        coeff = 2.0 * r
        for p in range(d):
            G[rows, cols[p]] += coeff[p] * vals[p]
        _, V = np.linalg.eigh(G)
        u = V[:, 0]

        av = np.einsum("r,pr,pr->p", u.conj(), vals, u[cols]).real
        gap = float(2.0 * (r @ (aim - av)))
        if record:
            obj_hist.append(ub2)
            gap_hist.append(gap)
        iters += 1

        lb2 = ub2 - gap
        if lb2 > best_lb2:
            best_lb2 = lb2
        if reject2 >= 0.0 and best_lb2 > reject2:
            status = STATUS_REJECT
            break
        if gap <= gap_tol:
            status = STATUS_GAP
            break

        delta = av - aim
        dd = float(delta @ delta)
        eta = 0.0 if dd <= 0.0 else min(1.0, max(0.0, float(-(r @ delta)) / dd))
        if eta <= 0.0:
            status = STATUS_STALL
            break
        np.multiply(sigma, 1.0 - eta, out=sigma)
        sigma += eta * np.outer(u, u.conj())
        np.multiply(aim, 1.0 - eta, out=aim)
        aim += eta * av

    r = aim - target
    dist = float(np.sqrt(r @ r))
    lower = float(np.sqrt(best_lb2)) if best_lb2 > 0 else 0.0
    return (
        dist,
        lower,
        float(gap),
        iters,
        status,
        np.array(obj_hist) if record else None,
        np.array(gap_hist) if record else None,
    )
