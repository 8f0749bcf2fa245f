"""Local Hamiltonian instances, exact ground energy, and the linear objective.

The energy of a state under a sum of local terms depends only on its
marginals, and through them only on its local Pauli expectations. That
turns ground-energy estimation into minimizing a *linear* function

    f(alpha) = c0 + g . alpha

over the consistent set, which is what the reduction feeds to the
feasibility solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    QconsistError,
    SpectrumError,
    SubsetError,
)
from .paulis import (
    LocalPauliBasis,
    dense_matrix,
    embed_operator,
    require_hermitian,
)

MAX_GLOBAL_QUBITS = 12


@dataclass(frozen=True)
class LocalHamiltonianInstance:
    """H = sum of terms, each on a small qubit subset, with thresholds a < b.

    Term spectra must lie in [0, 1]: the thresholds only promise anything
    relative to that normalization, so out-of-range terms are rejected
    instead of silently rescaled.
    """

    n: int
    terms: tuple[tuple[tuple[int, ...], np.ndarray], ...]
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.terms:
            raise QconsistError("instance has no terms")
        frozen_terms = []
        for C, H in self.terms:
            C = tuple(sorted(set(int(q) for q in C)))
            if not C or C[0] < 1 or C[-1] > self.n:
                raise SubsetError(f"subset {C} outside 1..{self.n}")
            H = np.asarray(H, dtype=complex)
            if H.shape != (2 ** len(C), 2 ** len(C)):
                raise DimensionMismatchError(
                    f"term shape {H.shape} does not fit subset {C}"
                )
            require_hermitian(H, tol=1e-9, what=f"term on {C}")
            w = np.linalg.eigvalsh(H)
            if w[0] < -1e-9 or w[-1] > 1 + 1e-9:
                raise SpectrumError(
                    f"term on {C} has spectrum [{w[0]:.3g}, {w[-1]:.3g}], "
                    "outside [0, 1]"
                )
            Hf = H.copy()
            Hf.setflags(write=False)
            frozen_terms.append((C, Hf))
        object.__setattr__(self, "terms", tuple(frozen_terms))
        if not self.b - self.a > 0:
            raise QconsistError(f"need a < b, got a={self.a}, b={self.b}")

    @property
    def layout(self) -> tuple[tuple[int, ...], ...]:
        return tuple(C for C, _ in self.terms)

    @property
    def m(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class ObjectiveFunction:
    """The linear energy functional f(alpha) = c0 + g . alpha."""

    basis: LocalPauliBasis
    coeffs: np.ndarray
    constant: float

    def __post_init__(self) -> None:
        g = np.asarray(self.coeffs, dtype=float)
        if g.shape != (self.basis.d,):
            raise DimensionMismatchError(
                f"coefficient length {g.shape} vs basis size {self.basis.d}"
            )
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "coeffs", g)

    def __call__(self, alpha_values: np.ndarray) -> float:
        return evaluate_objective(self, alpha_values)


def assemble_global(lh: LocalHamiltonianInstance) -> np.ndarray:
    """Dense sum of all terms embedded on the full register."""
    if lh.n > MAX_GLOBAL_QUBITS:
        raise DimensionMismatchError(
            f"{lh.n} qubits exceeds the dense cap {MAX_GLOBAL_QUBITS}"
        )
    H = np.zeros((2**lh.n, 2**lh.n), dtype=complex)
    for C, term in lh.terms:
        H += embed_operator(term, C, lh.n)
    return H


def min_eigenvalue(lh: LocalHamiltonianInstance) -> float:
    """Exact ground energy by dense diagonalization (the ground-truth oracle)."""
    return float(np.linalg.eigvalsh(assemble_global(lh))[0])


def build_objective(lh: LocalHamiltonianInstance, basis: LocalPauliBasis) -> ObjectiveFunction:
    """Expand the energy over local Pauli expectations.

    g_P collects 2^-|C_i| Tr(H_i (P|C_i)) over every term whose subset
    covers P; c0 is the identity's contribution, the energy of the
    maximally mixed state.
    """
    if basis.layout != lh.layout:
        raise DimensionMismatchError("basis was built from a different layout")
    g = np.zeros(basis.d)
    c0 = 0.0
    for C, term in lh.terms:
        scale = 2.0 ** -len(C)
        c0 += scale * float(np.trace(term).real)
        members = set(C)
        for idx, p in enumerate(basis.elements):
            if set(p.support()) <= members:
                val = np.trace(term @ dense_matrix(p.restrict(C))).real
                g[idx] += scale * float(val)
    return ObjectiveFunction(basis=basis, coeffs=g, constant=c0)


def evaluate_objective(obj: ObjectiveFunction, alpha_values: np.ndarray) -> float:
    v = np.asarray(alpha_values, dtype=float)
    if v.shape != obj.coeffs.shape:
        raise DimensionMismatchError(
            f"alpha length {v.shape} vs coefficient length {obj.coeffs.shape}"
        )
    return float(obj.constant + obj.coeffs @ v)


def objective_gradient(obj: ObjectiveFunction) -> np.ndarray:
    """The gradient of a linear function is its coefficient vector."""
    return obj.coeffs.copy()


def _random_term(rng: np.random.Generator, c: int) -> np.ndarray:
    """Random Hermitian matrix rescaled to spectrum exactly [0, 1]."""
    dim = 2**c
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = (G + G.conj().T) / 2
    w = np.linalg.eigvalsh(H)
    spread = w[-1] - w[0]
    if spread < 1e-12:
        return np.zeros((dim, dim), dtype=complex)
    return (H - w[0] * np.eye(dim)) / spread


def random_lh(
    rng: np.random.Generator,
    n: int,
    m: int,
    k: int,
    gap: float,
    promise: str = "yes",
    margin: float | None = None,
    max_tries: int = 200,
) -> LocalHamiltonianInstance:
    """Random promise instance with thresholds placed around the true minimum.

    Terms are random Hermitian matrices rescaled to spectrum [0, 1] on
    random size-k subsets (every qubit is covered by at least one subset).
    With the exact minimum lam, a YES instance sets a = lam + margin and
    b = a + gap; a NO instance sets b = lam - margin and a = b - gap,
    retrying until lam is large enough for positive thresholds.
    """
    if promise not in ("yes", "no"):
        raise ConfigError(f"promise must be 'yes' or 'no', got {promise!r}")
    if not 1 <= k <= n:
        raise ConfigError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not gap > 0:
        raise ConfigError(f"gap must be positive, got {gap}")
    if margin is None:
        margin = gap / 4
    for _ in range(max_tries):
        subsets = []
        qubits = list(range(1, n + 1))
        for i in range(m):
            chosen = list(rng.choice(qubits, size=min(k, n), replace=False))
            subsets.append(tuple(sorted(int(q) for q in chosen)))
        covered = set().union(*subsets)
        if covered != set(qubits):
            continue
        terms = tuple((C, _random_term(rng, len(C))) for C in subsets)
        probe = LocalHamiltonianInstance(n=n, terms=terms, a=0.0, b=1.0)
        lam = min_eigenvalue(probe)
        if promise == "yes":
            a = lam + margin
            b = a + gap
            return LocalHamiltonianInstance(n=n, terms=terms, a=a, b=b)
        if lam - margin - gap <= 0:
            continue
        b = lam - margin
        a = b - gap
        return LocalHamiltonianInstance(n=n, terms=terms, a=a, b=b)
    raise QconsistError(
        f"could not draw a '{promise}' instance in {max_tries} tries"
    )
