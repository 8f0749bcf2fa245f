"""Exception types shared across the package."""
from __future__ import annotations


class QconsistError(Exception):
    """Base class for all package-specific errors."""


class PauliFormatError(QconsistError, ValueError):
    """Malformed Pauli label string."""


class DimensionMismatchError(QconsistError, ValueError):
    """Operands have incompatible shapes or qubit counts."""


class NonHermitianError(QconsistError, ValueError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class TraceError(QconsistError, ValueError):
    """Matrix trace deviates from the required value beyond tolerance."""


class NegativityError(QconsistError, ValueError):
    """Matrix has an eigenvalue below the allowed negativity tolerance."""


class SupportError(QconsistError, ValueError):
    """Pauli string acts outside the permitted qubit subset."""


class SubsetError(QconsistError, ValueError):
    """Qubit subset is empty, out of range, or otherwise invalid."""


class SpectrumError(QconsistError, ValueError):
    """Hamiltonian term spectrum lies outside the normalized range."""


class OverlapMismatchError(QconsistError, ValueError):
    """Two marginals disagree on a Pauli expectation they both determine.

    Carries the offending subset indices and the Pauli string so callers can
    report exactly where the input data is inconsistent with itself.
    """

    def __init__(self, i: int, j: int, pauli: str, value_i: float, value_j: float):
        self.i = i
        self.j = j
        self.pauli = pauli
        self.value_i = value_i
        self.value_j = value_j
        super().__init__(
            f"marginals {i} and {j} disagree on {pauli}: "
            f"{value_i:.12g} vs {value_j:.12g}"
        )


class ConfigError(QconsistError, ValueError):
    """Solver configuration violates a precondition."""


class SchemaError(QconsistError, ValueError):
    """JSON document does not match the expected schema."""
