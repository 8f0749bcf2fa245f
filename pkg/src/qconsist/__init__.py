"""Consistency of local density matrices, at desk scale.

Decide whether a family of local density matrices extends to a global
state, certify the answer from both sides, and use the decider as the
separation oracle in a randomized reduction from ground-energy promise
problems. Everything is brute-force checkable at these sizes; that is
the point.
"""

__version__ = "0.1.0"

from . import backend
from .errors import (
    ConfigError,
    DimensionMismatchError,
    NonHermitianError,
    OverlapMismatchError,
    QconsistError,
    SchemaError,
    SubsetError,
    SupportError,
)
from .feasibility import FeasibleRegion, WalkConfig, feasibility_solve
from .hamiltonians import (
    LocalHamiltonianInstance,
    build_objective,
    min_eigenvalue,
    random_lh,
)
from .marginals import (
    AlphaVector,
    ConsistencyInstance,
    ConsistencyPrimeInstance,
    alphas_to_marginals,
    consistency_from_prime,
    marginals_of_state,
    marginals_to_alphas,
    singlet_triangle_instance,
    state_alphas,
)
from .oracle import (
    ConsistencyOracle,
    OracleConfig,
    OracleResult,
    fw_distance,
    membership,
    pg_distance,
)
from .paulis import LocalPauliBasis, PauliString, local_pauli_set
from .reduction import (
    ReductionConfig,
    amplified,
    fast_reduction_config,
    reduce_and_solve,
    safe_beta_prime,
)
from .states import DensityMatrix, partial_trace, trace_distance, validate_density
from .verifier import draw_round, simulate_rounds, verifier_gap

__all__ = [
    "AlphaVector",
    "ConfigError",
    "ConsistencyInstance",
    "ConsistencyOracle",
    "ConsistencyPrimeInstance",
    "DensityMatrix",
    "DimensionMismatchError",
    "FeasibleRegion",
    "LocalHamiltonianInstance",
    "LocalPauliBasis",
    "NonHermitianError",
    "OracleConfig",
    "OracleResult",
    "OverlapMismatchError",
    "PauliString",
    "QconsistError",
    "ReductionConfig",
    "SchemaError",
    "SubsetError",
    "SupportError",
    "WalkConfig",
    "__version__",
    "alphas_to_marginals",
    "amplified",
    "backend",
    "build_objective",
    "consistency_from_prime",
    "draw_round",
    "fast_reduction_config",
    "feasibility_solve",
    "fw_distance",
    "local_pauli_set",
    "marginals_of_state",
    "marginals_to_alphas",
    "membership",
    "min_eigenvalue",
    "partial_trace",
    "pg_distance",
    "random_lh",
    "reduce_and_solve",
    "safe_beta_prime",
    "simulate_rounds",
    "singlet_triangle_instance",
    "state_alphas",
    "trace_distance",
    "validate_density",
    "verifier_gap",
]
