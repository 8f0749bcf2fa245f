"""Density matrices: validation, partial trace, distances, measurements."""
import numpy as np
import pytest

from qconsist.errors import (
    DimensionMismatchError,
    NegativityError,
    NonHermitianError,
    TraceError,
)
from qconsist.paulis import PauliString
from qconsist.states import (
    DensityMatrix,
    bell_phi_plus,
    expectation,
    ghz,
    maximally_mixed,
    partial_trace,
    povm_two_outcome,
    pure_state,
    random_mixed,
    random_pure,
    singlet,
    trace_distance,
    validate_density,
)


def test_validate_density_accepts_mixed():
    rho = validate_density(np.eye(2) / 2)
    assert rho.n == 1
    assert rho.dim == 2


def test_validate_density_rejects_negative_eigenvalue():
    # trace is 1 but the spectrum dips below zero
    with pytest.raises(NegativityError):
        validate_density(np.diag([1.5, -0.5]))


def test_validate_density_rejects_wrong_trace():
    with pytest.raises(TraceError):
        validate_density(np.eye(2))


def test_validate_density_rejects_non_hermitian():
    M = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
    with pytest.raises(NonHermitianError):
        validate_density(M)


def test_validate_density_rejects_non_power_of_two():
    with pytest.raises(DimensionMismatchError):
        validate_density(np.eye(3) / 3)


def test_pure_state_normalizes_projector():
    rho = pure_state(np.array([1.0, 1.0]))
    np.testing.assert_allclose(rho.matrix, np.full((2, 2), 0.5), atol=1e-15)


def test_partial_trace_ghz_pair():
    # tracing one qubit of GHZ leaves the classical 00/11 mixture
    rho = partial_trace(ghz(3), (1, 2))
    want = np.zeros((4, 4), dtype=complex)
    want[0, 0] = 0.5
    want[3, 3] = 0.5
    np.testing.assert_allclose(rho.matrix, want, atol=1e-15)


def test_partial_trace_product_state_factors():
    rng = np.random.default_rng(5)
    a = random_mixed(rng, 1)
    b = random_mixed(rng, 1)
    joint = DensityMatrix(n=2, matrix=np.kron(a.matrix, b.matrix))
    np.testing.assert_allclose(partial_trace(joint, (1,)).matrix, a.matrix, atol=1e-14)
    np.testing.assert_allclose(partial_trace(joint, (2,)).matrix, b.matrix, atol=1e-14)


def test_partial_trace_preserves_trace_and_psd():
    rng = np.random.default_rng(6)
    for _ in range(10):
        rho = random_mixed(rng, 3)
        red = partial_trace(rho, (1, 3))
        assert abs(np.trace(red.matrix) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(red.matrix).min() > -1e-12


def test_trace_distance_known_values():
    # orthogonal pure states are at the maximum L1 distance 2
    zero = pure_state(np.array([1.0, 0.0]))
    one = pure_state(np.array([0.0, 1.0]))
    assert abs(trace_distance(zero, one) - 2.0) < 1e-14
    # |0><0| against the maximally mixed single qubit: |1/2| + |-1/2|
    assert abs(trace_distance(zero, maximally_mixed(1)) - 1.0) < 1e-14
    assert trace_distance(zero, zero) == 0.0


def test_trace_distance_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        trace_distance(maximally_mixed(1), maximally_mixed(2))


def test_bell_and_singlet_expectations():
    phi = bell_phi_plus()
    assert abs(expectation(phi, PauliString("XX")) - 1.0) < 1e-14
    assert abs(expectation(phi, PauliString("YY")) + 1.0) < 1e-14
    assert abs(expectation(phi, PauliString("ZZ")) - 1.0) < 1e-14
    psi = singlet()
    for w in ("XX", "YY", "ZZ"):
        assert abs(expectation(psi, PauliString(w)) + 1.0) < 1e-14
    for w in ("XI", "IX", "ZI", "IZ"):
        assert abs(expectation(psi, PauliString(w))) < 1e-14


def test_povm_two_outcome_probabilities():
    zero = pure_state(np.array([1.0, 0.0]))
    p_plus, p_minus = povm_two_outcome(PauliString("Z"), zero)
    assert abs(p_plus - 1.0) < 1e-14 and abs(p_minus) < 1e-14
    p_plus, p_minus = povm_two_outcome(PauliString("X"), zero)
    assert abs(p_plus - 0.5) < 1e-14 and abs(p_minus - 0.5) < 1e-14


def test_povm_probabilities_sum_to_one():
    rng = np.random.default_rng(9)
    letters = np.array(list("IXYZ"))
    for _ in range(10):
        rho = random_mixed(rng, 2)
        factors = "".join(rng.choice(letters, size=2))
        p_plus, p_minus = povm_two_outcome(PauliString(factors), rho)
        assert abs(p_plus + p_minus - 1.0) < 1e-12
        assert -1e-12 <= p_plus <= 1 + 1e-12


def test_random_states_are_valid():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3):
        for maker in (random_pure, random_mixed):
            rho = maker(rng, n)
            assert rho.n == n
            assert abs(np.trace(rho.matrix) - 1.0) < 1e-12
            assert np.linalg.eigvalsh(rho.matrix).min() > -1e-12


def test_random_mixed_rank_control():
    rng = np.random.default_rng(12)
    rho = random_mixed(rng, 2, rank=1)
    w = np.sort(np.linalg.eigvalsh(rho.matrix))
    assert w[-1] > 1 - 1e-9 and abs(w[:-1]).max() < 1e-9


def test_random_pure_is_projector():
    rng = np.random.default_rng(13)
    rho = random_pure(rng, 2).matrix
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)
