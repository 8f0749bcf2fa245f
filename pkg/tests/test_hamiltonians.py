"""Local Hamiltonians and the linear energy functional over expectations."""
import numpy as np
import pytest

from qconsist.errors import QconsistError, SpectrumError
from qconsist.hamiltonians import (
    LocalHamiltonianInstance,
    assemble_global,
    build_objective,
    evaluate_objective,
    min_eigenvalue,
    objective_gradient,
    random_lh,
)
from qconsist.marginals import state_alphas
from qconsist.paulis import PauliString, dense_matrix, local_pauli_set
from qconsist.states import pure_state, random_mixed

Z = np.array([[1, 0], [0, -1]], dtype=complex)
ZZ_PROJ = (np.eye(4) + np.kron(Z, Z)) / 2.0  # penalizes aligned pairs


def _triangle_ising() -> LocalHamiltonianInstance:
    terms = tuple(((i, j), ZZ_PROJ) for i, j in ((1, 2), (2, 3), (1, 3)))
    return LocalHamiltonianInstance(n=3, terms=terms, a=0.9, b=1.1)


def test_triangle_ising_ground_energy():
    # three (I+ZZ)/2 penalties cannot all be avoided on a triangle: any
    # bit assignment aligns at least one edge, and the best ones align
    # exactly one, so the exact minimum over all 8 basis states is 1
    lh = _triangle_ising()
    assert abs(min_eigenvalue(lh) - 1.0) < 1e-12
    H = assemble_global(lh)
    diag = np.real(np.diag(H))
    assert abs(min(diag) - 1.0) < 1e-12  # classical: diagonal in Z basis


def test_assemble_global_embeds_each_term():
    lh = LocalHamiltonianInstance(
        n=2, terms=(((1,), (np.eye(2) + Z) / 2),), a=0.1, b=0.3
    )
    H = assemble_global(lh)
    want = np.kron((np.eye(2) + Z) / 2, np.eye(2))
    np.testing.assert_allclose(H, want, atol=1e-15)


def test_term_spectrum_outside_unit_range_rejected():
    with pytest.raises(SpectrumError):
        LocalHamiltonianInstance(n=1, terms=(((1,), 2.0 * np.eye(2)),), a=0.1, b=0.2)


def test_thresholds_must_be_ordered():
    with pytest.raises(QconsistError):
        LocalHamiltonianInstance(n=1, terms=(((1,), np.eye(2) / 2),), a=0.5, b=0.5)


def test_energy_identity_random_pairs():
    rng = np.random.default_rng(31)
    for _ in range(10):
        lh = random_lh(rng, n=3, m=3, k=2, gap=0.2, promise="yes")
        basis = local_pauli_set(lh.layout, lh.n)
        obj = build_objective(lh, basis)
        sigma = random_mixed(rng, 3)
        alpha = state_alphas(sigma, basis)
        direct = float(np.real(np.trace(assemble_global(lh) @ sigma.matrix)))
        via_alpha = evaluate_objective(obj, alpha.values)
        assert abs(direct - via_alpha) < 1e-10


def test_objective_at_ground_state_alpha():
    rng = np.random.default_rng(32)
    lh = random_lh(rng, n=3, m=3, k=2, gap=0.2, promise="no")
    H = assemble_global(lh)
    w, V = np.linalg.eigh(H)
    ground = pure_state(V[:, 0])
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    f = evaluate_objective(obj, state_alphas(ground, basis).values)
    assert abs(f - w[0]) < 1e-9


def test_objective_constant_is_mixed_state_energy():
    lh = _triangle_ising()
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    # the maximally mixed state has alpha = 0, energy 3 * 1/2
    assert abs(obj.constant - 1.5) < 1e-12


def test_objective_coefficients_of_known_term():
    lh = _triangle_ising()
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    by_name = {p.factors: c for p, c in zip(basis.elements, obj.coeffs)}
    # each (I+ZZ)/2 contributes 1/2 to its own ZZ coordinate
    assert abs(by_name["ZZI"] - 0.5) < 1e-12
    assert abs(by_name["ZIZ"] - 0.5) < 1e-12
    assert abs(by_name["IZZ"] - 0.5) < 1e-12
    assert abs(by_name["XXI"]) < 1e-12


def test_objective_gradient_is_constant_vector():
    lh = _triangle_ising()
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    g = objective_gradient(obj)
    np.testing.assert_allclose(g, obj.coeffs)


def test_build_objective_layout_mismatch():
    lh = _triangle_ising()
    with pytest.raises(QconsistError):
        build_objective(lh, local_pauli_set(((1, 2),), 3))


def test_random_lh_promise_sides():
    rng = np.random.default_rng(33)
    for promise in ("yes", "no"):
        for _ in range(5):
            lh = random_lh(rng, n=2, m=2, k=2, gap=0.2, promise=promise)
            lam = min_eigenvalue(lh)
            assert abs((lh.b - lh.a) - 0.2) < 1e-12
            if promise == "yes":
                assert lam <= lh.a + 1e-12
            else:
                assert lam >= lh.b - 1e-12


def test_random_lh_is_deterministic_per_seed():
    a = random_lh(np.random.default_rng(34), n=2, m=2, k=2, gap=0.2)
    b = random_lh(np.random.default_rng(34), n=2, m=2, k=2, gap=0.2)
    assert a.layout == b.layout
    assert a.a == b.a and a.b == b.b
    for (_, ta), (_, tb) in zip(a.terms, b.terms):
        np.testing.assert_array_equal(ta, tb)
