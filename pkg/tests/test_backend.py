"""Compiled kernel vs numpy fallback: same contract, same numbers."""
import numpy as np
import pytest

from qconsist import backend
from qconsist.marginals import AlphaVector, state_alphas
from qconsist.oracle import OracleConfig, fw_distance
from qconsist.paulis import local_pauli_set, pauli_table
from qconsist.states import maximally_mixed, random_mixed

CHAIN = local_pauli_set(((1, 2), (2, 3)), 3)
BOTH = backend.available()


def test_available_names_and_get():
    assert "python" in BOTH
    assert backend.active() is backend.get(backend.active().NAME)
    with pytest.raises(ValueError):
        backend.get("fortran")


def test_use_swaps_and_restores():
    prev = backend.active()
    with backend.use("python") as mod:
        assert mod.NAME == "python"
        assert backend.active() is mod
    assert backend.active() is prev


def test_expectation_image_matches_across_backends():
    if "compiled" not in BOTH:
        pytest.skip("compiled extension not built")
    rng = np.random.default_rng(0)
    cols, vals = pauli_table(CHAIN)
    sigma = random_mixed(rng, 3).matrix
    images = {}
    for name in BOTH:
        images[name] = backend.get(name).expectation_image(cols, vals, sigma)
    np.testing.assert_allclose(images["compiled"], images["python"], atol=1e-12)


def test_expectation_image_against_dense_trace():
    from qconsist.paulis import dense_matrix

    rng = np.random.default_rng(1)
    cols, vals = pauli_table(CHAIN)
    sigma = random_mixed(rng, 3).matrix
    img = backend.active().expectation_image(cols, vals, sigma)
    for p, elem in enumerate(CHAIN.elements):
        want = float(np.trace(dense_matrix(elem) @ sigma).real)
        assert img[p] == pytest.approx(want, abs=1e-12)


def test_fw_run_distances_agree_across_backends():
    if "compiled" not in BOTH:
        pytest.skip("compiled extension not built")
    rng = np.random.default_rng(2)
    cfg = OracleConfig(max_iters=800, gap_tol=1e-12, dist_tol=1e-10)
    for trial in range(5):
        if trial % 2:
            target = state_alphas(random_mixed(rng, 3), CHAIN)
        else:
            v = rng.standard_normal(CHAIN.d)
            v *= 1.5 * np.sqrt(CHAIN.d) / np.linalg.norm(v)
            target = AlphaVector(basis=CHAIN, values=v)
        got = {}
        for name in BOTH:
            with backend.use(name):
                got[name] = fw_distance(target, cfg).distance
        assert abs(got["compiled"] - got["python"]) < 2e-6


def test_fw_run_statuses_and_in_place_contract():
    mod = backend.get("python")
    cols, vals = pauli_table(CHAIN)
    dim = 2**3
    sigma = maximally_mixed(3).matrix.astype(complex)
    aim = mod.expectation_image(cols, vals, sigma)
    target = aim.copy()  # distance zero from the start
    out = mod.fw_run(cols, vals, target, sigma, aim, 50, 1e-10, 1e-8)
    dist, lower, gap, iters, status = out[:5]
    assert dist <= 1e-8
    assert status in (mod.STATUS_ACCEPT, mod.STATUS_GAP)

    # far target with a reject threshold: certified rejection, and the
    # in-place sigma/aim stay a valid state/image pair
    far = np.zeros(CHAIN.d)
    far[0] = 1.8
    sigma2 = maximally_mixed(3).matrix.astype(complex)
    aim2 = mod.expectation_image(cols, vals, sigma2)
    out2 = mod.fw_run(cols, vals, far, sigma2, aim2, 400, 1e-12, 1e-10, 0.05)
    assert out2[4] == mod.STATUS_REJECT
    assert out2[1] >= 0.05
    np.testing.assert_allclose(
        mod.expectation_image(cols, vals, sigma2), aim2, atol=1e-9
    )
    evals = np.linalg.eigvalsh(sigma2)
    assert evals.min() >= -1e-10
    assert np.trace(sigma2).real == pytest.approx(1.0)
