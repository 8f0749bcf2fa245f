"""Reduction configuration, gap selection, and small end-to-end runs."""
import numpy as np
import pytest

from qconsist.errors import ConfigError
from qconsist.hamiltonians import build_objective, random_lh
from qconsist.paulis import local_pauli_set
from qconsist.reduction import (
    NO,
    YES,
    ReductionConfig,
    amplified,
    default_beta_prime,
    fast_reduction_config,
    membership_config,
    reduce_and_solve,
    safe_beta_prime,
)


def _instance(seed: int, promise: str):
    rng = np.random.default_rng(seed)
    return random_lh(rng, n=2, m=2, k=2, gap=0.2, promise=promise)


def _fast_cfg(d: int, seed: int) -> ReductionConfig:
    from dataclasses import replace

    base = fast_reduction_config(d)
    return replace(base, walk=replace(base.walk, seed=seed))


def test_beta_prime_formulas():
    lh = _instance(1, "yes")
    basis = local_pauli_set(lh.layout, lh.n)
    obj = build_objective(lh, basis)
    gap = lh.b - lh.a
    gnorm2 = float(np.linalg.norm(obj.coeffs))
    gnorm_inf = float(np.max(np.abs(obj.coeffs)))
    assert safe_beta_prime(lh, obj) == pytest.approx(gap / (4.0 * gnorm2))
    assert safe_beta_prime(lh, obj, margin=8.0) == pytest.approx(gap / (8.0 * gnorm2))
    assert default_beta_prime(lh, obj) == pytest.approx(
        gap / (20 * np.sqrt(basis.d) * gnorm_inf * basis.d)
    )
    # the safe gap never removes either promise side from the decision
    assert safe_beta_prime(lh, obj) < gap / gnorm2


def test_membership_config_tightens_with_gap():
    cfg = membership_config(0.2, iters=300)
    assert cfg.max_iters == 300
    assert cfg.dist_tol <= 0.2 / 2
    assert cfg.gap_tol <= (0.2 / 2) ** 2
    tighter = membership_config(0.02, iters=300)
    assert tighter.dist_tol < cfg.dist_tol
    assert membership_config(0.2, 300, retry=False).cold_retry is False


def test_fast_profile_fields():
    cfg = fast_reduction_config(15)
    assert cfg.beta_prime_margin == 4.0
    assert cfg.membership_iters == 80
    assert cfg.membership_retry is False
    assert cfg.walk.mix_steps == 15
    assert cfg.walk.samples == 6
    assert cfg.walk.patience is not None


def test_config_validation():
    with pytest.raises(ConfigError):
        ReductionConfig(beta_prime_margin=1.0)
    with pytest.raises(ConfigError):
        ReductionConfig(beta_prime_margin=0.5)
    ReductionConfig(beta_prime_margin=1.5)  # fine


def test_explicit_beta_prime_wins_over_margin():
    lh = _instance(2, "yes")
    cfg = ReductionConfig(
        beta_prime=0.123,
        beta_prime_margin=4.0,
        membership_iters=40,
        walk=_fast_cfg(15, 0).walk,
    )
    res = reduce_and_solve(lh, cfg, np.random.default_rng(0))
    assert res.beta_prime == pytest.approx(0.123)


def test_yes_instance_end_to_end():
    lh = _instance(3, "yes")
    d = local_pauli_set(lh.layout, lh.n).d
    res = reduce_and_solve(lh, _fast_cfg(d, 1), np.random.default_rng(1))
    assert res.answer == YES
    assert res.witness is not None
    assert res.feasibility.value <= res.t
    assert res.oracle_calls > 0


def test_no_instance_end_to_end():
    lh = _instance(4, "no")
    d = local_pauli_set(lh.layout, lh.n).d
    res = reduce_and_solve(lh, _fast_cfg(d, 2), np.random.default_rng(2))
    assert res.answer == NO
    assert res.witness is None


def test_runs_are_deterministic_per_seed():
    lh = _instance(5, "yes")
    d = local_pauli_set(lh.layout, lh.n).d
    a = reduce_and_solve(lh, _fast_cfg(d, 3), np.random.default_rng(3))
    b = reduce_and_solve(lh, _fast_cfg(d, 3), np.random.default_rng(3))
    assert a.answer == b.answer
    assert a.feasibility.rounds == b.feasibility.rounds
    assert a.oracle_calls == b.oracle_calls


def test_amplified_majority_and_validation():
    lh = _instance(6, "yes")
    d = local_pauli_set(lh.layout, lh.n).d
    cfg = _fast_cfg(d, 4)
    with pytest.raises(ConfigError):
        amplified(lh, cfg, 2, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        amplified(lh, cfg, 0, np.random.default_rng(0))
    res = amplified(lh, cfg, 3, np.random.default_rng(4))
    assert len(res.votes) == 3
    assert res.answer in (YES, NO)
    assert (res.answer == YES) == (res.yes_votes >= 2)
    again = amplified(lh, cfg, 3, np.random.default_rng(4))
    assert again.votes == res.votes
