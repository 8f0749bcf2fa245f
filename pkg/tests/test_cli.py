"""Command-line interface: pipelines, determinism, exit codes."""
import json

import numpy as np
import pytest

from qconsist.cli import main
from qconsist.serialize import canonical_dumps, encode_matrix
from qconsist.states import maximally_mixed


def _run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_gen_writes_canonical_file(tmp_path, capsys):
    out = tmp_path / "lh.json"
    code, stdout, _ = _run(
        capsys, "gen", "lh", "--n", "2", "--m", "2", "--k", "2",
        "--seed", "11", "-o", str(out),
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["n"] == 2 and len(doc["terms"]) == 2
    # stdout form is byte-identical to the file form
    code2, stdout2, _ = _run(
        capsys, "gen", "lh", "--n", "2", "--m", "2", "--k", "2", "--seed", "11"
    )
    assert code2 == 0
    assert stdout2 == out.read_text()


def test_gen_is_deterministic_per_seed(capsys):
    args = ("gen", "consistency", "--preset", "singlet-triangle")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_check_yes_and_no_exit_codes(tmp_path, capsys):
    yes = tmp_path / "yes.json"
    no = tmp_path / "no.json"
    _run(
        capsys, "gen", "consistency", "--from-state", "random-mixed",
        "--subsets", "1,2;2,3", "--n", "3", "--seed", "3", "-o", str(yes),
    )
    _run(capsys, "gen", "consistency", "--preset", "singlet-triangle", "-o", str(no))

    code_y, out_y, _ = _run(capsys, "check", str(yes))
    assert code_y == 0
    rep = json.loads(out_y)
    assert rep["decision"] == "YES"
    assert rep["distance"] <= rep["beta_prime"] / 2

    code_n, out_n, _ = _run(capsys, "check", str(no), "--brute-force")
    assert code_n == 1
    rep_n = json.loads(out_n)
    assert rep_n["decision"] == "NO"
    assert abs(rep_n["distance"] - rep_n["pg_distance"]) < 1e-3


def test_check_is_byte_deterministic(tmp_path, capsys):
    inst = tmp_path / "i.json"
    _run(
        capsys, "gen", "prime", "--preset", "perturbed-no",
        "--subsets", "1,2", "--seed", "7", "-o", str(inst),
    )
    _, a, _ = _run(capsys, "check", str(inst))
    _, b, _ = _run(capsys, "check", str(inst))
    assert a == b


def test_timings_go_to_stderr_only(tmp_path, capsys):
    inst = tmp_path / "i.json"
    _run(
        capsys, "gen", "consistency", "--from-state", "ghz",
        "--subsets", "1,2;2,3", "--n", "3", "-o", str(inst),
    )
    _, plain_out, plain_err = _run(capsys, "check", str(inst))
    _, timed_out, timed_err = _run(capsys, "check", str(inst), "--timings")
    assert timed_out == plain_out
    assert "fw_distance" in timed_err
    assert "fw_distance" not in plain_err


def test_reduce_fast_yes_and_no(tmp_path, capsys):
    yes = tmp_path / "yes.json"
    no = tmp_path / "no.json"
    _run(
        capsys, "gen", "lh", "--n", "2", "--m", "2", "--k", "2",
        "--promise", "yes", "--seed", "11", "-o", str(yes),
    )
    _run(
        capsys, "gen", "lh", "--n", "2", "--m", "2", "--k", "2",
        "--promise", "no", "--seed", "21", "-o", str(no),
    )
    code_y, out_y, _ = _run(capsys, "reduce", str(yes), "--fast", "--ground-truth")
    rep_y = json.loads(out_y)
    assert code_y == 0 and rep_y["answer"] == "YES"
    assert rep_y["agrees"] is True

    code_n, out_n, _ = _run(capsys, "reduce", str(no), "--fast", "--ground-truth")
    rep_n = json.loads(out_n)
    assert code_n == 1 and rep_n["answer"] == "NO"
    assert rep_n["agrees"] is True

    # reruns with the same seed emit identical bytes
    _, again, _ = _run(capsys, "reduce", str(yes), "--fast", "--ground-truth")
    assert again == out_y


def test_reduce_config_overrides_fast_profile(tmp_path, capsys):
    inst = tmp_path / "lh.json"
    _run(
        capsys, "gen", "lh", "--n", "2", "--m", "2", "--k", "2",
        "--seed", "11", "-o", str(inst),
    )
    cfg = json.dumps({"reduction": {"beta_prime": 0.05}})
    code, out, _ = _run(capsys, "reduce", str(inst), "--fast", "--config", cfg)
    rep = json.loads(out)
    assert code in (0, 1)
    assert rep["beta_prime"] == pytest.approx(0.05)


def test_verify_reports_gap(tmp_path, capsys):
    inst = tmp_path / "tri.json"
    wit = tmp_path / "w.json"
    _run(capsys, "gen", "consistency", "--preset", "singlet-triangle", "-o", str(inst))
    wit.write_text(canonical_dumps(encode_matrix(maximally_mixed(3).matrix)))
    code, out, _ = _run(capsys, "verify", str(inst), str(wit), "--rounds", "200")
    rep = json.loads(out)
    assert code == 0
    assert rep["gap"] == pytest.approx(0.5, abs=1e-12)
    assert rep["gap"] >= rep["no_threshold"]  # the witness is caught
    assert rep["argmax"]["pauli"] in ("XX", "YY", "ZZ")
    assert sum(r["trials"] for r in rep["rounds"].values()) == 200
    _, again, _ = _run(capsys, "verify", str(inst), str(wit), "--rounds", "200")
    assert again == out


def test_bench_compares_backends(capsys):
    code, out, err = _run(
        capsys, "bench", "--n", "2", "--targets", "2", "--iters", "100"
    )
    assert code == 0
    rep = json.loads(out)
    assert "python" in rep["backends"]
    assert rep["targets"] == 2
    for name in rep["backends"]:
        assert len(rep["distances"][name]) == 2
    if len(rep["backends"]) > 1:
        assert rep["max_distance_disagreement"] < 1e-4
    assert "[bench] python:" in err


def test_error_paths_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = _run(capsys, "check", str(bad))
    assert code == 2
    assert "error:" in err

    code2, _, err2 = _run(capsys, "check", str(tmp_path / "missing.json"))
    assert code2 == 2

    lh = tmp_path / "lh.json"
    _run(
        capsys, "gen", "lh", "--n", "2", "--m", "1", "--k", "2", "-o", str(lh)
    )
    code3, _, err3 = _run(capsys, "check", str(lh))  # wrong kind for check
    assert code3 == 2
    assert "consistency or prime" in err3

    code4, _, err4 = _run(
        capsys, "gen", "consistency", "--from-state", "plasma", "--subsets", "1,2"
    )
    assert code4 == 2
