import csv
import io
import json

import pytest

from hamlocal import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_test_command_json(capsys):
    code, out, _ = run(capsys, "test", "--seed", "7")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == 1 and rep["seed"] == 7 and rep["white_box"] is False
    assert rep["runs"][0]["decision"] == "far"
    assert rep["schedule"]["m"] == 84
    assert rep["bound_formulas"]["time"].startswith("79*")
    assert all(c["passed"] for c in rep["budget_checks"])
    assert rep["config"]["algorithm"] == "trotter" and "workers" not in rep["config"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["test", "--seed", "7", "--repeats", "3", "--output", str(a)]) == 0
    assert cli.main(["test", "--seed", "7", "--repeats", "3", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_worker_counts_agree(tmp_path):
    outs = []
    for w in (1, 4):
        p = tmp_path / f"w{w}.json"
        assert cli.main(["test", "--seed", "7", "--repeats", "6", "--workers", str(w), "--output", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_ae_without_inverse_is_capability_error(capsys):
    code, _, err = run(capsys, "test", "--algorithm", "ae", "--access", "forward,controlled")
    assert code == 2 and "inverse" in err


def test_exact_mode_is_white_box(capsys):
    code, out, _ = run(capsys, "test", "--mode", "exact")
    rep = json.loads(out)
    assert code == 0 and rep["white_box"] is True and "white-box" in rep["label"]
    assert "runs" not in rep and rep["exact"]["exact_decision"] == "far"
    for alg in ("ae", "baseline"):
        code, out, _ = run(capsys, "test", "--mode", "exact", "--algorithm", alg)
        assert json.loads(out)["exact"]["prob_far"] > 2 / 3


def test_inconclusive_exit_code(monkeypatch, capsys):
    from hamlocal import trotter

    real = trotter.plan_schedule

    def starved(spec):
        s = real(spec)
        return s.__class__(**{**s.__dict__, "s_prime": s.s - 1})

    monkeypatch.setattr(trotter, "plan_schedule", starved)
    code, out, _ = run(capsys, "test", "--seed", "1")
    assert code == 1 and json.loads(out)["summary"]["decisions"]["inconclusive"] == 1


def test_hamiltonian_file_errors(tmp_path, capsys):
    p = tmp_path / "h.txt"
    p.write_text("ZZZ 0.5\nZQZ 0.1\n")
    code, _, err = run(capsys, "test", "--hamiltonian", str(p))
    assert code == 2 and ":2:" in err
    code, _, err = run(capsys, "test", "--hamiltonian", str(tmp_path / "missing.txt"))
    assert code == 2
    p.write_text("ZZZ 0.5\nXXI 0.25\n")
    code, out, _ = run(capsys, "test", "--hamiltonian", str(p), "--mode", "exact")
    assert code == 0


def test_random_generator_echoes_seed(capsys):
    code, out, _ = run(capsys, "test", "--generator", "random-pauli", "--gen-seed", "4", "--mode", "exact")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["gen_seed"] == 4
    assert abs(rep["hamiltonian"]["spectral_norm"] - 1) < 1e-9


def test_test_csv(capsys):
    code, out, _ = run(capsys, "test", "--repeats", "2", "--format", "csv", "--algorithm", "baseline")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "run" and len(rows) == 3


def test_sweep(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "--eps2-list", "0.5,0.7,0.9", "--reps", "2",
                       "--algorithm", "baseline", "--sidecar-dir", str(tmp_path / "side"))
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5 and rows[-1][0] == "fit"
    assert len(list((tmp_path / "side").glob("*.json"))) == 3
    code2, out2, _ = run(capsys, "sweep", "--eps2-list", "0.5,0.7,0.9", "--reps", "2", "--algorithm", "baseline")
    assert out2 == out


@pytest.mark.parametrize("lst", ["", "0.5"])
def test_sweep_needs_two_points(capsys, lst):
    code, _, err = run(capsys, "sweep", "--eps2-list", lst)
    assert code == 2


def test_verify_default_and_corrupted(capsys):
    code, out, _ = run(capsys, "verify", "--suite-size", "3", "--qae-draws", "500")
    rep = json.loads(out)
    assert code == 0 and rep["all_passed"]
    assert all(c["anchor"] for c in rep["checks"])
    code, out, err = run(capsys, "verify", "--suite-size", "3", "--qae-draws", "500", "--corrupt-alpha", "3")
    assert code == 3 and "acceptance-sandwich" in err


def test_lowerbound(capsys):
    code, out, _ = run(capsys, "lowerbound", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][:3] == ["eps1", "eps2", "t"]
    assert len(rows) == 1 + 15 * 30


def test_bad_spec_is_usage_error(capsys):
    code, _, _ = run(capsys, "test", "--eps1", "0.7", "--eps2", "0.5")
    assert code == 2
    code, _, _ = run(capsys, "test", "--algorithm", "nope")
    assert code == 2
