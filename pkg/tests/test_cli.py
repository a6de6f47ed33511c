import io
import json

import numpy as np
import pytest

from blockent import BipartiteState, ModelSpec, sweep
from blockent.cli import main
from blockent.matrixio import load_matrix_file, matrix_file_dict, parse_matrix_file, rounded, save_matrix_file
from blockent.thermal import read_sweep_csv

from conftest import bell_mixture_rho

BELL = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2


def write_state(path, m, n, rho):
    save_matrix_file(BipartiteState(m, n, rho), path)
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def usage_error(capsys, *argv):
    with pytest.raises(SystemExit) as err:
        main([str(a) for a in argv])
    return err.value.code, capsys.readouterr().err


def test_sweep_columns_and_footer(capsys):
    code, out, _ = run(capsys, "sweep", "--K", 1, "--omega", 1, "--mode", "midpoint", "--t-points", 20)
    assert code == 0
    ms, rows, comments = read_sweep_csv(io.StringIO(out))
    assert ms == (-1, 0, 1) and len(rows) == 20
    assert comments[0].startswith("sudden_death_T=")


def test_sweep_nonpositive_sector(capsys):
    code, out, _ = run(capsys, "sweep", "--K", 10, "--omega", 1, "--mode", "midpoint", "--m-max", 0, "--t-points", 5)
    ms, rows, _ = read_sweep_csv(io.StringIO(out))
    assert code == 0 and ms == tuple(range(-10, 1))
    assert rows[0][1] > 0


def test_sweep_infinite_mode_footer(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--K", 100, "--omega", 1, "--mode", "infinite", "--out", out_path)
    assert code == 0
    with open(out_path) as fh:
        ms, rows, comments = read_sweep_csv(fh)
    assert len(ms) == 201 and len(rows) == 400
    assert comments == ["no sudden death"]


def test_sweep_matches_library(capsys):
    code, out, _ = run(capsys, "sweep", "--K", 3, "--t-min", 0.1, "--t-max", 2, "--t-points", 4)
    _, rows, _ = read_sweep_csv(io.StringIO(out))
    recs = sweep(ModelSpec(3, 1.0), [r[0] for r in rows])
    np.testing.assert_allclose([r[1] for r in rows], [r.E_total for r in recs], rtol=1e-11)


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["--K", "0"], "--K"),
        (["--K", "2", "--mode", "lukewarm"], "--mode"),
        (["--K", "2", "--alpha", "-1"], "--alpha"),
        (["--K", "2", "--m-min", "-5"], "--m-min"),
        (["--K", "2", "--t-min", "0"], "--t-min"),
        (["--K", "2", "--t-min", "3", "--t-max", "1"], "--t-min"),
        (["--K", "2", "--t-points", "1"], "--t-points"),
        (["--K", "two"], "--K"),
    ],
)
def test_sweep_usage_errors(capsys, argv, flag):
    code, err = usage_error(capsys, "sweep", *argv)
    assert code == 2 and flag in err


def test_analyze_bell_mixture(capsys, tmp_path):
    path = write_state(tmp_path / "mix.json", 2, 4, bell_mixture_rho())
    code, out, _ = run(capsys, "analyze", path)
    report = json.loads(out)
    assert code == 0
    assert [b["e_indices"] for b in report["decomposition"]["blocks"]] == [[0, 1], [2, 3]]
    assert abs(report["entanglement"]["value"]) < 1e-9
    assert report["entanglement"]["measure"] == "eof"
    assert abs(report["negativity"]) < 1e-9
    assert all(b["bound_excluded"] and b["rank"] == 2 for b in report["rank_report"]["blocks"])
    assert report["validation"]["valid"]


def test_analyze_bell_and_mixed(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", write_state(tmp_path / "bell.json", 2, 2, BELL))
    report = json.loads(out)
    assert code == 0 and len(report["decomposition"]["blocks"]) == 1
    assert report["entanglement"]["value"] == pytest.approx(1.0, abs=1e-12)
    assert report["negativity"] == pytest.approx(0.5, abs=1e-12)
    code, out, _ = run(capsys, "analyze", write_state(tmp_path / "mixed.json", 2, 4, np.eye(8) / 8))
    assert json.loads(out)["entanglement"]["value"] == 0


def test_analyze_parse_failure_and_invalid_state(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"dim_s": 2, "dim_e": 2, "re": [[1, 0], [0, 1]]}')
    code, _, err = run(capsys, "analyze", broken)
    assert code == 2 and "4 x 4" in err
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.json")
    assert code == 2
    (tmp_path / "junk.json").write_text("not json")
    assert run(capsys, "analyze", tmp_path / "junk.json")[0] == 2
    code, out, _ = run(capsys, "analyze", write_state(tmp_path / "neg.json", 2, 2, np.diag([1.5, -0.5, 0, 0])))
    assert code == 3
    assert json.loads(out)["validation"]["min_eigenvalue"] == pytest.approx(-0.5)


def test_blocks_command(capsys, tmp_path):
    path = write_state(tmp_path / "mix.json", 2, 4, bell_mixture_rho())
    code, out, _ = run(capsys, "blocks", path, "--assert-blocks", "0,1;2,3")
    report = json.loads(out)
    assert code == 0 and report["assertion"]["ok"]
    assert [b["e_indices"] for b in report["decomposition"]["blocks"]] == [[0, 1], [2, 3]]

    code, out, err = run(capsys, "blocks", path, "--assert-blocks", "0,2;1,3")
    report = json.loads(out)
    assert code != 0
    assert report["assertion"]["max_violation"] == pytest.approx(0.125)
    assert "assertion failed" in err

    code, err = usage_error(capsys, "blocks", path, "--assert-blocks", "0,1;1,2,3")
    assert code == 2 and "--assert-blocks" in err

    diag = np.kron(np.diag([0.5, 0.5]), np.diag([0.25, 0.25, 0.5]))
    code, out, _ = run(capsys, "blocks", write_state(tmp_path / "diag.json", 2, 3, diag))
    assert [b["e_indices"] for b in json.loads(out)["decomposition"]["blocks"]] == [[0], [1], [2]]


def test_verify_deterministic(capsys):
    code, first, _ = run(capsys, "verify", "--trials", 10, "--seed", 42)
    _, second, _ = run(capsys, "verify", "--trials", 10, "--seed", 42)
    assert code == 0 and first == second
    assert "all suites passed" in first


def test_verify_detects_injected_fault(capsys):
    code, out, _ = run(capsys, "verify", "--trials", 10, "--inject-fault", "closed-form-sign")
    assert code == 1
    assert "FAIL difference_identity" in out


def test_verify_default_run(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0, out


def test_gibbs_round_trip(capsys, tmp_path):
    path = tmp_path / "gibbs.json"
    for T in (0.2, 1.5):
        assert run(capsys, "gibbs", "--K", 4, "--T", T, "--out", path)[0] == 0
        code, out, _ = run(capsys, "analyze", path)
        expected = sweep(ModelSpec(4, 1.0), [T])[0].E_total
        assert code == 0
        assert json.loads(out)["entanglement"]["value"] == pytest.approx(expected, abs=1e-9)
    code, err = usage_error(capsys, "gibbs", "--K", 2, "--T", 1, "--mode", "infinite")
    assert code == 2 and "--mode" in err


def test_matrix_file_round_trip(tmp_path, rng):
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    path = tmp_path / "m.json"
    save_matrix_file(BipartiteState(2, 3, rho), path)
    loaded = load_matrix_file(path)
    assert (loaded.dim_s, loaded.dim_e) == (2, 3)
    np.testing.assert_allclose(loaded.rho, rho, rtol=1e-11, atol=1e-15)
    data = json.loads(path.read_text())
    assert data["layout"] == "s-major"
    bad = dict(matrix_file_dict(BipartiteState(2, 3, rho)), layout="e-major")
    with pytest.raises(ValueError):
        parse_matrix_file(json.dumps(rounded(bad)))


def test_twelve_significant_digits():
    assert rounded({"x": [1 / 3, np.float64(2 / 3)], "n": np.int64(3)}) == {
        "x": [0.333333333333, 0.666666666667],
        "n": 3,
    }
