import csv
import io
import json

import pytest

from erasure_secrecy.analysis import pr_d_geq, pr_ref
from erasure_secrecy.cli import main
from erasure_secrecy.experiment import OUT_DIR_ENV, ExperimentConfig, parse_rho_spec
from erasure_secrecy.ldpc import PuncturePattern, read_alist, write_alist

from conftest import HAMMING_H


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(autouse=True)
def _no_env_out(monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)


# -- bounds ---------------------------------------------------------------------------------


def test_bounds_worked_example(capsys):
    code, out, _ = run(capsys, "bounds", "--delta", 0.3, "--epsilon", 0.15, "--json")
    assert code == 0
    data = json.loads(out)
    assert data["rho_min"] == pytest.approx(-0.275, abs=1e-3)
    assert data["rho_max"] == pytest.approx(0.642, abs=1e-3)
    assert data["p11_min"] == 0.0 and data["p11_max"] == 0.15


def test_bounds_symmetric_text(capsys):
    code, out, _ = run(capsys, "bounds", "--delta", 0.5, "--epsilon", 0.5)
    assert code == 0
    assert out.splitlines()[0] == "rho in [-1, 1]"


def test_bounds_degenerate_exit_code(capsys):
    code, _, err = run(capsys, "bounds", "--delta", 0, "--epsilon", 0.5)
    assert code == 2
    assert "DegenerateMarginal" in err


# -- analyze --------------------------------------------------------------------------------


def test_analyze_single_point(capsys):
    code, out, _ = run(capsys, "analyze", "--delta", 0.5, "--epsilon", 0.5, "--rho", "values:0", "--out", "-")
    assert code == 0
    (row,) = rows_of(out)
    assert float(row["pr_ref"]) == pytest.approx(2 / 3, abs=1e-12)
    assert float(row["expected_d"]) == pytest.approx(5000 / 3, rel=1e-11)


def test_analyze_default_grid(capsys):
    code, out, _ = run(capsys, "analyze", "--out", "-")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 5 * 101
    by_eps = {}
    for r in rows:
        by_eps.setdefault(r["epsilon"], []).append(r)
    assert set(by_eps) == {"0.3", "0.4", "0.5", "0.51", "0.6"}
    assert all(float(r["pr_d_geq_beta"]) >= 0.999 for r in by_eps["0.51"])
    curve = [float(r["pr_d_geq_beta"]) for r in by_eps["0.3"]]
    assert curve[0] > 0.99 and curve[-1] < 0.01


def test_analyze_flags_infeasible_rho(capsys):
    code, out, _ = run(capsys, "analyze", "--delta", 0.2, "--epsilon", "0.8,0.5", "--rho", "values:0.5", "--out", "-")
    assert code == 0
    rows = rows_of(out)
    assert rows[0]["flag"] == "infeasible_rho" and rows[0]["pr_ref"] == ""
    assert rows[1]["flag"] == "" and rows[1]["pr_ref"] != ""


def test_analyze_range_is_clipped(capsys):
    code, out, _ = run(capsys, "analyze", "--delta", 0.3, "--epsilon", 0.15, "--rho", "range:-2:2:5", "--out", "-")
    assert code == 0
    rhos = [float(r["rho"]) for r in rows_of(out)]
    assert rhos[0] == pytest.approx(-0.27501, abs=1e-5)
    assert rhos[-1] == pytest.approx(0.641689, abs=1e-5)
    assert all(r["flag"] == "" for r in rows_of(out))


def test_analyze_writes_manifest(capsys, tmp_path):
    path = tmp_path / "a.csv"
    code, _, _ = run(capsys, "analyze", "--epsilon", 0.5, "--rho", "auto:11", "--out", path)
    assert code == 0
    assert len(rows_of(path.read_text())) == 11
    manifest = json.loads((tmp_path / "a.manifest.json").read_text())
    assert manifest["command"] == "analyze"
    assert manifest["seed"] == 0 and manifest["rows"] == 11
    assert {"numpy", "python"} <= set(manifest["versions"])


def test_config_file_with_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eta": 100, "beta": 10, "deltas": [0.4], "epsilons": [0.3], "rho": "auto:3"}))
    code, out, _ = run(capsys, "analyze", "--config", cfg, "--beta", 20, "--out", "-")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 3
    p = pr_ref(0.4, 0.3, float(rows[1]["rho"]))
    assert float(rows[1]["pr_d_geq_beta"]) == pytest.approx(pr_d_geq(20, 100, 1, p), rel=1e-11)


def test_env_var_output_directory(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "runs"))
    code, out, _ = run(capsys, "analyze", "--epsilon", 0.4, "--rho", "values:0")
    assert code == 0 and out == ""
    assert (tmp_path / "runs" / "analyze.csv").exists()
    assert (tmp_path / "runs" / "analyze.manifest.json").exists()


def test_bad_config_exit_code(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run(capsys, "analyze", "--config", cfg)[0] == 2
    assert run(capsys, "analyze", "--config", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "analyze", "--eta", 0)[0] == 2
    assert run(capsys, "analyze", "--rho", "sideways")[0] == 2


def test_rho_spec_parsing():
    assert parse_rho_spec("auto").points == 101
    assert parse_rho_spec("auto:7").points == 7
    assert parse_rho_spec("values:0,0.1").values == (0.0, 0.1)
    assert parse_rho_spec([0.2]).values == (0.2,)
    with pytest.raises(ValueError):
        parse_rho_spec("range:0:1")


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict({"eta": 10, "deltas": [0.2], "code": {"N": 16, "k": 8}})
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


# -- simulate -----------------------------------------------------------------------------


SIM = ("simulate", "--eta", 1000, "--delta", 0.5, "--epsilon", 0.5, "--trials", 500, "--seed", 4)


def test_simulate_mean_within_three_sigma(capsys):
    code, out, _ = run(capsys, *SIM, "--out", "-")
    assert code == 0
    (row,) = rows_of(out)
    assert int(row["trials"]) == 500
    mean, se = float(row["emp_mean_d"]), float(row["emp_mean_d_se"])
    assert abs(mean - 1000 / 3) <= 3 * se
    assert float(row["mean_transmissions"]) == pytest.approx(2000, rel=0.01)


def test_simulate_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *SIM, "--rho", "values:0,0.3", "--out", a)
    run(capsys, *SIM, "--rho", "values:0,0.3", "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_simulate_analytic_columns_match_analyze(capsys):
    grid = ("--eta", 200, "--delta", "0.3,0.6", "--epsilon", "0.2,0.7", "--rho", "auto:4", "--beta", 30)
    _, sim, _ = run(capsys, "simulate", *grid, "--trials", 20, "--out", "-")
    _, ana, _ = run(capsys, "analyze", *grid, "--out", "-")
    sim_rows, ana_rows = rows_of(sim), rows_of(ana)
    assert len(sim_rows) == len(ana_rows) == 16
    for s, a in zip(sim_rows, ana_rows):
        for col in ("delta", "epsilon", "rho", "pr_ref", "expected_d", "pr_d_geq_beta"):
            assert s[col] == a[col]


def test_simulate_transparent_eavesdropper(capsys):
    code, out, _ = run(capsys, "simulate", "--eta", 50, "--delta", 0.4, "--epsilon", 0, "--trials", 30, "--out", "-")
    assert code == 0
    (row,) = rows_of(out)
    assert float(row["pr_ref"]) == 1.0
    assert float(row["emp_mean_d"]) == 0.0 and float(row["emp_pr_d_geq_beta"]) == 0.0


def test_simulate_flags_cap(capsys):
    code, out, _ = run(
        capsys, "simulate", "--eta", 50, "--delta", 0.9, "--epsilon", 0.5, "--trials", 5, "--max-retx", 2, "--out", "-"
    )
    assert code == 0
    (row,) = rows_of(out)
    assert row["flag"].startswith("retx_cap_exceeded:")


def test_simulate_codec_mode(capsys, tmp_path):
    code, out, _ = run(
        capsys, "simulate", "--eta", 4, "--alpha", 2, "--L", 3, "--beta", 2,
        "--delta", 0.4, "--epsilon", 0.5, "--rho", "values:-0.2,0.3", "--trials", 50,
        "--code-N", 16, "--code-k", 8, "--degrees", "1:0.125,2:0.375,3:0.5", "--code-seed", 11,
        "--out", tmp_path / "s.csv",
    )
    assert code == 0
    rows = rows_of((tmp_path / "s.csv").read_text())
    assert all(r["bob_failures"] == "0" for r in rows)
    assert json.loads((tmp_path / "s.manifest.json").read_text())["mode"] == "codec"


# -- codegen and certify --------------------------------------------------------------------


def test_codegen_fixture_and_certify(capsys, tmp_path):
    code, out, _ = run(capsys, "codegen", "--N", 16, "--k", 8, "--seed", 1, "--out-dir", tmp_path, "--name", "fx")
    assert code == 0
    assert "certified |R| = 8" in out
    h = read_alist(tmp_path / "fx.alist")
    assert h.shape == (8, 16)
    meta = json.loads((tmp_path / "fx.pattern.json").read_text())
    assert "restarts" in meta
    code, out, _ = run(capsys, "certify", "--alist", tmp_path / "fx.alist", "--pattern", tmp_path / "fx.pattern.json")
    assert code == 0 and out.startswith("certified")


def test_codegen_rejects_no_checks(capsys, tmp_path):
    code, _, err = run(capsys, "codegen", "--N", 8, "--k", 8, "--out-dir", tmp_path)
    assert code == 2 and "N > k" in err


def test_codegen_zero_degree_spec_not_found(capsys, tmp_path):
    code, _, err = run(
        capsys, "codegen", "--N", 16, "--k", 8, "--degrees", "0:0.5,2:0.5", "--max-restarts", 5, "--out-dir", tmp_path
    )
    assert code == 2
    assert "hint:" in err
    assert not list(tmp_path.iterdir())


def test_certify_violation_exit_code(capsys, tmp_path):
    write_alist(HAMMING_H, tmp_path / "h.alist")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(PuncturePattern((2, 4, 5, 6), 7).to_dict()))
    code, out, _ = run(capsys, "certify", "--alist", tmp_path / "h.alist", "--pattern", bad, "--json")
    assert code == 2
    assert json.loads(out)["kind"] == "size"
    good = tmp_path / "good.json"
    good.write_text(json.dumps(PuncturePattern((4, 5, 6), 7).to_dict()))
    code, out, _ = run(capsys, "certify", "--alist", tmp_path / "h.alist", "--pattern", good, "--json")
    assert code == 0 and json.loads(out)["certified"] is True


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
