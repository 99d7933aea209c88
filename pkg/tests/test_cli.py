import json

import numpy as np
import pytest
from click.testing import CliRunner

from tailcvar.cli import main, parse_n_grid
from tailcvar.distributions import parse_distribution


@pytest.fixture
def data_file(tmp_path):
    x = parse_distribution("frechet:2").sample(np.random.default_rng(1), 5000)
    p = tmp_path / "losses.txt"
    p.write_text("# simulated losses\n" + "\n".join(repr(float(v)) for v in x) + "\n")
    return p


def test_parse_n_grid():
    assert parse_n_grid("10000..30000:10000") == (10000, 20000, 30000)
    assert parse_n_grid("500,1000") == (500, 1000)


@pytest.mark.parametrize("method", ["sa", "bpot", "upot"])
def test_estimate_json(data_file, method):
    res = CliRunner().invoke(main, ["estimate", "--input", str(data_file), "--alpha", "0.99", "--method", method])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["method"] == method.upper() and doc["value"] > 0
    assert (doc["ci_lower"] is not None) == (method == "upot")


def test_estimate_csv_and_out(data_file, tmp_path):
    out = tmp_path / "o"
    res = CliRunner().invoke(main, ["estimate", "--input", str(data_file), "--alpha", "0.99", "--format", "csv",
                                    "--q-start", "0.85", "--q-end", "0.95", "--q-step", "0.05", "--out", str(out)])
    assert res.exit_code == 0, res.output
    header, row = res.output.strip().splitlines()
    assert header.startswith("alpha,method,value")
    assert json.loads((out / "estimate.json").read_text())["diagnostics"]["percentile"] in (0.85, 0.9, 0.95)


def test_estimate_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\nx\n")
    res = CliRunner().invoke(main, ["estimate", "--input", str(bad), "--alpha", "0.9"])
    assert res.exit_code != 0 and "bad.txt:3" in res.output
    tiny = tmp_path / "tiny.txt"
    tiny.write_text("1\n2\n3\n")
    assert CliRunner().invoke(main, ["estimate", "--input", str(tiny), "--alpha", "0.9"]).exit_code != 0
    assert CliRunner().invoke(main, ["estimate", "--input", str(tiny), "--alpha", "0.5",
                                     "--method", "sa"]).exit_code == 0
    assert CliRunner().invoke(main, ["estimate", "--input", str(tmp_path / "missing"), "--alpha", "0.9"]).exit_code != 0


def test_avar_command(tmp_path):
    res = CliRunner().invoke(main, ["avar", "--dist", "frechet:2.25", "--alpha", "0.999", "--n-grid",
                                    "10000..30000:10000", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    lines = res.output.strip().splitlines()
    assert lines[0] == "distribution,alpha,n,k,avar_upot,avar_sa" and len(lines) == 4
    assert (tmp_path / "fig_avar.csv").read_text() == res.output
    assert CliRunner().invoke(main, ["avar", "--dist", "burr:1,2", "--alpha", "0.99"]).exit_code != 0


def test_simulate_and_coverage_commands(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("distributions: ['frechet:2.5']\nreps: 2\nmax_n: 2000\nn_grid: [2000]\n")
    out = tmp_path / "sim"
    res = CliRunner().invoke(main, ["simulate", "--config", str(cfg), "--seed", "11", "--out", str(out)])
    assert res.exit_code == 0, res.output
    for name in ("results.csv", "config_echo.json", "fig_compare.csv", "fig_coverage.csv", "timings.json"):
        assert (out / name).exists()
    assert json.loads((out / "config_echo.json").read_text())["master_seed"] == 11
    again = tmp_path / "sim2"
    CliRunner().invoke(main, ["simulate", "--config", str(cfg), "--seed", "11", "--out", str(again)])
    assert (out / "results.csv").read_bytes() == (again / "results.csv").read_bytes()

    res = CliRunner().invoke(main, ["coverage", "--config", str(cfg), "--dist", "halft:2.5", "--reps", "2"])
    assert res.exit_code == 0, res.output
    assert "halft:2.5,2000,UPOT" in res.output


def test_simulate_rejects_bad_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"reps": -1}')
    assert CliRunner().invoke(main, ["simulate", "--config", str(cfg)]).exit_code != 0
