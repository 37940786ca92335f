import subprocess
import sys
from pathlib import Path

import pytest

from recokp.cli import main


def run_cli(*args):
    return main(list(args))


def test_gen_writes_declared_file(tmp_path, capsys):
    out = tmp_path / "a.kp"
    assert run_cli("gen", "--items", "8", "--scenarios", "2", "--seed", "7",
                   "-o", str(out)) == 0
    assert out.exists()
    assert capsys.readouterr().out.strip() == str(out)
    header = out.read_text().splitlines()[0].split()
    assert header[:3] == ["8", "2", "2"]


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.kp", tmp_path / "b.kp"
    run_cli("gen", "--items", "8", "--scenarios", "2", "--seed", "3", "-o", str(a))
    run_cli("gen", "--items", "8", "--scenarios", "2", "--seed", "3", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_gen_usage_errors(tmp_path):
    assert run_cli("gen", "--items", "0", "-o", str(tmp_path / "x.kp")) == 1
    assert run_cli("gen", "--items", "5", "--low", "9", "--high", "3",
                   "-o", str(tmp_path / "x.kp")) == 1


def _make_instance(tmp_path, items=8, scenarios=2, seed=5) -> str:
    path = tmp_path / "inst.kp"
    assert run_cli("gen", "--items", str(items), "--scenarios", str(scenarios),
                   "--seed", str(seed), "-o", str(path)) == 0
    return str(path)


def test_robust_fixed_grid_size(tmp_path):
    inst = _make_instance(tmp_path)
    out = tmp_path / "rob.csv"
    assert run_cli("robust", inst, "--method", "median", "--coupling", "fixed",
                   "--scalarization", "ws", "-o", str(out)) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 102
    assert lines[0] == "lambda1,lambda2,cost,bits"


def test_robust_opt_schema_and_epsilon(tmp_path):
    inst = _make_instance(tmp_path)
    out = tmp_path / "rob.csv"
    assert run_cli("robust", inst, "--method", "center", "--coupling", "opt",
                   "--scalarization", "cheb", "--epsilon", "0.005",
                   "-o", str(out)) == 0
    header = out.read_text().splitlines()[0]
    assert header == "lambda1,lambda2,cost,bits,recovered_0,recovered_1"


def test_robust_single_scenario_costs_zero(tmp_path):
    inst = _make_instance(tmp_path, scenarios=1)
    out = tmp_path / "rob.csv"
    assert run_cli("robust", inst, "--method", "median", "--coupling", "fixed",
                   "--scalarization", "ws", "-o", str(out)) == 0
    for line in out.read_text().splitlines()[1:]:
        assert line.split(",")[2] == "0"


def test_robust_jobs_invariance(tmp_path):
    inst = _make_instance(tmp_path, items=10, scenarios=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("robust", inst, "--method", "median", "--coupling", "opt",
                   "--scalarization", "ws", "-o", str(a), "--jobs", "1") == 0
    assert run_cli("robust", inst, "--method", "median", "--coupling", "opt",
                   "--scalarization", "ws", "-o", str(b), "--jobs", "2") == 0
    assert a.read_bytes() == b.read_bytes()


def test_robust_export_lp(tmp_path):
    from recokp.milp import parse_lp

    inst = _make_instance(tmp_path, items=6, scenarios=2)
    out = tmp_path / "rob.csv"
    lpdir = tmp_path / "models"
    assert run_cli("robust", inst, "--method", "center", "--coupling", "opt",
                   "--scalarization", "ws", "-o", str(out),
                   "--export-lp", str(lpdir)) == 0
    files = sorted(lpdir.iterdir())
    assert len(files) == 101
    model = parse_lp(files[0].read_text())
    assert model.num_binary == 6 * (1 + 2 * 2)
    assert model.num_continuous == 1


def test_robust_missing_file_is_io_error(tmp_path):
    assert run_cli("robust", str(tmp_path / "nope.kp"), "--method", "median",
                   "--coupling", "fixed", "--scalarization", "ws",
                   "-o", str(tmp_path / "x.csv")) == 3


def test_robust_malformed_file_is_io_error(tmp_path):
    bad = tmp_path / "bad.kp"
    bad.write_text("3 2 1\n")
    assert run_cli("robust", str(bad), "--method", "median",
                   "--coupling", "fixed", "--scalarization", "ws",
                   "-o", str(tmp_path / "x.csv")) == 3


def test_robust_bad_epsilon_is_usage_error(tmp_path):
    inst = _make_instance(tmp_path)
    assert run_cli("robust", inst, "--method", "median", "--coupling", "opt",
                   "--scalarization", "ws", "--epsilon", "nope",
                   "-o", str(tmp_path / "x.csv")) == 1
    assert run_cli("robust", inst, "--method", "median", "--coupling", "opt",
                   "--scalarization", "ws", "--epsilon", "1.5",
                   "-o", str(tmp_path / "x.csv")) == 1


def test_solver_limit_exit_code(tmp_path, capsys):
    inst = _make_instance(tmp_path, items=14, scenarios=3, seed=11)
    out = tmp_path / "rob.csv"
    code = run_cli("robust", inst, "--method", "center", "--coupling", "fixed",
                   "--scalarization", "ws", "--node-limit", "1", "-o", str(out))
    assert code == 2
    err = capsys.readouterr().err
    assert "lambda" in err and "limit" in err


def test_compare_four_rows_and_determinism(tmp_path):
    inst = _make_instance(tmp_path, items=8, scenarios=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("compare", inst, "-o", str(a)) == 0
    assert run_cli("compare", inst, "-o", str(b), "--jobs", "2") == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "l,inst,method,scalarization,cost_fixed,cost_opt,pct_dev"
    assert len(lines) == 5
    for line in lines[1:]:
        cells = line.split(",")
        assert int(cells[4]) >= int(cells[5])
        assert not cells[6].startswith("-")


def test_compare_batch_flags(tmp_path):
    out = tmp_path / "batch.csv"
    assert run_cli("compare", "--items", "6", "--count", "2", "--scenarios", "2",
                   "--seed", "3", "--method", "median", "--scalarization", "ws",
                   "-o", str(out)) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[1] == "1"
    assert lines[2].split(",")[1] == "2"


def test_compare_requires_input(tmp_path):
    assert run_cli("compare", "-o", str(tmp_path / "x.csv")) == 1


def test_sweep_schema(tmp_path):
    inst = _make_instance(tmp_path, items=8, scenarios=2)
    out = tmp_path / "sw.csv"
    assert run_cli("sweep", inst, "--method", "median", "--scalarization", "ws",
                   "-o", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "epsilon,v,deviation"
    assert len(lines) == 12
    assert lines[1].split(",")[0] == "0.000"
    assert lines[1].split(",")[2] == "0.000000"
    devs = [float(l.split(",")[2]) for l in lines[1:]]
    assert all(a <= b + 1e-12 for a, b in zip(devs, devs[1:]))


def test_unknown_command_is_usage_error():
    assert run_cli("frobnicate") == 1


def test_console_entry_point_runs(tmp_path):
    out = tmp_path / "z.kp"
    res = subprocess.run(
        [sys.executable, "-m", "recokp.cli", "gen", "--items", "4", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert out.exists()
