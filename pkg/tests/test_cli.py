import json
import math

import pytest

from trailerlab import cli


def run_cli(args):
    return cli.main(args)


def test_simulate_eight_row_count(tmp_path, capsys):
    out = tmp_path / "eight"
    code = run_cli(["simulate", "--scenario", "eight", "--out", str(out)])
    assert code == cli.EXIT_OK
    lines = (out / "trace.csv").read_text().strip().split("\n")
    rows = lines[1:]
    t_end = float(rows[-1].split(",")[0])
    assert len(rows) == round(100.0 * t_end) + 1
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "goal_reached"
    trace = json.loads((out / "trace.json").read_text())
    assert trace["columns"][0] == "t"
    assert len(trace["rows"]) == len(rows)
    assert "goal_reached" in capsys.readouterr().out


def test_simulate_determinism(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run_cli(["simulate", "--scenario", "parking",
                        "--out", str(out)]) == cli.EXIT_OK
        outs.append((out / "trace.csv").read_bytes())
    assert outs[0] == outs[1]


def test_simulate_validation_failure(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "params": {"L1": 0.19, "L2": 0.0, "L3": 0.345, "M1": 0.036,
                   "alpha_limit": 0.767},
        "path": {"legs": [{"direction": "reverse",
                           "waypoints": [[0.0, 0.0], [-1.0, 0.0]]}]},
    }))
    out = tmp_path / "never"
    code = run_cli(["simulate", "--scenario", str(bad), "--out", str(out)])
    assert code == cli.EXIT_CONFIG
    assert "L2" in capsys.readouterr().err
    assert not out.exists()


def test_simulate_unknown_scenario(tmp_path, capsys):
    code = run_cli(["simulate", "--scenario", "warp", "--out",
                    str(tmp_path / "x")])
    assert code == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "straight" in err and "eight" in err and "parking" in err


def test_simulate_exit_codes_for_outcomes(tmp_path):
    timeout = tmp_path / "timeout.json"
    timeout.write_text(json.dumps({
        "path": {"legs": [{"direction": "reverse",
                           "waypoints": [[1.0, 0.0], [-9.0, 0.0]]}]},
        "max_sim_time": 1.0,
    }))
    assert run_cli(["simulate", "--scenario", str(timeout),
                    "--out", str(tmp_path / "t")]) == cli.EXIT_TIMED_OUT
    jack = tmp_path / "jack.json"
    jack.write_text(json.dumps({
        "path": {"legs": [{"direction": "reverse",
                           "waypoints": [[1.0, 0.0], [-9.0, 0.0]]}]},
        "initial_state": {"beta2": 1.45},
    }))
    assert run_cli(["simulate", "--scenario", str(jack),
                    "--out", str(tmp_path / "j")]) == cli.EXIT_JACKKNIFED


def test_schedule_small_grid(tmp_path):
    out = tmp_path / "sched"
    assert run_cli(["schedule", "--grid", "3", "--out", str(out)]) == 0
    lines = (out / "schedule.csv").read_text().strip().split("\n")
    assert lines[0] == "alpha_e,l_beta3,l_beta2"
    assert len(lines) == 4
    first = lines[1].split(",")
    last = lines[3].split(",")
    assert float(first[0]) == -float(last[0])
    assert first[1:] == last[1:]
    obj = json.loads((out / "schedule.json").read_text())
    assert len(obj["grid"]) == 3


def test_schedule_default_grid_even_curve(tmp_path):
    out = tmp_path / "sched"
    assert run_cli(["schedule", "--out", str(out)]) == 0
    lines = (out / "schedule.csv").read_text().strip().split("\n")[1:]
    assert len(lines) == 101
    gains = [tuple(line.split(",")[1:]) for line in lines]
    assert gains == gains[::-1]


def test_schedule_invalid_weights(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "weights": {"Q": [[10.0, 1.0], [0.0, 10.0]], "R": 1.0},
        "path": {"legs": [{"direction": "reverse",
                           "waypoints": [[0.0, 0.0], [-1.0, 0.0]]}]},
    }))
    code = run_cli(["schedule", "--scenario", str(bad),
                    "--out", str(tmp_path / "s")])
    assert code == cli.EXIT_CONFIG
    assert "weights.Q" in capsys.readouterr().err


def test_roa_small_grid(tmp_path):
    out = tmp_path / "roa"
    assert run_cli(["roa", "--grid", "3", "--out", str(out)]) == 0
    lines = (out / "roa.csv").read_text().strip().split("\n")
    assert lines[0] == "beta3,beta2,converged"
    assert len(lines) == 10
    assert "0,0,1" in lines
    meta = json.loads((out / "roa_meta.json").read_text())
    assert meta["cell_count"] == 9


def test_roa_parallel_identical(tmp_path):
    texts = []
    for name, par in (("seq", "1"), ("par", "3")):
        out = tmp_path / name
        assert run_cli(["roa", "--grid", "5", "--parallel", par,
                        "--out", str(out)]) == 0
        texts.append((out / "roa.csv").read_bytes())
    assert texts[0] == texts[1]


def test_serve_rejects_bad_bind(capsys):
    assert run_cli(["serve", "--bind", "nocolon"]) == cli.EXIT_CONFIG
    assert "host:port" in capsys.readouterr().err
