import json
import subprocess
import sys

import pytest

from dynah.cli import main
from dynah.gridworld import is_solvable, load_maze

SMALL = ["--height", "6", "--width", "6", "--start", "0,0", "--goal", "5,5",
         "--runs", "2", "--episodes", "4", "--seed", "3"]


def read_all(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_generate_reference_scenario(tmp_path):
    out = tmp_path / "maze.txt"
    assert main(["generate", "--height", "39", "--width", "36", "--start", "1,4", "--goal", "28,34",
                 "--sigma", "0.3", "--seed", "7", "--out", str(out)]) == 0
    grid = load_maze(out)
    assert (grid.height, grid.width, grid.start, grid.goal) == (39, 36, (1, 4), (28, 34))
    assert is_solvable(grid)
    assert not grid.obstacles[1, 4] and not grid.obstacles[28, 34]
    assert "# seed=7" in out.read_text()


def test_generate_to_stdout(capsys):
    assert main(["generate", "--height", "4", "--width", "5", "--start", "0,0", "--goal", "3,4",
                 "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("4 5\n0 0 3 4\n")


def test_solve_corridor(tmp_path, capsys):
    maze = tmp_path / "c.txt"
    maze.write_text("1 4\n0 0 0 3\nS..G\n")
    assert main(["solve", str(maze)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "3"
    assert lines[1] == "0,0 0,1 0,2 0,3"


def test_solve_unreachable(tmp_path, capsys):
    maze = tmp_path / "w.txt"
    maze.write_text("3 2\n0 0 2 1\nS.\n##\n.G\n")
    assert main(["solve", str(maze)]) != 0
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "unreachable" in err


def test_run_writes_csv_and_summary(tmp_path):
    out = tmp_path / "r"
    assert main(["run", "--agent", "dynaq", *SMALL, "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["dynaq.csv", "summary.json"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["seed"] == 3
    assert summary["config"]["alpha"] == 0.1  # defaults materialised
    assert len(summary["runs"]) == 2
    assert (out / "dynaq.csv").read_text().splitlines()[1] == "episode,mean,run_0,run_1"


def test_compare_and_sweep_files(tmp_path):
    assert main(["compare", *SMALL, "--planning-steps", "3", "--out", str(tmp_path / "c")]) == 0
    assert sorted(p.name for p in (tmp_path / "c").iterdir()) == [
        "dynah.csv", "dynaq.csv", "qlearning.csv", "summary.json"]
    summary = json.loads((tmp_path / "c" / "summary.json").read_text())
    assert summary["variants"]["qlearning"]["config"]["planning_steps"] == 0
    assert summary["variants"]["dynah"]["config"]["planning_steps"] == 3

    assert main(["sweep", *SMALL, "--values", "0,2", "--out", str(tmp_path / "s")]) == 0
    assert sorted(p.name for p in (tmp_path / "s").iterdir()) == [
        "dynah_N0.csv", "dynah_N2.csv", "summary.json"]


@pytest.mark.parametrize("cmd", [
    ["run", "--agent", "dynah"],
    ["compare"],
    ["sweep", "--values", "1,2"],
])
def test_byte_identical_outputs(tmp_path, cmd):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main([*cmd, *SMALL, "--out", str(a)]) == 0
    assert main([*cmd, *SMALL, "--out", str(b)]) == 0
    assert main([*cmd, *SMALL, "--jobs", "2", "--out", str(c)]) == 0
    assert read_all(a) == read_all(b) == read_all(c)


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# experiment\nheight = 6\nwidth = 6\nstart = 0,0\ngoal = 5,5\n"
                   "runs = 2\nepisodes = 3\nplanning-steps = 4\nseed = 9\n")
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--episodes", "2", "--out", str(out)]) == 0
    conf = json.loads((out / "summary.json").read_text())["config"]
    assert (conf["episodes"], conf["planning_steps"], conf["seed"], conf["runs"]) == (2, 4, 9, 2)


def test_env_seed_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("DYNAH_SEED", "77")
    args = [a for a in SMALL]
    i = args.index("--seed")
    del args[i:i + 2]
    assert main(["run", *args, "--out", str(tmp_path / "e")]) == 0
    assert json.loads((tmp_path / "e" / "summary.json").read_text())["config"]["seed"] == 77
    assert main(["run", *SMALL, "--out", str(tmp_path / "f")]) == 0
    assert json.loads((tmp_path / "f" / "summary.json").read_text())["config"]["seed"] == 3


def test_missing_seed_is_recorded(tmp_path, monkeypatch):
    monkeypatch.delenv("DYNAH_SEED", raising=False)
    args = [a for a in SMALL]
    i = args.index("--seed")
    del args[i:i + 2]
    assert main(["run", *args, "--out", str(tmp_path / "g")]) == 0
    seed = json.loads((tmp_path / "g" / "summary.json").read_text())["config"]["seed"]
    assert isinstance(seed, int)
    assert f'"seed": {seed}' in (tmp_path / "g" / "dynah.csv").read_text().splitlines()[0]


@pytest.mark.parametrize("argv", [
    ["run", "--bogus"],
    ["frobnicate"],
    ["solve", "/nonexistent/maze.txt"],
    ["run", "--alpha", "2", "--runs", "1", "--episodes", "1"],
    ["run", "--start", "1;4"],
    ["run", "--config", "/nonexistent.cfg"],
    ["generate", "--sigma", "0"],
])
def test_failures_are_one_line(argv, capsys, tmp_path):
    assert main([*argv]) != 0
    err = capsys.readouterr().err
    assert err.startswith("dynah: error:")
    assert err.count("\n") == 1


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["run", "--config", str(cfg)]) != 0
    assert "unknown config key" in capsys.readouterr().err


def test_failed_run_leaves_no_output(tmp_path):
    out = tmp_path / "never"
    assert main(["run", *SMALL, "--fixed-maze", str(tmp_path / "missing.txt"), "--out", str(out)]) != 0
    assert not out.exists()


def test_module_entry_point(tmp_path):
    maze = tmp_path / "c.txt"
    maze.write_text("1 4\n0 0 0 3\nS..G\n")
    proc = subprocess.run([sys.executable, "-m", "dynah", "solve", str(maze)],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0] == "3"
