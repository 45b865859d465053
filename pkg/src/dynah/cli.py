"""Command-line entry point: generate, solve, run, compare, sweep.

Option precedence, highest first: command-line flag, ``--config`` file,
``DYNAH_SEED`` (seed only), built-in defaults. When no seed is given
anywhere one is drawn and written into every output file.
"""
from __future__ import annotations

import argparse
import configparser
import os
import secrets
import sys
from pathlib import Path
from typing import Optional, Sequence

from dynah.astar_oracle import astar_shortest
from dynah.experiment import (
    ExperimentConfig,
    atomic_write_text,
    compare_algorithms,
    dumps_json,
    format_curve_csv,
    run_experiment,
    summary_dict,
    sweep_planning_steps,
)
from dynah.gridworld import MazeError, MazeGenConfig, Position, format_maze, generate_maze, load_maze
from dynah.heuristics import DEFAULT_HEURISTIC, HEURISTICS
from dynah.rl_core import AgentConfig, AgentKind

SEED_ENV = "DYNAH_SEED"

DEFAULTS = {
    "alpha": 0.1,
    "gamma": 0.95,
    "epsilon": 0.1,
    "planning_steps": 10,
    "max_episode_steps": 10_000,
    "runs": 30,
    "episodes": 100,
    "height": 39,
    "width": 36,
    "start": Position(1, 4),
    "goal": Position(28, 34),
    "sigma": 0.3,
    "heuristic": DEFAULT_HEURISTIC,
    "fixed_maze": None,
    "out": None,
    "jobs": 1,
    "extra_stats": False,
    "agent": AgentKind.DYNAH.value,
    "values": (1, 5, 10, 25),
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def parse_position(text: str) -> Position:
    try:
        r, c = (int(v) for v in str(text).split(","))
    except ValueError:
        raise CliError(f"bad position {text!r}, expected ROW,COL") from None
    return Position(r, c)


def parse_int_list(text) -> tuple[int, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise CliError(f"bad integer list {text!r}") from None


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise CliError(f"bad boolean {text!r}")


def parse_seed(text) -> int:
    try:
        seed = int(str(text), 0)
    except ValueError:
        raise CliError(f"bad seed {text!r}") from None
    if not 0 <= seed < 2**64:
        raise CliError("seed must be a 64-bit unsigned integer")
    return seed


CONVERTERS = {
    "alpha": float, "gamma": float, "epsilon": float, "sigma": float,
    "planning_steps": int, "max_episode_steps": int, "runs": int, "episodes": int,
    "height": int, "width": int, "jobs": int,
    "start": parse_position, "goal": parse_position,
    "heuristic": str, "fixed_maze": str, "out": str, "agent": str,
    "extra_stats": parse_bool, "values": parse_int_list, "seed": parse_seed,
}


def read_config_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        cp.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise CliError(f"malformed config {path}: {str(exc).splitlines()[0]}") from None
    out = {}
    for key, raw in cp["config"].items():
        name = key.replace("-", "_")
        if name not in CONVERTERS:
            raise CliError(f"unknown config key {key!r} in {path}")
        try:
            out[name] = CONVERTERS[name](raw)
        except ValueError:
            raise CliError(f"bad value {raw!r} for {key} in {path}") from None
    return out


def resolve(args: argparse.Namespace, keys: Sequence[str]) -> dict:
    file_cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None:
            value = file_cfg.get(key)
        if value is None and key == "seed":
            env = os.environ.get(SEED_ENV)
            if env:
                value = parse_seed(env)
        if value is None and key == "seed":
            value = secrets.randbits(63)
        if value is None:
            value = DEFAULTS[key]
        out[key] = value
    return out


def _maze_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--start", type=parse_position, help="ROW,COL (0-based)")
    p.add_argument("--goal", type=parse_position, help="ROW,COL (0-based)")
    p.add_argument("--sigma", type=float, help="std of the per-tile normal draw")
    p.add_argument("--seed", type=parse_seed)
    p.add_argument("--config", help="flat key = value file mirroring flag names")


def _experiment_options(p: argparse.ArgumentParser, with_agent: bool) -> None:
    _maze_options(p)
    if with_agent:
        p.add_argument("--agent", choices=[k.value for k in AgentKind])
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--planning-steps", dest="planning_steps", type=int)
    p.add_argument("--max-episode-steps", dest="max_episode_steps", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--episodes", type=int)
    p.add_argument("--heuristic", choices=sorted(HEURISTICS))
    p.add_argument("--fixed-maze", dest="fixed_maze", metavar="FILE",
                   help="use this maze for every run instead of random ones")
    p.add_argument("--jobs", type=int, help="worker processes for independent runs")
    p.add_argument("--extra-stats", dest="extra_stats", action="store_const", const=True,
                   help="add median/std columns to the CSVs")
    p.add_argument("--out", help="output directory (default: results)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dynah", description="Q-learning, Dyna-Q and Dyna-H on random mazes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a random solvable maze file")
    _maze_options(p)
    p.add_argument("--out", help="maze file to write (default: stdout)")

    p = sub.add_parser("solve", help="print the A* optimal length and path of a maze file")
    p.add_argument("maze")

    p = sub.add_parser("run", help="learning curve for one agent")
    _experiment_options(p, with_agent=True)

    p = sub.add_parser("compare", help="Q-learning vs Dyna-Q vs Dyna-H on the same mazes")
    _experiment_options(p, with_agent=False)

    p = sub.add_parser("sweep", help="learning curves over several planning-step budgets")
    _experiment_options(p, with_agent=True)
    p.add_argument("--values", type=parse_int_list, help="comma-separated N values (default 1,5,10,25)")
    return parser


EXPERIMENT_KEYS = ("seed", "alpha", "gamma", "epsilon", "planning_steps", "max_episode_steps",
                   "runs", "episodes", "height", "width", "start", "goal", "sigma", "heuristic",
                   "fixed_maze", "jobs", "extra_stats", "out")


def experiment_config(opts: dict, agent: str) -> ExperimentConfig:
    fixed = load_maze(opts["fixed_maze"]) if opts["fixed_maze"] else None
    ac = AgentConfig(opts["alpha"], opts["gamma"], opts["epsilon"], opts["planning_steps"],
                     opts["max_episode_steps"])
    return ExperimentConfig(
        agent=AgentKind(agent), agent_config=ac, runs=opts["runs"], episodes=opts["episodes"],
        height=opts["height"], width=opts["width"], start=opts["start"], goal=opts["goal"],
        sigma=opts["sigma"], master_seed=opts["seed"], heuristic=opts["heuristic"],
        fixed_maze=fixed,
    )


def _echo(cfg: ExperimentConfig, opts: dict) -> dict:
    d = cfg.to_dict()
    d["fixed_maze"] = opts["fixed_maze"]
    return d


def _write_all(files: dict[Path, str]) -> None:
    for path, text in files.items():
        atomic_write_text(path, text)


def cmd_generate(args) -> int:
    opts = resolve(args, ("seed", "height", "width", "start", "goal", "sigma", "out"))
    cfg = MazeGenConfig(opts["height"], opts["width"], opts["start"], opts["goal"], opts["sigma"],
                        opts["seed"])
    text = format_maze(generate_maze(cfg))
    text += f"# seed={cfg.seed} sigma={cfg.sigma!r}\n"
    if opts["out"]:
        atomic_write_text(opts["out"], text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    grid = load_maze(args.maze)
    res = astar_shortest(grid)
    if not res.found:
        raise CliError(f"{args.maze}: goal is unreachable")
    print(res.length)
    print(" ".join(f"{p.row},{p.col}" for p in res.path))
    return 0


def cmd_run(args) -> int:
    opts = resolve(args, EXPERIMENT_KEYS + ("agent",))
    cfg = experiment_config(opts, opts["agent"])
    out = Path(opts["out"] or "results")
    result = run_experiment(cfg, opts["jobs"])
    echo = _echo(cfg, opts)
    summary = summary_dict(cfg, result)
    summary["config"] = echo
    _write_all({
        out / f"{cfg.agent.value}.csv": format_curve_csv(result.curve, echo, opts["extra_stats"]),
        out / "summary.json": dumps_json(summary),
    })
    print(f"{cfg.agent.value}: final mean steps {result.summary.final_mean_steps:.6g}"
          f" (mean optimal {result.summary.mean_optimal_length:.6g})")
    return 0


def cmd_compare(args) -> int:
    opts = resolve(args, EXPERIMENT_KEYS)
    base = experiment_config(opts, AgentKind.DYNAH.value)
    out = Path(opts["out"] or "results")
    results = compare_algorithms(base, opts["jobs"])
    files, variants = {}, {}
    for kind, result in results.items():
        cfg = base.with_agent(kind, _planning(kind, base))
        echo = _echo(cfg, opts)
        files[out / f"{kind.value}.csv"] = format_curve_csv(result.curve, echo, opts["extra_stats"])
        variants[kind.value] = summary_dict(cfg, result)
        variants[kind.value]["config"] = echo
        print(f"{kind.value}: final mean steps {result.summary.final_mean_steps:.6g}")
    files[out / "summary.json"] = dumps_json({"command": "compare", "variants": variants})
    _write_all(files)
    return 0


def _planning(kind: AgentKind, base: ExperimentConfig) -> int:
    return 0 if kind is AgentKind.QLEARNING else base.agent_config.planning_steps


def cmd_sweep(args) -> int:
    opts = resolve(args, EXPERIMENT_KEYS + ("agent", "values"))
    values = opts["values"]
    base = experiment_config(opts, opts["agent"])
    out = Path(opts["out"] or "results")
    results = sweep_planning_steps(base, values, opts["jobs"])
    files, variants = {}, {}
    for n, result in results.items():
        cfg = base.with_agent(base.agent, n)
        echo = _echo(cfg, opts)
        name = f"{cfg.agent.value}_N{n}"
        files[out / f"{name}.csv"] = format_curve_csv(result.curve, echo, opts["extra_stats"])
        variants[name] = summary_dict(cfg, result)
        variants[name]["config"] = echo
        print(f"{name}: final mean steps {result.summary.final_mean_steps:.6g}")
    files[out / "summary.json"] = dumps_json({"command": "sweep", "values": list(values),
                                              "variants": variants})
    _write_all(files)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "run": cmd_run,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (CliError, MazeError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"dynah: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
