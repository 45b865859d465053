"""Multi-run learning-curve experiments, comparisons and planning sweeps.

Every run gets its own maze and agent stream, both derived from the master
seed and the run index only. Changing the algorithm or the planning budget
therefore never changes the mazes or the agent's random numbers, so curves
from different settings are directly comparable.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from dynah.astar_oracle import astar_shortest
from dynah.gridworld import GridMap, MazeGenConfig, Position, format_maze, generate_maze
from dynah.heuristics import DEFAULT_HEURISTIC, get_heuristic
from dynah.rl_core import (
    AgentConfig,
    AgentKind,
    LearnedModel,
    QTable,
    derive_seed,
    greedy_rollout,
    make_rng,
    run_episode,
)


@dataclass(frozen=True)
class ExperimentConfig:
    agent: AgentKind = AgentKind.DYNAH
    agent_config: AgentConfig = field(default_factory=AgentConfig)
    runs: int = 30
    episodes: int = 100
    height: int = 39
    width: int = 36
    start: Position = Position(1, 4)
    goal: Position = Position(28, 34)
    sigma: float = 0.3
    master_seed: int = 0
    heuristic: str = DEFAULT_HEURISTIC
    fixed_maze: Optional[GridMap] = None

    def __post_init__(self):
        object.__setattr__(self, "agent", AgentKind(self.agent))
        object.__setattr__(self, "start", Position(*self.start))
        object.__setattr__(self, "goal", Position(*self.goal))
        if self.runs < 1 or self.episodes < 1:
            raise ValueError("runs and episodes must both be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        get_heuristic(self.heuristic)

    def maze_seed(self, run: int) -> int:
        return derive_seed(self.master_seed, "maze", run)

    def agent_seed(self, run: int) -> int:
        return derive_seed(self.master_seed, "agent", run)

    def maze_config(self, run: int) -> MazeGenConfig:
        return MazeGenConfig(self.height, self.width, self.start, self.goal, self.sigma,
                             self.maze_seed(run))

    def maze(self, run: int) -> GridMap:
        if self.fixed_maze is not None:
            return self.fixed_maze
        return generate_maze(self.maze_config(run))

    def with_agent(self, agent: AgentKind, planning_steps: Optional[int] = None) -> ExperimentConfig:
        ac = self.agent_config
        if planning_steps is not None:
            ac = dataclasses.replace(ac, planning_steps=planning_steps)
        return dataclasses.replace(self, agent=AgentKind(agent), agent_config=ac)

    def to_dict(self) -> dict:
        ac = self.agent_config
        out = {
            "agent": self.agent.value,
            "alpha": ac.alpha,
            "gamma": ac.gamma,
            "epsilon": ac.epsilon,
            "planning_steps": ac.planning_steps,
            "max_episode_steps": ac.max_episode_steps,
            "runs": self.runs,
            "episodes": self.episodes,
            "height": self.height,
            "width": self.width,
            "start": list(self.start),
            "goal": list(self.goal),
            "sigma": self.sigma,
            "seed": self.master_seed,
            "heuristic": self.heuristic,
            "fixed_maze_sha256": None,
        }
        if self.fixed_maze is not None:
            text = format_maze(self.fixed_maze).encode()
            out["fixed_maze_sha256"] = hashlib.sha256(text).hexdigest()
        return out


@dataclass(frozen=True, eq=False)
class LearningCurve:
    per_run: np.ndarray  # runs x episodes, real steps per episode
    capped: np.ndarray   # runs x episodes, True where the step cap ended the episode
    mean: np.ndarray = field(init=False)

    def __post_init__(self):
        per_run = np.asarray(self.per_run, dtype=np.int64)
        capped = np.asarray(self.capped, dtype=bool)
        if per_run.ndim != 2 or capped.shape != per_run.shape:
            raise ValueError("per_run and capped must be matching runs x episodes matrices")
        if (per_run < 1).any():
            raise ValueError("every episode takes at least one step")
        object.__setattr__(self, "per_run", per_run)
        object.__setattr__(self, "capped", capped)
        # integer sums are exact, so this is the correctly rounded average
        object.__setattr__(self, "mean", per_run.sum(axis=0) / per_run.shape[0])

    @property
    def runs(self) -> int:
        return self.per_run.shape[0]

    @property
    def episodes(self) -> int:
        return self.per_run.shape[1]

    def __eq__(self, other):
        if not isinstance(other, LearningCurve):
            return NotImplemented
        return np.array_equal(self.per_run, other.per_run) and np.array_equal(self.capped, other.capped)


@dataclass(frozen=True)
class RunRecord:
    run: int
    maze_seed: Optional[int]
    agent_seed: int
    steps: tuple[int, ...]
    capped: tuple[bool, ...]
    greedy_length: int
    greedy_capped: bool
    optimal_length: int


@dataclass(frozen=True)
class RunSummary:
    final_mean_steps: float
    records: tuple[RunRecord, ...]

    @property
    def greedy_lengths(self) -> list[int]:
        return [r.greedy_length for r in self.records]

    @property
    def optimal_lengths(self) -> list[int]:
        return [r.optimal_length for r in self.records]

    @property
    def mean_optimal_length(self) -> float:
        return sum(self.optimal_lengths) / len(self.records)


class ExperimentResult(NamedTuple):
    curve: LearningCurve
    summary: RunSummary


def run_single(cfg: ExperimentConfig, run: int) -> RunRecord:
    """Train one fresh agent on run ``run``'s maze, then roll out greedily."""
    grid = cfg.maze(run)
    optimal = astar_shortest(grid)
    ac = cfg.agent_config
    q = QTable.for_grid(grid)
    m = None if cfg.agent is AgentKind.QLEARNING else LearnedModel.for_grid(grid)
    h = get_heuristic(cfg.heuristic) if cfg.agent is AgentKind.DYNAH else None
    rng = make_rng(cfg.master_seed, "agent", run)
    steps, capped = [], []
    for _ in range(cfg.episodes):
        res = run_episode(cfg.agent, grid, q, m, h, ac, rng)
        steps.append(res.steps)
        capped.append(res.capped)
    greedy = greedy_rollout(grid, q, ac.max_episode_steps)
    return RunRecord(
        run=run,
        maze_seed=None if cfg.fixed_maze is not None else cfg.maze_seed(run),
        agent_seed=cfg.agent_seed(run),
        steps=tuple(steps),
        capped=tuple(capped),
        greedy_length=greedy.steps,
        greedy_capped=greedy.capped,
        optimal_length=optimal.length,
    )


def _map_runs(cfg: ExperimentConfig, jobs: int) -> list[RunRecord]:
    runs = range(cfg.runs)
    if jobs <= 1 or cfg.runs == 1:
        return [run_single(cfg, i) for i in runs]
    with ProcessPoolExecutor(max_workers=min(jobs, cfg.runs)) as pool:
        # map preserves submission order, so output is schedule-independent
        return list(pool.map(run_single, [cfg] * cfg.runs, runs))


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    records = _map_runs(cfg, jobs)
    curve = LearningCurve([r.steps for r in records], [r.capped for r in records])
    return ExperimentResult(curve, RunSummary(float(curve.mean[-1]), tuple(records)))


def sweep_planning_steps(cfg: ExperimentConfig, values: Sequence[int], jobs: int = 1) -> dict[int, ExperimentResult]:
    if not values:
        raise ValueError("sweep needs at least one planning-step value")
    if any(v < 0 for v in values):
        raise ValueError("planning-step values must be >= 0")
    return {n: run_experiment(cfg.with_agent(cfg.agent, n), jobs) for n in values}


def compare_algorithms(cfg: ExperimentConfig, jobs: int = 1) -> dict[AgentKind, ExperimentResult]:
    n = cfg.agent_config.planning_steps
    return {
        AgentKind.QLEARNING: run_experiment(cfg.with_agent(AgentKind.QLEARNING, 0), jobs),
        AgentKind.DYNAQ: run_experiment(cfg.with_agent(AgentKind.DYNAQ, n), jobs),
        AgentKind.DYNAH: run_experiment(cfg.with_agent(AgentKind.DYNAH, n), jobs),
    }


# -- persistence ------------------------------------------------------------

def _num(x) -> str:
    return format(float(x), ".17g")


def format_curve_csv(curve: LearningCurve, config: Optional[dict] = None, extra_stats: bool = False) -> str:
    """Plot-ready CSV, one row per episode.

    The first line is a ``#`` comment holding the resolved configuration.
    ``extra_stats`` appends median and sample-std columns after the runs.
    """
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True))
    header = ["episode", "mean"] + [f"run_{i}" for i in range(curve.runs)]
    if extra_stats:
        header += ["median", "std"]
    lines.append(",".join(header))
    medians = np.median(curve.per_run, axis=0)
    stds = curve.per_run.std(axis=0, ddof=1) if curve.runs > 1 else np.zeros(curve.episodes)
    for e in range(curve.episodes):
        row = [str(e + 1), _num(curve.mean[e])] + [_num(v) for v in curve.per_run[:, e]]
        if extra_stats:
            row += [_num(medians[e]), _num(stds[e])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def summary_dict(cfg: ExperimentConfig, result: ExperimentResult) -> dict:
    s = result.summary
    return {
        "config": cfg.to_dict(),
        "final_mean_steps": s.final_mean_steps,
        "mean_optimal_length": s.mean_optimal_length,
        "capped_episodes_total": int(result.curve.capped.sum()),
        "runs": [
            {
                "run": r.run,
                "maze_seed": r.maze_seed,
                "agent_seed": r.agent_seed,
                "optimal_length": r.optimal_length,
                "greedy_length": r.greedy_length,
                "greedy_capped": r.greedy_capped,
                "capped_episodes": sum(r.capped),
            }
            for r in s.records
        ],
    }


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
