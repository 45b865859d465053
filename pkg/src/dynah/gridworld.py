"""Deterministic four-move maze environment.

Cells are addressed by ``Position(row, col)``, 0-based. Moving into a wall or
off the board leaves the agent where it is. Every transition costs -1 except
the one entering the goal, which pays 0 and ends the episode.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

STEP_REWARD = -1.0
GOAL_REWARD = 0.0
MAX_REGEN_ATTEMPTS = 1000


class Position(NamedTuple):
    row: int
    col: int


class Move(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


MOVES = tuple(Move)
DELTAS = {Move.UP: (-1, 0), Move.DOWN: (1, 0), Move.LEFT: (0, -1), Move.RIGHT: (0, 1)}


class StepOutcome(NamedTuple):
    next: Position
    reward: float
    terminal: bool


class MazeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GridMap:
    height: int
    width: int
    obstacles: np.ndarray
    start: Position
    goal: Position

    def __post_init__(self):
        mask = np.array(self.obstacles, dtype=bool)
        if mask.shape != (self.height, self.width):
            raise MazeError(
                f"obstacle mask has shape {mask.shape}, expected {(self.height, self.width)}"
            )
        mask.flags.writeable = False
        object.__setattr__(self, "obstacles", mask)
        object.__setattr__(self, "start", Position(*self.start))
        object.__setattr__(self, "goal", Position(*self.goal))
        for name in ("start", "goal"):
            p = getattr(self, name)
            if not self.in_bounds(p):
                raise MazeError(f"{name} {tuple(p)} is out of bounds")
            if mask[p]:
                raise MazeError(f"{name} {tuple(p)} is an obstacle")
        if self.start == self.goal:
            raise MazeError("start and goal coincide")

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.height == other.height
            and self.width == other.width
            and self.start == other.start
            and self.goal == other.goal
            and np.array_equal(self.obstacles, other.obstacles)
        )

    def __hash__(self):
        return hash((self.height, self.width, self.start, self.goal, self.obstacles.tobytes()))

    @property
    def n_cells(self) -> int:
        return self.height * self.width

    def in_bounds(self, p) -> bool:
        return 0 <= p[0] < self.height and 0 <= p[1] < self.width

    def is_free(self, p) -> bool:
        return self.in_bounds(p) and not self.obstacles[p[0], p[1]]

    def index(self, p) -> int:
        return p[0] * self.width + p[1]

    @cached_property
    def positions(self) -> tuple[Position, ...]:
        """Cell index -> Position lookup."""
        return tuple(Position(r, c) for r in range(self.height) for c in range(self.width))

    @cached_property
    def successors(self) -> tuple[tuple[int, int, int, int], ...]:
        # Flat transition table: successors[cell][move] -> next cell index.
        # Obstacle cells map to themselves; they are never occupied.
        table = []
        for r in range(self.height):
            for c in range(self.width):
                here = r * self.width + c
                row = []
                for m in MOVES:
                    dr, dc = DELTAS[m]
                    nr, nc = r + dr, c + dc
                    if self.is_free((nr, nc)):
                        row.append(nr * self.width + nc)
                    else:
                        row.append(here)
                table.append(tuple(row))
        return tuple(table)

    def free_neighbors(self, p: Position) -> list[Position]:
        out = []
        for m in MOVES:
            dr, dc = DELTAS[m]
            q = Position(p[0] + dr, p[1] + dc)
            if self.is_free(q):
                out.append(q)
        return out


def step(grid: GridMap, at: Position, move: Move) -> StepOutcome:
    at = Position(*at)
    if not grid.in_bounds(at):
        raise MazeError(f"position {tuple(at)} is out of bounds")
    if grid.obstacles[at]:
        raise MazeError(f"position {tuple(at)} is an obstacle")
    if at == grid.goal:
        raise MazeError("cannot step from the goal cell")
    dr, dc = DELTAS[Move(move)]
    target = Position(at.row + dr, at.col + dc)
    nxt = target if grid.is_free(target) else at
    if nxt == grid.goal:
        return StepOutcome(nxt, GOAL_REWARD, True)
    return StepOutcome(nxt, STEP_REWARD, False)


@dataclass(frozen=True)
class MazeGenConfig:
    height: int = 39
    width: int = 36
    start: Position = Position(1, 4)
    goal: Position = Position(28, 34)
    sigma: float = 0.3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "start", Position(*self.start))
        object.__setattr__(self, "goal", Position(*self.goal))
        if self.height < 2 or self.width < 2:
            raise MazeError("maze dimensions must be at least 2x2")
        if not self.sigma > 0:
            raise MazeError("sigma must be positive")
        if not 0 <= self.seed < 2**64:
            raise MazeError("seed must be a 64-bit unsigned integer")
        for name in ("start", "goal"):
            p = getattr(self, name)
            if not (0 <= p.row < self.height and 0 <= p.col < self.width):
                raise MazeError(f"{name} {tuple(p)} is out of bounds")
        if self.start == self.goal:
            raise MazeError("start and goal coincide")


def draw_obstacles(cfg: MazeGenConfig, attempt: int = 0) -> np.ndarray:
    """Raw tile draw for one generation attempt, before start/goal are cleared.

    Each tile gets x ~ Normal(0, sigma^2) and is a wall iff |round(x)| >= 1,
    with round-half-away-from-zero so the cutoff is exactly |x| >= 0.5.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, attempt])))
    x = rng.normal(0.0, cfg.sigma, size=(cfg.height, cfg.width))
    return np.abs(x) >= 0.5


def generate_maze(cfg: MazeGenConfig, max_attempts: int = MAX_REGEN_ATTEMPTS) -> GridMap:
    for attempt in range(max_attempts):
        mask = draw_obstacles(cfg, attempt)
        mask[cfg.start] = False
        mask[cfg.goal] = False
        grid = GridMap(cfg.height, cfg.width, mask, cfg.start, cfg.goal)
        if is_solvable(grid):
            return grid
    raise MazeError(f"no solvable maze after {max_attempts} attempts (sigma={cfg.sigma})")


def bfs_distances(grid: GridMap, source: Position) -> dict[Position, int]:
    """Shortest move counts from ``source`` to every reachable free cell."""
    source = Position(*source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        p = queue.popleft()
        for q in grid.free_neighbors(p):
            if q not in dist:
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist


def is_solvable(grid: GridMap) -> bool:
    return grid.goal in bfs_distances(grid, grid.start)


# -- maze text files ---------------------------------------------------------

def format_maze(grid: GridMap) -> str:
    lines = [
        f"{grid.height} {grid.width}",
        f"{grid.start.row} {grid.start.col} {grid.goal.row} {grid.goal.col}",
    ]
    for r in range(grid.height):
        row = []
        for c in range(grid.width):
            if (r, c) == grid.start:
                row.append("S")
            elif (r, c) == grid.goal:
                row.append("G")
            else:
                row.append("#" if grid.obstacles[r, c] else ".")
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def parse_maze(text: str) -> GridMap:
    """Inverse of :func:`format_maze`. Lines starting with ``#`` after the grid are ignored."""
    lines = text.splitlines()
    try:
        height, width = (int(v) for v in lines[0].split())
        sr, sc, gr, gc = (int(v) for v in lines[1].split())
    except (IndexError, ValueError) as exc:
        raise MazeError(f"malformed maze header: {exc}") from None
    rows = lines[2:2 + height]
    if len(rows) != height:
        raise MazeError(f"expected {height} grid rows, found {len(rows)}")
    for extra in lines[2 + height:]:
        if extra.strip() and not extra.startswith("#"):
            raise MazeError(f"unexpected trailing line {extra!r}")
    mask = np.zeros((height, width), dtype=bool)
    for r, line in enumerate(rows):
        if len(line) != width:
            raise MazeError(f"row {r} has {len(line)} cells, expected {width}")
        for c, ch in enumerate(line):
            if ch == "#":
                mask[r, c] = True
            elif ch == "S" and (r, c) != (sr, sc):
                raise MazeError(f"'S' at {(r, c)} disagrees with header start {(sr, sc)}")
            elif ch == "G" and (r, c) != (gr, gc):
                raise MazeError(f"'G' at {(r, c)} disagrees with header goal {(gr, gc)}")
            elif ch not in ".SG#":
                raise MazeError(f"unknown tile {ch!r} at {(r, c)}")
    if not (0 <= sr < height and 0 <= sc < width and rows[sr][sc] == "S"):
        raise MazeError("start cell is not marked 'S'")
    if not (0 <= gr < height and 0 <= gc < width and rows[gr][gc] == "G"):
        raise MazeError("goal cell is not marked 'G'")
    return GridMap(height, width, mask, Position(sr, sc), Position(gr, gc))


def load_maze(path) -> GridMap:
    return parse_maze(Path(path).read_text())
