"""Tabular Q-learning with Dyna-Q and Dyna-H planning.

Tables are keyed by flat indices internally (``cell * 4 + move``) so the
episode loop stays cheap; the public functions take ``Position``/``Move``.

Randomness is consumed in a fixed order within each real step: the
exploration draw, then any greedy tie-break draw, then planning draws.
Q-learning and Dyna-Q with zero planning steps therefore consume the
stream identically.
"""
from __future__ import annotations

import enum
import hashlib
import math
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from dynah.gridworld import MOVES, GridMap, Move, Position
from dynah.heuristics import Heuristic, heuristic_action, squared_euclidean_badness

N_MOVES = len(MOVES)

RngStream = random.Random


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from an arbitrary tuple of ints and strings."""
    text = "\x1f".join(f"{type(p).__name__}:{p}" for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(*parts) -> RngStream:
    return random.Random(derive_seed(*parts))


def _randbelow(rng: RngStream, n: int) -> int:
    return int(rng.random() * n)


class AgentKind(str, enum.Enum):
    QLEARNING = "qlearning"
    DYNAQ = "dynaq"
    DYNAH = "dynah"


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.1
    gamma: float = 0.95
    epsilon: float = 0.1
    planning_steps: int = 10
    max_episode_steps: int = 10_000

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.planning_steps < 0:
            raise ValueError(f"planning_steps must be >= 0, got {self.planning_steps}")
        if self.max_episode_steps < 1:
            raise ValueError(f"max_episode_steps must be >= 1, got {self.max_episode_steps}")


class QTable:
    """Action values for every (cell, move) of one grid, all starting at 0."""

    def __init__(self, height: int, width: int):
        self.height = height
        self.width = width
        self.values = [0.0] * (height * width * N_MOVES)

    @classmethod
    def for_grid(cls, grid: GridMap) -> QTable:
        return cls(grid.height, grid.width)

    def _cell(self, s) -> int:
        r, c = s
        if not (0 <= r < self.height and 0 <= c < self.width):
            raise IndexError(f"state {tuple(s)} outside {self.height}x{self.width} table")
        return r * self.width + c

    def __getitem__(self, key) -> float:
        s, a = key
        return self.values[self._cell(s) * N_MOVES + int(a)]

    def __setitem__(self, key, value: float) -> None:
        s, a = key
        if not math.isfinite(value):
            raise ValueError("Q-values must be finite")
        self.values[self._cell(s) * N_MOVES + int(a)] = float(value)

    def action_values(self, s) -> list[float]:
        base = self._cell(s) * N_MOVES
        return self.values[base:base + N_MOVES]

    def max_value(self, s) -> float:
        return max(self.action_values(s))

    def copy(self) -> QTable:
        out = QTable(self.height, self.width)
        out.values = list(self.values)
        return out

    def __eq__(self, other):
        if not isinstance(other, QTable):
            return NotImplemented
        return (self.height, self.width, self.values) == (other.height, other.width, other.values)

    def dump(self) -> str:
        """One ``row col move value`` line per nonzero entry, sorted."""
        lines = []
        for key, v in enumerate(self.values):
            if v != 0.0:
                cell, a = divmod(key, N_MOVES)
                r, c = divmod(cell, self.width)
                lines.append((r, c, Move(a).name, v))
        lines.sort()
        return "".join(f"{r} {c} {name} {v:.16e}\n" for r, c, name, v in lines)


class LearnedModel:
    """Deterministic memory of experienced transitions.

    Re-recording a pair overwrites it. Observed keys are kept in first-seen
    order for uniform sampling.
    """

    def __init__(self, width: int):
        self.width = width
        self.entries: dict[int, tuple[int, float]] = {}
        self.keys: list[int] = []

    @classmethod
    def for_grid(cls, grid: GridMap) -> LearnedModel:
        return cls(grid.width)

    def _key(self, s, a) -> int:
        return (s[0] * self.width + s[1]) * N_MOVES + int(a)

    def _position(self, cell: int) -> Position:
        return Position(*divmod(cell, self.width))

    def _record(self, key: int, next_cell: int, r: float) -> None:
        if key not in self.entries:
            self.keys.append(key)
        self.entries[key] = (next_cell, r)

    def record(self, s: Position, a: Move, s_next: Position, r: float) -> None:
        self._record(self._key(s, a), s_next[0] * self.width + s_next[1], float(r))

    def query(self, s: Position, a: Move) -> Optional[tuple[Position, float]]:
        hit = self.entries.get(self._key(s, a))
        if hit is None:
            return None
        return self._position(hit[0]), hit[1]

    def sample(self, rng: RngStream) -> tuple[Position, Move]:
        if not self.keys:
            raise ValueError("cannot sample from an empty model")
        key = self.keys[_randbelow(rng, len(self.keys))]
        cell, a = divmod(key, N_MOVES)
        return self._position(cell), Move(a)

    def modeled_moves(self, s: Position) -> list[Move]:
        base = (s[0] * self.width + s[1]) * N_MOVES
        return [m for m in MOVES if base + m in self.entries]

    def transitions(self):
        """Yield every stored ``(s, a, s_next, r)`` in first-seen order."""
        for key in self.keys:
            cell, a = divmod(key, N_MOVES)
            nxt, r = self.entries[key]
            yield self._position(cell), Move(a), self._position(nxt), r

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key) -> bool:
        s, a = key
        return self._key(s, a) in self.entries


def model_record(m: LearnedModel, s: Position, a: Move, s_next: Position, r: float) -> LearnedModel:
    m.record(s, a, s_next, r)
    return m


def model_query(m: LearnedModel, s: Position, a: Move) -> Optional[tuple[Position, float]]:
    return m.query(s, a)


def sample_observed(m: LearnedModel, rng: RngStream) -> tuple[Position, Move]:
    return m.sample(rng)


# -- value updates and action selection -------------------------------------

def _pick(values: Sequence[float], epsilon: float, rng: RngStream) -> int:
    # Exploration draw always happens, even at epsilon 0, so the stream
    # position does not depend on epsilon.
    n = len(values)
    if rng.random() < epsilon:
        return _randbelow(rng, n)
    best = max(values)
    ties = [i for i in range(n) if values[i] == best]
    if len(ties) == 1:
        return ties[0]
    return ties[_randbelow(rng, len(ties))]


def epsilon_greedy(q: QTable, s: Position, legal: Sequence[Move], epsilon: float, rng: RngStream) -> Move:
    if not legal:
        raise ValueError("epsilon_greedy needs at least one legal move")
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    return legal[_pick([q[s, a] for a in legal], epsilon, rng)]


def _td(values: list[float], key: int, r: float, next_base: int, terminal: bool,
        alpha: float, gamma: float) -> None:
    if terminal:
        bootstrap = 0.0
    else:
        bootstrap = max(values[next_base:next_base + N_MOVES])
    old = values[key]
    values[key] = old + alpha * (r + gamma * bootstrap - old)


def td_update(q: QTable, s: Position, a: Move, r: float, s_next: Position, terminal: bool,
              alpha: float, gamma: float) -> QTable:
    """One-step Q-learning backup of ``Q(s, a)``; mutates ``q`` and returns it."""
    if not math.isfinite(r):
        raise ValueError(f"reward must be finite, got {r}")
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    key = q._cell(s) * N_MOVES + int(a)
    _td(q.values, key, float(r), q._cell(s_next) * N_MOVES, terminal, alpha, gamma)
    return q


# -- planning ---------------------------------------------------------------

def _goal_cell(m: LearnedModel, goal) -> int:
    return -1 if goal is None else goal[0] * m.width + goal[1]


def dyna_q_plan(q: QTable, m: LearnedModel, cfg: AgentConfig, rng: RngStream,
                goal: Optional[Position] = None) -> QTable:
    """Replay ``cfg.planning_steps`` uniformly sampled remembered transitions.

    Transitions into ``goal`` (when given) back up with no bootstrap term.
    """
    keys = m.keys
    if not keys:
        return q
    values, entries = q.values, m.entries
    alpha, gamma = cfg.alpha, cfg.gamma
    goal_cell = _goal_cell(m, goal)
    for _ in range(cfg.planning_steps):
        key = keys[_randbelow(rng, len(keys))]
        nxt, r = entries[key]
        _td(values, key, r, nxt * N_MOVES, nxt == goal_cell, alpha, gamma)
    return q


def _worst_move_sq_euclid(entries, base: int, width: int, gr: int, gc: int, rng: RngStream) -> int:
    # Integer-only equivalent of heuristic_action with squared_euclidean_badness:
    # same move order, same tie set, same single tie-break draw.
    best = []
    best_score = -1
    for a in range(N_MOVES):
        hit = entries.get(base + a)
        if hit is None:
            continue
        r, c = divmod(hit[0], width)
        score = (r - gr) * (r - gr) + (c - gc) * (c - gc)
        if score > best_score:
            best = [a]
            best_score = score
        elif score == best_score:
            best.append(a)
    if not best:
        return -1
    if len(best) == 1:
        return best[0]
    return best[_randbelow(rng, len(best))]


def dyna_h_plan(q: QTable, m: LearnedModel, h: Heuristic, s_start: Position, goal: Position,
                cfg: AgentConfig, rng: RngStream) -> QTable:
    """Simulate the worst remembered trajectory from ``s_start``.

    A cursor follows, at each step, the modeled move with the highest
    badness. When the cursor sits on a state with nothing modeled it jumps
    to a uniformly sampled remembered pair instead.
    """
    keys = m.keys
    if not keys:
        return q
    values, entries = q.values, m.entries
    alpha, gamma = cfg.alpha, cfg.gamma
    width = m.width
    goal_cell = _goal_cell(m, goal)
    cursor = s_start[0] * width + s_start[1]
    fast = h is squared_euclidean_badness
    for _ in range(cfg.planning_steps):
        base = cursor * N_MOVES
        if fast:
            a = _worst_move_sq_euclid(entries, base, width, goal[0], goal[1], rng)
        else:
            found = heuristic_action(Position(*divmod(cursor, width)), h, m, goal, rng)
            a = -1 if found is None else int(found)
        if a < 0:
            key = keys[_randbelow(rng, len(keys))]
        else:
            key = base + a
        nxt, r = entries[key]
        _td(values, key, r, nxt * N_MOVES, nxt == goal_cell, alpha, gamma)
        cursor = nxt
    return q


# -- episodes ---------------------------------------------------------------

class EpisodeResult(NamedTuple):
    steps: int
    capped: bool


def run_episode(kind: AgentKind, grid: GridMap, q: QTable, m: Optional[LearnedModel],
                h: Optional[Heuristic], cfg: AgentConfig, rng: RngStream) -> EpisodeResult:
    """Run one episode from ``grid.start``, learning in place.

    Each real step: epsilon-greedy move, environment step, TD backup, model
    update, then planning seeded at the state the move was taken from.
    Q-learning keeps no model and ``m`` may be ``None``.
    """
    kind = AgentKind(kind)
    if kind is AgentKind.DYNAH and h is None:
        raise ValueError("Dyna-H needs a heuristic")
    if kind is not AgentKind.QLEARNING and m is None:
        raise ValueError(f"{kind.value} needs a LearnedModel")
    if (q.height, q.width) != (grid.height, grid.width):
        raise ValueError("Q-table does not match the grid")
    succ = grid.successors
    positions = grid.positions
    values = q.values
    goal = grid.goal
    goal_cell = grid.index(goal)
    alpha, gamma, eps = cfg.alpha, cfg.gamma, cfg.epsilon
    planning = kind is not AgentKind.QLEARNING and cfg.planning_steps > 0
    learn_model = kind is not AgentKind.QLEARNING

    s = grid.index(grid.start)
    steps = 0
    while steps < cfg.max_episode_steps:
        base = s * N_MOVES
        a = _pick(values[base:base + N_MOVES], eps, rng)
        nxt = succ[s][a]
        terminal = nxt == goal_cell
        r = 0.0 if terminal else -1.0
        steps += 1
        _td(values, base + a, r, nxt * N_MOVES, terminal, alpha, gamma)
        if learn_model:
            m._record(base + a, nxt, r)
            if planning:
                if kind is AgentKind.DYNAQ:
                    dyna_q_plan(q, m, cfg, rng, goal)
                else:
                    dyna_h_plan(q, m, h, positions[s], goal, cfg, rng)
        if terminal:
            return EpisodeResult(steps, False)
        s = nxt
    return EpisodeResult(steps, True)


def greedy_rollout(grid: GridMap, q: QTable, max_steps: int) -> EpisodeResult:
    """Follow argmax Q (first maximizer in move order) from the start.

    Revisiting a cell means the deterministic policy loops forever; that is
    reported like a cap hit, as ``(max_steps, True)``.
    """
    succ = grid.successors
    values = q.values
    goal_cell = grid.index(grid.goal)
    s = grid.index(grid.start)
    seen = {s}
    for steps in range(1, max_steps + 1):
        row = values[s * N_MOVES:(s + 1) * N_MOVES]
        s = succ[s][row.index(max(row))]
        if s == goal_cell:
            return EpisodeResult(steps, False)
        if s in seen:
            break
        seen.add(s)
    return EpisodeResult(max_steps, True)
