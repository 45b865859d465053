"""Badness scores for Dyna-H planning and worst-action selection.

A heuristic is any callable ``h(state, move, model, goal) -> float | None``
returning a non-negative badness for taking ``move`` at ``state``, or ``None``
when the model has never seen that pair. Scores are computed from the
learned model's predicted successor only; the true grid is never consulted.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Callable, Optional

from dynah.gridworld import MOVES, Move, Position

if TYPE_CHECKING:
    import random

    from dynah.rl_core import LearnedModel

Heuristic = Callable[[Position, Move, "LearnedModel", Position], Optional[float]]


def squared_euclidean_badness(s: Position, a: Move, m: LearnedModel, goal: Position) -> Optional[float]:
    """Squared distance from the model-predicted successor to the goal.

    Kept squared: argmax is unchanged and the arithmetic stays exact on grids.
    """
    hit = m.query(s, a)
    if hit is None:
        return None
    nxt = hit[0]
    dr = nxt[0] - goal[0]
    dc = nxt[1] - goal[1]
    return float(dr * dr + dc * dc)


def manhattan_badness(s: Position, a: Move, m: LearnedModel, goal: Position) -> Optional[float]:
    hit = m.query(s, a)
    if hit is None:
        return None
    nxt = hit[0]
    return float(abs(nxt[0] - goal[0]) + abs(nxt[1] - goal[1]))


HEURISTICS: dict[str, Heuristic] = {
    "euclidean-squared": squared_euclidean_badness,
    "manhattan": manhattan_badness,
}
DEFAULT_HEURISTIC = "euclidean-squared"


def register_heuristic(name: str, h: Heuristic) -> None:
    if name in HEURISTICS:
        raise ValueError(f"heuristic {name!r} is already registered")
    HEURISTICS[name] = h


def get_heuristic(name: str) -> Heuristic:
    try:
        return HEURISTICS[name]
    except KeyError:
        known = ", ".join(sorted(HEURISTICS))
        raise ValueError(f"unknown heuristic {name!r} (known: {known})") from None


def heuristic_action(
    s: Position, h: Heuristic, m: LearnedModel, goal: Position, rng: random.Random
) -> Optional[Move]:
    """The worst modeled move at ``s``: the one with the highest badness.

    Returns ``None`` when no move at ``s`` is modeled. Ties are broken
    uniformly with ``rng``; no draw is made when the maximizer is unique.
    """
    best: list[Move] = []
    best_score = 0.0
    for a in MOVES:
        score = h(s, a, m, goal)
        if score is None:
            continue
        if not best or score > best_score:
            best = [a]
            best_score = score
        elif score == best_score:
            best.append(a)
    if not best:
        return None
    if len(best) == 1:
        return best[0]
    return best[int(rng.random() * len(best))]
