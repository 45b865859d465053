import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynah.gridworld import MOVES, Move, Position
from dynah.heuristics import (
    get_heuristic,
    heuristic_action,
    manhattan_badness,
    register_heuristic,
    squared_euclidean_badness,
)
from dynah.rl_core import LearnedModel, model_record

GOAL = Position(28, 34)
S = Position(27, 33)


def test_badness_zero_at_goal():
    m = LearnedModel(36)
    model_record(m, S, Move.RIGHT, GOAL, 0.0)
    assert squared_euclidean_badness(S, Move.RIGHT, m, GOAL) == 0.0


def test_badness_unit_offset():
    m = LearnedModel(36)
    model_record(m, Position(26, 34), Move.DOWN, Position(27, 34), -1.0)
    assert squared_euclidean_badness(Position(26, 34), Move.DOWN, m, GOAL) == 1.0


def test_badness_absent_when_unmodeled():
    m = LearnedModel(36)
    assert squared_euclidean_badness(S, Move.UP, m, GOAL) is None
    assert manhattan_badness(S, Move.UP, m, GOAL) is None


def test_badness_keeps_the_square():
    m = LearnedModel(36)
    model_record(m, S, Move.UP, Position(25, 30), -1.0)
    assert squared_euclidean_badness(S, Move.UP, m, GOAL) == 3**2 + 4**2
    assert manhattan_badness(S, Move.UP, m, GOAL) == 7


class Fixed:
    """Heuristic with hand-set scores per move (None = unmodeled)."""

    def __init__(self, scores):
        self.scores = scores

    def __call__(self, s, a, m, goal):
        return self.scores.get(a)


def test_two_value_argmax():
    h = Fixed({Move.UP: 25.0, Move.DOWN: 9.0})
    assert heuristic_action(S, h, None, GOAL, random.Random(0)) == Move.UP


def test_no_modeled_moves():
    assert heuristic_action(S, Fixed({}), None, GOAL, random.Random(0)) is None
    m = LearnedModel(36)
    assert heuristic_action(S, squared_euclidean_badness, m, GOAL, random.Random(0)) is None


def test_tie_break_uniform():
    h = Fixed({a: 4.0 for a in MOVES})
    rng = random.Random(2024)
    n = 10**5
    counts = Counter(heuristic_action(S, h, None, GOAL, rng) for _ in range(n))
    for a in MOVES:
        assert abs(counts[a] / n - 0.25) <= 0.02


score_maps = st.dictionaries(st.sampled_from(MOVES), st.integers(0, 50).map(float), min_size=1)


@settings(max_examples=300, deadline=None)
@given(score_maps, st.integers(0, 2**32))
def test_selected_move_attains_the_max(scores, seed):
    a = heuristic_action(S, Fixed(scores), None, GOAL, random.Random(seed))
    assert scores[a] == max(scores.values())


@settings(max_examples=300, deadline=None)
@given(score_maps, st.integers(0, 2**32), st.floats(0.01, 100), st.floats(-10, 10))
def test_argmax_invariant_under_increasing_maps(scores, seed, scale, shift):
    transforms = [
        lambda v: scale * v + shift,
        lambda v: v ** 3,
        lambda v: (v + 1.0) ** 0.5,
    ]
    base = heuristic_action(S, Fixed(scores), None, GOAL, random.Random(seed))
    for f in transforms:
        mapped = {a: f(v) for a, v in scores.items()}
        # keep ties exactly tied and distinct values distinct
        if len(set(mapped.values())) != len(set(scores.values())):
            continue
        assert heuristic_action(S, Fixed(mapped), None, GOAL, random.Random(seed)) == base


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(MOVES), st.integers(0, 38), st.integers(0, 35)), max_size=8))
def test_euclidean_choice_is_farthest_successor(entries):
    m = LearnedModel(36)
    for a, r, c in entries:
        model_record(m, S, a, Position(r, c), -1.0)
    a = heuristic_action(S, squared_euclidean_badness, m, GOAL, random.Random(0))
    if not entries:
        assert a is None
        return
    dist = {b: squared_euclidean_badness(S, b, m, GOAL) for b in m.modeled_moves(S)}
    assert a in dist
    assert not any(v > dist[a] for v in dist.values())


def test_registry():
    assert get_heuristic("euclidean-squared") is squared_euclidean_badness
    assert get_heuristic("manhattan") is manhattan_badness
    with pytest.raises(ValueError, match="unknown heuristic"):
        get_heuristic("chebyshev")
    with pytest.raises(ValueError):
        register_heuristic("manhattan", manhattan_badness)
