import numpy as np
import pytest

from dynah.gridworld import GridMap, Position

# Filled by test_acceptance; printed once at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_grid(rows, start=None, goal=None):
    """Grid from strings of '.', '#', 'S', 'G'."""
    mask = np.array([[ch == "#" for ch in row] for row in rows])
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == "S" and start is None:
                start = (r, c)
            if ch == "G" and goal is None:
                goal = (r, c)
    return GridMap(len(rows), len(rows[0]), mask, Position(*start), Position(*goal))


@pytest.fixture
def open_grid():
    return GridMap(10, 10, np.zeros((10, 10), bool), Position(0, 0), Position(9, 9))


@pytest.fixture
def corridor():
    return make_grid(["S..G"])


@pytest.fixture
def walled():
    return make_grid([
        "S...",
        "####",
        "...G",
    ])


@pytest.fixture
def dyna_maze():
    # The classic 6x9 Dyna maze.
    return make_grid([
        ".......#G",
        "..#....#.",
        "S.#....#.",
        "..#......",
        ".....#...",
        ".........",
    ])
