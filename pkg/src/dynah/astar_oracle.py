"""A* shortest paths on the true grid, used only to check learned policies."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from dynah.gridworld import GridMap, Position


@dataclass(frozen=True)
class PathResult:
    found: bool
    length: int = 0
    path: tuple[Position, ...] = field(default_factory=tuple)


def euclidean(p: Position, goal: Position) -> float:
    # Never exceeds the 4-connected remaining distance, so A* stays optimal.
    return math.hypot(p[0] - goal[0], p[1] - goal[1])


def astar_shortest(grid: GridMap) -> PathResult:
    """Optimal 4-connected start->goal path.

    Open-list ties on f go to the larger g. A node popped earlier can be
    reopened if a cheaper route to it turns up later.
    """
    start, goal = grid.start, grid.goal
    g = {start: 0}
    parent: dict[Position, Position] = {}
    counter = 0
    # (f, -g, insertion counter, node)
    open_heap = [(euclidean(start, goal), 0, counter, start)]
    while open_heap:
        f, neg_g, _, node = heapq.heappop(open_heap)
        if -neg_g > g[node]:
            continue  # stale entry
        if node == goal:
            path = [node]
            while path[-1] != start:
                path.append(parent[path[-1]])
            path.reverse()
            return PathResult(True, len(path) - 1, tuple(path))
        cost = g[node] + 1
        for nb in grid.free_neighbors(node):
            if cost < g.get(nb, math.inf):
                g[nb] = cost
                parent[nb] = node
                counter += 1
                heapq.heappush(open_heap, (cost + euclidean(nb, goal), -cost, counter, nb))
    return PathResult(False)
