"""Shortest wall-avoiding grid distances (4-connected, unit steps).

Only wall-category objects are obstacles. Portals and objects that block
through collision rules are deliberately ignored.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from rtmcts.engine import TID, X, Y, GameState

UNREACHABLE = None

_STEPS = ((0, -1), (0, 1), (-1, 0), (1, 0))


@dataclass(frozen=True)
class ObstacleGrid:
    width: int
    height: int
    blocked: frozenset  # cells occupied by walls

    @classmethod
    def from_state(cls, state: GameState) -> ObstacleGrid:
        return cls(state.width, state.height, state.walls)

    def inside(self, cell: tuple[int, int]) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height


def astar(grid: ObstacleGrid, start: tuple[int, int], goals: Iterable[tuple[int, int]]) -> int | None:
    """A* towards the nearest of several goals; heuristic = min Manhattan distance.

    Returns the number of steps, or ``None`` when no goal is reachable.
    """
    if not grid.inside(start):
        raise ValueError(f"cell {start} is outside the {grid.width}x{grid.height} grid")
    goals = {g for g in goals if grid.inside(g) and g not in grid.blocked}
    if not goals:
        return UNREACHABLE
    if start in goals:
        return 0
    goal_list = list(goals)

    def h(c):
        return min(abs(c[0] - g[0]) + abs(c[1] - g[1]) for g in goal_list)

    g_cost = {start: 0}
    frontier = [(h(start), 0, start)]
    blocked = grid.blocked
    w, hgt = grid.width, grid.height
    while frontier:
        f, g, cell = heapq.heappop(frontier)
        if g > g_cost.get(cell, g):
            continue
        if cell in goals:
            return g
        x, y = cell
        for dx, dy in _STEPS:
            nx, ny = x + dx, y + dy
            if nx < 0 or ny < 0 or nx >= w or ny >= hgt:
                continue
            nxt = (nx, ny)
            if nxt in blocked:
                continue
            ng = g + 1
            if ng < g_cost.get(nxt, ng + 1):
                g_cost[nxt] = ng
                heapq.heappush(frontier, (ng + h(nxt), ng, nxt))
    return UNREACHABLE


def bfs_distance(grid: ObstacleGrid, start: tuple[int, int], goals: Iterable[tuple[int, int]]) -> int | None:
    """Plain breadth-first distance; the reference the A* search is checked against."""
    if not grid.inside(start):
        raise ValueError(f"cell {start} is outside the {grid.width}x{grid.height} grid")
    goals = set(goals)
    dist = flood(grid, start)
    best = [dist[g] for g in goals if g in dist]
    return min(best) if best else UNREACHABLE


def flood(grid: ObstacleGrid, start: tuple[int, int]) -> dict[tuple[int, int], int]:
    """Distances from ``start`` to every reachable cell."""
    dist = {start: 0}
    queue = deque([start])
    blocked = grid.blocked
    w, h = grid.width, grid.height
    while queue:
        cell = queue.popleft()
        d = dist[cell] + 1
        x, y = cell
        for dx, dy in _STEPS:
            nx, ny = x + dx, y + dy
            if nx < 0 or ny < 0 or nx >= w or ny >= h:
                continue
            nxt = (nx, ny)
            if nxt in blocked or nxt in dist:
                continue
            dist[nxt] = d
            queue.append(nxt)
    return dist


def _cells_of(state: GameState, type_id: int) -> list[tuple[int, int]]:
    if state.avatar is not None and type_id == state.spec.avatar_type:
        return [state.avatar]
    return [(o[X], o[Y]) for o in state.objects if o[TID] == type_id]


def distance_to_nearest(state: GameState, start: tuple[int, int], type_id: int) -> int | None:
    """Steps from ``start`` to the closest alive object of ``type_id``; ``None`` if unreachable."""
    grid = ObstacleGrid.from_state(state)
    return astar(grid, start, _cells_of(state, type_id))


def distances_by_type(state: GameState, start: tuple[int, int], type_ids: Iterable[int]) -> dict[int, int | None]:
    """Nearest-object distance for several types from one flood fill.

    Gives the same numbers as ``distance_to_nearest`` per type; used when many
    types are needed for the same state.
    """
    type_ids = list(type_ids)
    out: dict[int, int | None] = {t: UNREACHABLE for t in type_ids}
    if not type_ids:
        return out
    wanted = set(type_ids)
    grid = ObstacleGrid.from_state(state)
    if not grid.inside(start):
        raise ValueError(f"cell {start} is outside the {grid.width}x{grid.height} grid")
    dist = flood(grid, start)
    for o in state.objects:
        t = o[TID]
        if t in wanted:
            d = dist.get((o[X], o[Y]))
            if d is not None:
                cur = out[t]
                if cur is None or d < cur:
                    out[t] = d
    return out
