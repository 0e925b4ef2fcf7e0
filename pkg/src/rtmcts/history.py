"""Progressive History selection bias and N-Gram play-out policy.

Both draw on one table of action sequences keyed by the avatar cell where the
sequence's first action was played. Length-1 entries are the Progressive
History table. Raw simulation values are stored; readers normalize means with
the current search's value bounds.
"""

from __future__ import annotations

import math
import random
from typing import Callable, Sequence

from rtmcts.engine import Action

Cell = tuple[int, int] | None
Step = tuple[Cell, Action]


class ActionHistory:
    def __init__(self, max_n: int = 3):
        if max_n < 1:
            raise ValueError("max_n must be >= 1")
        self.max_n = max_n
        # (cell, actions) -> [score_sum, count]
        self.table: dict[tuple[Cell, tuple[Action, ...]], list[float]] = {}

    def update(self, trajectory: Sequence[Step], value: float) -> None:
        """Credit ``value`` to every n-gram (n <= max_n) occurring in the trajectory."""
        table = self.table
        actions = [a for _, a in trajectory]
        n_steps = len(trajectory)
        for j in range(n_steps):
            cell = trajectory[j][0]
            for n in range(1, min(self.max_n, n_steps - j) + 1):
                key = (cell, tuple(actions[j:j + n]))
                entry = table.get(key)
                if entry is None:
                    table[key] = [value, 1.0]
                else:
                    entry[0] += value
                    entry[1] += 1.0

    def entry(self, cell: Cell, actions: tuple[Action, ...]) -> tuple[float, float] | None:
        e = self.table.get((cell, actions))
        return None if e is None else (e[0], e[1])

    def action_mean(self, cell: Cell, action: Action) -> float | None:
        """Mean raw value of playing ``action`` from ``cell`` (None when never seen)."""
        e = self.table.get((cell, (action,)))
        if e is None or e[1] <= 0:
            return None
        return e[0] / e[1]

    def decay(self, gamma: float) -> None:
        for entry in self.table.values():
            entry[0] *= gamma
            entry[1] *= gamma

    def clear(self) -> None:
        self.table.clear()


def ph_selection_value(ucb_value: float, q_norm: float, visits: float, weight: float,
                       history_norm: float | None) -> float:
    """UCB1 value plus the Progressive History bias W * H / ((1 - Q) * n + 1)."""
    if history_norm is None or weight == 0:
        return ucb_value
    return ucb_value + history_norm * weight / ((1.0 - q_norm) * visits + 1.0)


def nst_playout_action(legal: Sequence[Action], cell: Cell, recent: Sequence[Step], history: ActionHistory,
                       epsilon: float, min_count: float, rng: random.Random,
                       normalize: Callable[[float], float] = lambda v: v) -> Action:
    """Pick a play-out action: epsilon-greedy over averaged n-gram means.

    ``recent`` holds the (cell, action) steps already played in this
    simulation; only its last ``max_n - 1`` entries matter.
    """
    if epsilon >= 1.0 or rng.random() < epsilon:
        return legal[rng.randrange(len(legal))]
    table = history.table
    max_n = history.max_n
    tail = list(recent[-(max_n - 1):]) if max_n > 1 else []
    best: list[Action] = []
    best_score = -math.inf
    for a in legal:
        total = 0.0
        used = 0
        e = table.get((cell, (a,)))
        if e is not None and e[1] >= min_count:
            total += normalize(e[0] / e[1])
            used += 1
        for n in range(2, max_n + 1):
            if len(tail) < n - 1:
                break
            prefix = tail[len(tail) - (n - 1):]
            key = (prefix[0][0], tuple(s[1] for s in prefix) + (a,))
            e = table.get(key)
            if e is not None and e[1] >= min_count:
                total += normalize(e[0] / e[1])
                used += 1
        score = total / used if used else 0.0
        if score > best_score:
            best_score = score
            best = [a]
        elif score == best_score:
            best.append(a)
    return best[0] if len(best) == 1 else best[rng.randrange(len(best))]
