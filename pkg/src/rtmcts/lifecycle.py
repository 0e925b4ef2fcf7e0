"""Tree reuse between ticks and breadth-first initialization with safety prepruning."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from rtmcts.engine import LOSS, Action, GameState, advance
from rtmcts.novelty import reset_first_ply_marks
from rtmcts.tree import Node


@dataclass(frozen=True)
class ReuseConfig:
    enabled: bool = False
    gamma: float = 0.6

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")


@dataclass(frozen=True)
class BftiConfig:
    enabled: bool = False
    samples: int = 5

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("BFTI needs at least one sample per action")


def decay_subtree(root: Node, gamma: float) -> None:
    for node in root.iter_subtree():
        node.score_sum *= gamma
        node.visits *= gamma
        node.ended *= gamma
        node.pseudo *= gamma
        if gamma == 0.0:
            node.score_sum = 0.0  # avoid -0.0
            node.max_score = -math.inf


def reuse_tree(old_root: Node | None, played: Action, gamma: float, reset_novelty: bool = False) -> Node:
    """Promote the child for ``played`` to the new root, decaying all statistics by ``gamma``."""
    if old_root is None or played not in old_root.children:
        return Node()
    root = old_root.children[played]
    root.parent = None
    root.action = None
    root.cached_states = None
    old_root.children = {}
    if gamma != 1.0:
        decay_subtree(root, gamma)
    if reset_novelty:
        reset_first_ply_marks(root)
    return root


def bfti_initialize(root_state: GameState, root: Node, actions: Sequence[Action], samples: int,
                    evaluator: Callable[[GameState], float], rng: random.Random) -> set[Action]:
    """Sample every root action ``samples`` times and return the actions to prune.

    Children without a prior receive the mean sample evaluation as one visit
    (backpropagated to the root as well); the sampled states are cached on the
    child for later simulations. An action is pruned when its loss count
    exceeds the smallest loss count observed.
    """
    losses: dict[Action, int] = {}
    for a in actions:
        child = root.child(a)
        states = []
        total = 0.0
        lost = 0
        for _ in range(samples):
            s = root_state.copy()
            advance(s, a, rng)
            total += evaluator(s)
            if s.status == LOSS:
                lost += 1
            states.append(s)
        losses[a] = lost
        child.cached_states = deque(states)
        if child.visits <= 0:
            mean = total / samples
            child.score_sum += mean
            child.visits += 1.0
            if mean > child.max_score:
                child.max_score = mean
            root.score_sum += mean
            root.visits += 1.0
            if mean > root.max_score:
                root.max_score = mean
    fewest = min(losses.values())
    return {a for a, n in losses.items() if n > fewest}


def consume_cached_state(node: Node) -> GameState | None:
    cache = node.cached_states
    if not cache:
        return None
    return cache.popleft()
