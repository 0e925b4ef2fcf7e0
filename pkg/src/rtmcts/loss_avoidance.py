"""Loss avoidance: replace a first-visit play-out loss by the best sibling evaluation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Collection, Sequence

from rtmcts.engine import ONGOING, Action, GameState, advance
from rtmcts.tree import Node


@dataclass
class LAOutcome:
    value: float
    siblings: list[tuple[Action, float]] = field(default_factory=list)
    terminated_early: bool = False


def loss_avoid(root_state: GameState, path: Sequence[Node], losing_eval: float,
               evaluator: Callable[[GameState], float], rng: random.Random,
               actions: Sequence[Action], excluded: Collection[Action] = ()) -> LAOutcome:
    """Regenerate the losing node's parent by replay and evaluate every sibling.

    ``path`` runs from the root to the losing node. Missing siblings are added
    to the tree with their own evaluation as a single local visit; existing
    siblings contribute their current mean. ``excluded`` lists actions that may
    not be generated under the parent (pruned root actions).
    """
    losing = path[-1]
    losing.la_visited = True
    if len(path) < 2:
        return LAOutcome(losing_eval)
    parent = path[-2]

    state = root_state.copy()
    for node in path[1:-1]:
        advance(state, node.action, rng)
        if state.status != ONGOING:
            return LAOutcome(evaluator(state), terminated_early=True)

    best = losing_eval
    siblings = []
    for a in actions:
        if a == losing.action or a in excluded:
            continue
        sib = parent.children.get(a)
        if sib is not None and sib.visits > 0:
            value = sib.score_sum / sib.visits
        else:
            s = state.copy()
            advance(s, a, rng)
            value = evaluator(s)
            if sib is None:
                sib = parent.child(a)
            sib.score_sum += value
            sib.visits += 1.0
            sib.pseudo += 1.0
            if value > sib.max_score:
                sib.max_score = value
        siblings.append((a, value))
        if value > best:
            best = value
    return LAOutcome(best, siblings)
