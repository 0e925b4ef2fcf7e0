"""Open-loop search tree nodes and value normalization."""

from __future__ import annotations

import math
from collections import deque
from typing import Iterator

from rtmcts.engine import Action

UNTESTED = 0
NOVEL = 1
NOT_NOVEL = 2


class Node:
    """A node stands for every state reachable by its action path from the root state.

    ``ended`` counts simulations whose path stopped at this node and ``pseudo``
    counts visits recorded on this node alone (loss-avoidance siblings); both
    exist so visit bookkeeping can be audited after a search.
    """

    __slots__ = (
        "action", "parent", "children", "score_sum", "visits", "max_score",
        "novelty", "exempt", "group_tested", "store", "test_atoms", "group_parent_atoms",
        "cached_states", "la_visited", "ended", "pseudo",
    )

    def __init__(self, action: Action | None = None, parent: Node | None = None):
        self.action = action
        self.parent = parent
        self.children: dict[Action, Node] = {}
        self.score_sum = 0.0
        self.visits = 0.0
        self.max_score = -math.inf
        self.novelty = UNTESTED
        self.exempt = False
        self.group_tested = False
        self.store: frozenset | None = None
        self.test_atoms: frozenset | None = None
        self.group_parent_atoms: frozenset | None = None
        self.cached_states: deque | None = None
        self.la_visited = False
        self.ended = 0.0
        self.pseudo = 0.0

    @property
    def mean(self) -> float:
        return self.score_sum / self.visits

    def child(self, action: Action) -> Node:
        node = self.children.get(action)
        if node is None:
            node = self.children[action] = Node(action, self)
        return node

    def path_actions(self) -> list[Action]:
        out = []
        node = self
        while node.parent is not None:
            out.append(node.action)
            node = node.parent
        out.reverse()
        return out

    def depth(self) -> int:
        d = 0
        node = self
        while node.parent is not None:
            d += 1
            node = node.parent
        return d

    def iter_subtree(self) -> Iterator[Node]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())

    def size(self) -> int:
        return sum(1 for _ in self.iter_subtree())

    def __repr__(self) -> str:
        return (f"Node(action={self.action}, visits={self.visits:g}, sum={self.score_sum:g}, "
                f"children={len(self.children)})")


class ValueBounds:
    """Running min/max of raw backpropagated values within one search."""

    __slots__ = ("lo", "hi")

    def __init__(self) -> None:
        self.lo = math.inf
        self.hi = -math.inf

    def update(self, value: float) -> None:
        if value < self.lo:
            self.lo = value
        if value > self.hi:
            self.hi = value

    def normalize(self, value: float) -> float:
        lo, hi = self.lo, self.hi
        if hi <= lo:
            return 0.5
        return (value - lo) / (hi - lo)


def visit_conservation_errors(root: Node, tol: float = 1e-9) -> list[Node]:
    """Nodes whose visits differ from what their children and end counts account for."""
    bad = []
    for node in root.iter_subtree():
        if not node.children:
            continue
        through = sum(c.visits - c.pseudo for c in node.children.values())
        if abs(node.visits - (through + node.ended + node.pseudo)) > tol * max(1.0, node.visits):
            bad.append(node)
    return bad
