"""Novelty-based pruning of redundant open-loop nodes (threshold-1 novelty tests).

The neighborhood of a node is its left siblings, its parent, its parent's
siblings, and recursively the parent's neighborhood. After a sibling group is
tested, every member stores the atoms of the parent state and all sibling test
states, so a neighborhood is rebuilt by walking to the root and unioning stores.
"""

from __future__ import annotations

import random
from typing import Sequence

from rtmcts.engine import MOVES, Action, GameSpec, GameState, advance, feature_atoms
from rtmcts.tree import NOT_NOVEL, NOVEL, UNTESTED, Node

DANGER_THRESHOLD = 0.5


def path_atoms(parent: Node) -> set:
    """Atoms stored on the path from ``parent`` up to (not including) the root."""
    atoms: set = set()
    node = parent
    while node.parent is not None:
        if node.store:
            atoms |= node.store
        node = node.parent
    return atoms


def neighborhood_atoms(node: Node) -> set:
    """Atoms of every state in the neighborhood of a tested ``node``."""
    parent = node.parent
    if parent is None:
        return set()
    atoms = path_atoms(parent)
    if parent.group_parent_atoms is not None:
        atoms |= parent.group_parent_atoms
    for sib_action, sib in parent.children.items():
        if sib is node:
            break
        if sib.test_atoms is not None:
            atoms |= sib.test_atoms
    return atoms


def apply_exemptions(child: GameState, parent: GameState, action: Action, spec: GameSpec) -> bool:
    """True when the transition must always count as novel."""
    if child.score > parent.score:
        return True
    if action in MOVES:
        if spec.movement_axes != "both":
            return True
        if spec.avatar_speed <= 0.5:
            return True
    return False


def novelty_test_group(parent: Node, parent_state: GameState, actions: Sequence[Action],
                       rng: random.Random) -> dict[Action, int]:
    """Test all children of a fully expanded ``parent`` and record marks.

    One fresh state per child is generated from ``parent_state``. Children are
    visited in ``actions`` order, which defines the left-sibling relation.
    """
    spec = parent_state.spec
    parent_atoms = feature_atoms(parent_state)
    seen = path_atoms(parent)
    seen |= parent_atoms
    parent.group_parent_atoms = parent_atoms
    group = set(parent_atoms)
    # children dict is re-ordered so left-sibling order matches ``actions``
    ordered = {a: parent.children[a] for a in actions if a in parent.children}
    ordered.update((a, c) for a, c in parent.children.items() if a not in ordered)
    parent.children = ordered
    marks = {}
    for a, child in ordered.items():
        s = parent_state.copy()
        advance(s, a, rng)
        atoms = feature_atoms(s)
        child.test_atoms = atoms
        child.exempt = apply_exemptions(s, parent_state, a, spec)
        novel = child.exempt or not atoms <= seen
        child.novelty = NOVEL if novel else NOT_NOVEL
        marks[a] = child.novelty
        seen |= atoms
        group |= atoms
    store = frozenset(group)
    for child in ordered.values():
        child.store = store
    parent.group_tested = True
    propagate_marks(parent)
    return marks


def propagate_marks(node: Node) -> None:
    """Mark ``node`` (and ancestors, transitively) not novel when all children are."""
    while node is not None and node.group_tested and node.children:
        if node.exempt or node.novelty == NOT_NOVEL:
            return
        if any(c.novelty != NOT_NOVEL for c in node.children.values()):
            return
        node.novelty = NOT_NOVEL
        node = node.parent


def filter_children(children: Sequence[Node], parent_norm_mean: float) -> list[Node]:
    """Drop not-novel children unless the position looks dangerous (normalized mean < 0.5)."""
    if parent_norm_mean < DANGER_THRESHOLD:
        return list(children)
    kept = [c for c in children if c.novelty != NOT_NOVEL]
    return kept if kept else list(children)


def reset_first_ply_marks(root: Node) -> None:
    for child in root.children.values():
        child.novelty = UNTESTED
        child.exempt = False
        child.store = None
        child.test_atoms = None
    root.group_tested = False
    root.group_parent_atoms = None
