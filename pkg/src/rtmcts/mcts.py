"""Open-loop MCTS with UCB1 selection and whole-play-out expansion.

Every simulation replays its action path from a fresh copy of the root state,
so a node aggregates all states its action sequence can reach. Enhancements
plug in through :class:`Extensions`.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Collection, Sequence

from rtmcts.determinism import mixmax_value
from rtmcts.engine import LOSS, ONGOING, WIN, Action, GameState, advance
from rtmcts.history import ActionHistory, nst_playout_action, ph_selection_value
from rtmcts.knowledge import DistanceSnapshot, KnowledgeBase, kbe_bonus, observe_transition
from rtmcts.lifecycle import consume_cached_state
from rtmcts.loss_avoidance import loss_avoid
from rtmcts.novelty import DANGER_THRESHOLD, filter_children, novelty_test_group
from rtmcts.tree import NOT_NOVEL, Node, ValueBounds

WIN_VALUE = 1e7


def evaluate_state(state: GameState) -> float:
    """Game score, shifted by +/-10^7 for won/lost states."""
    status = state.status
    if status == ONGOING:
        return state.score
    if status == WIN:
        return WIN_VALUE + state.score
    return -WIN_VALUE + state.score


def ucb1(mean_norm: float, visits: float, parent_visits: float, exploration: float) -> float:
    # ln(n_P) is clamped at 0: decayed parents can hold fewer than one visit
    ln_np = math.log(parent_visits) if parent_visits > 1.0 else 0.0
    return mean_norm + exploration * math.sqrt(ln_np / visits)


def backpropagate(path: Sequence[Node], value: float, bounds: ValueBounds | None = None) -> None:
    for node in path:
        node.score_sum += value
        node.visits += 1.0
        if value > node.max_score:
            node.max_score = value
    if bounds is not None:
        bounds.update(value)


def recommend_action(root: Node, actions: Sequence[Action], bounds: ValueBounds,
                     novelty: bool = False, pruned: Collection[Action] = ()) -> Action | None:
    """Action of the child with the best mean; ties go to the earliest action.

    With novelty pruning, a not-novel child is only eligible when the best
    novel child's normalized mean is below 0.5.
    """
    cands = []
    for a in actions:
        c = root.children.get(a)
        if c is not None and c.visits > 0 and a not in pruned:
            cands.append(c)
    if not cands:
        return None

    def best_of(nodes):
        best = nodes[0]
        for c in nodes[1:]:
            if c.mean > best.mean:
                best = c
        return best

    if novelty:
        novel = [c for c in cands if c.novelty != NOT_NOVEL]
        if novel:
            top = best_of(novel)
            if bounds.normalize(top.mean) >= DANGER_THRESHOLD:
                return top.action
    return best_of(cands).action


@dataclass(frozen=True)
class Budget:
    kind: str  # "ms" or "sims"
    amount: float

    def __post_init__(self) -> None:
        if self.kind not in ("ms", "sims"):
            raise ValueError(f"unknown budget kind {self.kind!r}")
        if self.amount < 0:
            raise ValueError("budget must be non-negative")

    @classmethod
    def parse(cls, text: str) -> Budget:
        kind, _, amount = text.partition(":")
        try:
            return cls(kind.strip(), float(amount))
        except ValueError:
            raise ValueError(f"budget must look like 'ms:40' or 'sims:100', got {text!r}") from None

    def __str__(self) -> str:
        return f"{self.kind}:{self.amount:g}"


@dataclass
class SearchConfig:
    exploration: float = 0.6
    playout_depth: int = 10
    budget: Budget = Budget("ms", 40)
    startup_budget: Budget = Budget("ms", 1000)
    gamma: float = 0.6
    bfti_samples: int = 5
    probe_sequences: int = 5
    probe_length: int = 5
    probe_repetitions: int = 3
    ph_weight: float = 5.0
    nst_max_n: int = 3
    nst_epsilon: float = 0.25
    nst_min_count: float = 7

    def __post_init__(self) -> None:
        if self.exploration < 0:
            raise ValueError("exploration constant must be >= 0")
        if self.playout_depth < 1:
            raise ValueError("playout depth must be >= 1")


@dataclass
class Extensions:
    history: ActionHistory | None = None
    progressive_history: bool = False
    nst: bool = False
    knowledge: KnowledgeBase | None = None
    snapshot: DistanceSnapshot | None = None
    loss_avoidance: bool = False
    novelty: bool = False
    mixmax: bool = False
    pruned: frozenset = frozenset()


@dataclass
class ChildStats:
    action: Action
    visits: float
    mean: float | None
    novelty: int
    pruned: bool


@dataclass
class SearchResult:
    action: Action
    simulations: int
    children: list[ChildStats] = field(default_factory=list)
    fallback: bool = False
    max_simulation_seconds: float = 0.0


class Search:
    """One search over a tree; reusable across ticks with fresh ``run`` calls."""

    def __init__(self, config: SearchConfig, extensions: Extensions | None = None,
                 rng: random.Random | None = None):
        self.config = config
        self.ext = extensions or Extensions()
        self.rng = rng or random.Random(0)
        self.bounds = ValueBounds()

    # -- entry point ---------------------------------------------------------

    def run(self, root_state: GameState, root: Node, simulations: int | None = None,
            deadline: float | None = None) -> SearchResult:
        """Simulate until ``simulations`` are done or ``deadline`` (perf_counter) passes."""
        if root_state.status != ONGOING:
            raise ValueError("cannot search from a terminal state")
        if (simulations is None) == (deadline is None):
            raise ValueError("give exactly one of simulations / deadline")
        self.legal = root_state.spec.legal
        self.root = root
        self.root_state = root_state
        self.x0 = evaluate_state(root_state)
        bounds = self.bounds = ValueBounds()
        for c in root.children.values():
            if c.visits > 0:
                bounds.update(c.mean)
        done = 0
        longest = 0.0
        if simulations is not None:
            for _ in range(simulations):
                self.simulate()
            done = simulations
        else:
            clock = time.perf_counter
            now = clock()
            while now < deadline:
                self.simulate()
                done += 1
                after = clock()
                if after - now > longest:
                    longest = after - now
                now = after
        return self._result(done, longest)

    def _result(self, done: int, longest: float) -> SearchResult:
        ext = self.ext
        action = recommend_action(self.root, self.legal, self.bounds, ext.novelty, ext.pruned)
        fallback = done == 0
        if action is None:
            fallback = True
            action = next((a for a in self.legal if a not in ext.pruned), self.legal[0])
        stats = []
        for a in self.legal:
            c = self.root.children.get(a)
            if c is None:
                continue
            stats.append(ChildStats(a, c.visits, c.mean if c.visits > 0 else None, c.novelty, a in ext.pruned))
        return SearchResult(action, done, stats, fallback, longest)

    # -- one simulation ------------------------------------------------------

    def evaluate(self, state: GameState) -> float:
        value = evaluate_state(state)
        ext = self.ext
        if ext.knowledge is not None and ext.snapshot is not None and value == self.x0:
            value += kbe_bonus(ext.snapshot, state, ext.knowledge)
        return value

    def _step(self, state: GameState, action: Action) -> None:
        kb = self.ext.knowledge
        if kb is None:
            advance(state, action, self.rng)
            return
        before = evaluate_state(state)
        advance(state, action, self.rng)
        after = evaluate_state(state)
        if after != before:
            observe_transition(kb, state.events, after - before, state.spec)

    def simulate(self) -> float:
        ext = self.ext
        rng = self.rng
        legal = self.legal
        n_legal = len(legal)
        root = self.root
        root_state = self.root_state
        node = root
        path = [root]
        trajectory = []
        state = None

        # selection
        while True:
            cur = root_state if state is None else state
            if cur.status != ONGOING or len(node.children) < n_legal:
                break
            if ext.novelty and not node.group_tested:
                novelty_test_group(node, cur, legal, rng)
            child = self.select(node, cur)
            trajectory.append((cur.avatar, child.action))
            if state is None:
                state = consume_cached_state(child) if child.cached_states else None
                if state is None:
                    state = root_state.copy()
                    self._step(state, child.action)
            else:
                self._step(state, child.action)
            node = child
            path.append(child)
        if state is None:
            state = root_state.copy()

        # play-out; every generated node joins the tree
        depth = 0
        while depth < self.config.playout_depth and state.status == ONGOING:
            if depth == 0 and len(node.children) < n_legal:
                options = [a for a in legal if a not in node.children]
            else:
                options = legal
            action = self.playout_action(options, state.avatar, trajectory)
            trajectory.append((state.avatar, action))
            self._step(state, action)
            node = node.child(action)
            path.append(node)
            depth += 1

        value = self.evaluate(state)
        if ext.loss_avoidance and state.status == LOSS and not node.la_visited and len(path) > 1:
            excluded = ext.pruned if len(path) == 2 else ()
            value = loss_avoid(root_state, path, value, self.evaluate, rng, legal, excluded).value
        backpropagate(path, value, self.bounds)
        node.ended += 1.0
        if ext.history is not None:
            ext.history.update(trajectory, value)
        return value

    def select(self, node: Node, state: GameState) -> Node:
        ext = self.ext
        children = node.children
        if node is self.root and ext.pruned:
            cands = [children[a] for a in self.legal if a in children and a not in ext.pruned]
        else:
            cands = [children[a] for a in self.legal if a in children]
        bounds = self.bounds
        if ext.novelty and node.visits > 0:
            cands = filter_children(cands, bounds.normalize(node.mean))
        for c in cands:
            if c.visits <= 0:
                return c
        C = self.config.exploration
        pv = node.visits
        ln_np = math.log(pv) if pv > 1.0 else 0.0
        use_ph = ext.progressive_history and ext.history is not None
        if use_ph:
            cell = state.avatar
            weight = self.config.ph_weight
        mixmax = ext.mixmax
        lo, hi = bounds.lo, bounds.hi
        span = hi - lo
        best = cands[0]
        best_v = -math.inf
        for c in cands:
            n = c.visits
            q = (c.score_sum / n - lo) / span if span > 0 else 0.5
            if mixmax:
                qmax = (c.max_score - lo) / span if span > 0 else 0.5
                q = mixmax_value(q, qmax)
            v = q + C * math.sqrt(ln_np / n)
            if use_ph:
                h = ext.history.action_mean(cell, c.action)
                v = ph_selection_value(v, q, n, weight, None if h is None else bounds.normalize(h))
            if v > best_v:
                best_v = v
                best = c
        return best

    def playout_action(self, options: Sequence[Action], cell, trajectory) -> Action:
        ext = self.ext
        if ext.nst and ext.history is not None:
            cfg = self.config
            return nst_playout_action(options, cell, trajectory, ext.history, cfg.nst_epsilon,
                                      cfg.nst_min_count, self.rng, self.bounds.normalize)
        return options[self.rng.randrange(len(options))]


def run_search(root_state: GameState, root: Node, config: SearchConfig, extensions: Extensions | None = None,
               rng: random.Random | None = None, budget: Budget | None = None) -> SearchResult:
    """Run one budgeted search; wall-clock budgets start counting now."""
    budget = budget or config.budget
    search = Search(config, extensions, rng)
    if budget.kind == "sims":
        return search.run(root_state, root, simulations=int(budget.amount))
    return search.run(root_state, root, deadline=time.perf_counter() + budget.amount / 1000.0)
