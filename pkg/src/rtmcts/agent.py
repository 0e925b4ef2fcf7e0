"""Per-game controller wiring the engine, the search, and the enhancements."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Iterable

from rtmcts.determinism import DeterminismVerdict, ProbeConfig, apply_mode, classify
from rtmcts.engine import Action, GameState
from rtmcts.history import ActionHistory
from rtmcts.knowledge import DistanceSnapshot, KnowledgeBase, init_weights, kbe_bonus, observe_types, tick_increment
from rtmcts.lifecycle import bfti_initialize, reuse_tree
from rtmcts.mcts import Budget, Extensions, Search, SearchConfig, SearchResult, evaluate_state
from rtmcts.tree import Node

ENHANCEMENTS = ("PH", "NST", "TR", "BFTI", "LA", "NBP", "KBE", "DGD")
ALL = frozenset(ENHANCEMENTS)

PRESETS: dict[str, frozenset[str]] = {
    "vanilla": frozenset(),
    "bfti": frozenset({"BFTI"}),
    "ph": frozenset({"BFTI", "PH"}),
    "nst": frozenset({"BFTI", "NST"}),
    "nst+ph": frozenset({"BFTI", "NST", "PH"}),
    "tr": frozenset({"BFTI", "TR"}),
    "kbe": frozenset({"BFTI", "KBE"}),
    "la": frozenset({"BFTI", "LA"}),
    "nbp": frozenset({"BFTI", "NBP"}),
    "no-dgd": ALL - {"DGD"},
    "no-bfti": ALL - {"BFTI"},
    "all": ALL,
}


@dataclass(frozen=True)
class AgentConfig:
    enhancements: frozenset[str] = frozenset()
    search: SearchConfig = field(default_factory=SearchConfig)
    name: str = "custom"

    def __post_init__(self) -> None:
        unknown = set(self.enhancements) - ALL
        if unknown:
            raise ValueError(f"unknown enhancements: {sorted(unknown)}")

    def has(self, enhancement: str) -> bool:
        return enhancement in self.enhancements


def preset(name: str, search: SearchConfig | None = None) -> AgentConfig:
    """Named agent configuration; ``tr@0.4`` style suffixes set the decay factor."""
    base, _, gamma = name.partition("@")
    if base not in PRESETS:
        raise KeyError(f"unknown preset {base!r}; choose from {sorted(PRESETS)}")
    search = search or SearchConfig()
    if gamma:
        search = replace(search, gamma=float(gamma))
    return AgentConfig(PRESETS[base], search, name)


@dataclass
class TickRecord:
    tick: int
    simulations: int
    seconds: float
    longest_simulation: float
    fallback: bool


class Agent:
    def __init__(self, config: AgentConfig, seed: int = 0):
        self.config = config
        self.rng = random.Random(seed)
        self.root: Node | None = None
        self.last_action: Action | None = None
        self.verdict: DeterminismVerdict | None = None
        self.history: ActionHistory | None = None
        self.kb: KnowledgeBase | None = None
        self.log: list[TickRecord] = []
        self.last_result: SearchResult | None = None
        self.mode = apply_mode(None, config.search.gamma)

    def _uses(self, *names: str) -> bool:
        return any(n in self.config.enhancements for n in names)

    def on_game_start(self, state: GameState, budget: Budget | None = None) -> None:
        """Startup phase: determinism probe, knowledge set-up, then an initial search."""
        start = time.perf_counter()
        cfg = self.config.search
        if self._uses("PH", "NST"):
            self.history = ActionHistory(cfg.nst_max_n)
        if self._uses("KBE"):
            self.kb = init_weights([])
            observe_types(self.kb, state)
        if self._uses("DGD"):
            probe = ProbeConfig(cfg.probe_sequences, cfg.probe_length, cfg.probe_repetitions)
            self.verdict = classify(state, probe, self.rng)
        self.mode = apply_mode(self.verdict, cfg.gamma)
        budget = budget or cfg.startup_budget
        self.root = None
        self.last_action = None
        if budget.amount <= 0 or state.is_terminal:
            return
        root = Node()
        search = Search(cfg, self._extensions(state, frozenset()), self.rng)
        if budget.kind == "sims":
            search.run(state, root, simulations=int(budget.amount))
        else:
            deadline = start + budget.amount / 1000.0
            if time.perf_counter() < deadline:
                search.run(state, root, deadline=deadline)
        if self._uses("TR"):
            self.root = root

    def _extensions(self, state: GameState, pruned: frozenset) -> Extensions:
        snapshot = DistanceSnapshot.of(state, self.kb) if self.kb is not None else None
        return Extensions(
            history=self.history,
            progressive_history=self._uses("PH"),
            nst=self._uses("NST"),
            knowledge=self.kb,
            snapshot=snapshot,
            loss_avoidance=self._uses("LA"),
            novelty=self._uses("NBP"),
            mixmax=self.mode.mixmax,
            pruned=pruned,
        )

    def act(self, state: GameState, budget: Budget | None = None) -> Action:
        """Choose the action to play in ``state`` within ``budget``."""
        start = time.perf_counter()
        cfg = self.config.search
        budget = budget or cfg.budget
        deadline = start + budget.amount / 1000.0 if budget.kind == "ms" else None

        if self._uses("TR") and self.root is not None:
            if self.last_action is None:
                root = self.root  # startup tree, same state
            else:
                gamma = self.mode.gamma
                root = reuse_tree(self.root, self.last_action, gamma,
                                  reset_novelty=self._uses("NBP") and self.mode.reset_novelty)
                if self.history is not None and gamma != 1.0:
                    self.history.decay(gamma)
        else:
            root = Node()

        if self.kb is not None:
            tick_increment(self.kb)
            observe_types(self.kb, state)
        ext = self._extensions(state, frozenset())
        search = Search(cfg, ext, self.rng)

        if self._uses("BFTI"):
            x0 = evaluate_state(state)

            def evaluator(s: GameState) -> float:
                v = evaluate_state(s)
                if ext.knowledge is not None and v == x0:
                    v += kbe_bonus(ext.snapshot, s, ext.knowledge)
                return v

            ext.pruned = frozenset(bfti_initialize(state, root, state.spec.legal, cfg.bfti_samples,
                                                   evaluator, self.rng))

        if deadline is None:
            result = search.run(state, root, simulations=int(budget.amount))
        elif time.perf_counter() < deadline:
            result = search.run(state, root, deadline=deadline)
        else:
            result = search.run(state, root, simulations=0)
        self.root = root
        self.last_action = result.action
        self.last_result = result
        self.log.append(TickRecord(state.tick, result.simulations, time.perf_counter() - start,
                                   result.max_simulation_seconds, result.fallback))
        return result.action

    def mean_simulations(self) -> float:
        return sum(r.simulations for r in self.log) / len(self.log) if self.log else 0.0


def make_agent(name_or_config: str | AgentConfig, seed: int = 0, search: SearchConfig | None = None) -> Agent:
    config = name_or_config if isinstance(name_or_config, AgentConfig) else preset(name_or_config, search)
    return Agent(config, seed)


def enhancement_set(names: Iterable[str]) -> frozenset[str]:
    return frozenset(n.upper() for n in names)
