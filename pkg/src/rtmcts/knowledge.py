"""Knowledge-based evaluation: learned object-type weights and distance deltas."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from rtmcts.engine import GameSpec, GameState, CollisionEvent
from rtmcts.pathfinder import distances_by_type

INITIAL_WEIGHTS = {"npc": 0.1, "movable": 0.25, "resource": 1.0, "portal": 1.0}
INITIAL_ALPHA = 0.8
MIN_ALPHA = 0.1
ALPHA_DECAY = 0.75
TICK_INCREMENT = 1e-4
IGNORE_BELOW = 1e-4


@dataclass
class KnowledgeBase:
    weights: dict[int, float] = field(default_factory=dict)
    delta_sum: dict[int, float] = field(default_factory=dict)
    events: dict[int, int] = field(default_factory=dict)
    alpha: dict[int, float] = field(default_factory=dict)
    categories: dict[int, str] = field(default_factory=dict)

    def add_type(self, type_id: int, category: str) -> None:
        if type_id in self.weights or category == "avatar":
            return
        self.weights[type_id] = INITIAL_WEIGHTS.get(category, 0.0)
        self.delta_sum[type_id] = 0.0
        self.events[type_id] = 0
        self.alpha[type_id] = INITIAL_ALPHA
        self.categories[type_id] = category

    def mean_delta(self, type_id: int) -> float | None:
        n = self.events.get(type_id, 0)
        return self.delta_sum[type_id] / n if n else None

    def eligible(self) -> list[int]:
        return [t for t, w in self.weights.items() if abs(w) >= IGNORE_BELOW]

    def dump(self) -> str:
        """Tab-separated weight table, one type per line."""
        lines = ["type\tcategory\tweight\tevents\tmean_delta\talpha"]
        for t in sorted(self.weights):
            md = self.mean_delta(t)
            lines.append(f"{t}\t{self.categories[t]}\t{self.weights[t]:.6g}\t{self.events[t]}\t"
                         f"{'' if md is None else format(md, '.6g')}\t{self.alpha[t]:.4g}")
        return "\n".join(lines)


def init_weights(types: Iterable[tuple[int, str]]) -> KnowledgeBase:
    kb = KnowledgeBase()
    for type_id, category in types:
        kb.add_type(type_id, category)
    return kb


def observe_types(kb: KnowledgeBase, state: GameState) -> None:
    """Register every object type present in ``state`` (new types get default weights)."""
    spec = state.spec
    for tid in {o[1] for o in state.objects}:
        if tid not in kb.weights:
            kb.add_type(tid, spec.category[tid])


def tick_increment(kb: KnowledgeBase) -> None:
    for t in kb.weights:
        kb.weights[t] += TICK_INCREMENT


def observe_transition(kb: KnowledgeBase, events: Iterable[CollisionEvent], delta: float,
                       spec: GameSpec | None = None) -> None:
    """Credit an evaluation change to every type the avatar (or its missiles) collided with."""
    types = []
    for ev in events:
        t = ev.other_type
        if t not in types:
            types.append(t)
    for t in types:
        if t not in kb.weights:
            if spec is None:
                continue
            kb.add_type(t, spec.category[t])
            if t not in kb.weights:
                continue
        kb.delta_sum[t] += delta
        kb.events[t] += 1
        mean = kb.delta_sum[t] / kb.events[t]
        alpha = kb.alpha[t]
        kb.weights[t] += (mean - kb.weights[t]) * alpha
        kb.alpha[t] = max(MIN_ALPHA, ALPHA_DECAY * alpha)


@dataclass(frozen=True)
class DistanceSnapshot:
    """Nearest-object distances from the avatar in the root state of one tick."""

    distances: Mapping[int, int | None]

    @classmethod
    def of(cls, state: GameState, kb: KnowledgeBase) -> DistanceSnapshot:
        if state.avatar is None:
            return cls({t: None for t in kb.weights})
        return cls(distances_by_type(state, state.avatar, kb.weights))


def raw_bonus(weights: Mapping[int, float], d0: Mapping[int, int | None], dT: Mapping[int, int | None]) -> float:
    """Sum over types of w * (d0 - dT), skipping near-zero weights and unreachable types."""
    total = 0.0
    for t, w in weights.items():
        if abs(w) < IGNORE_BELOW:
            continue
        a = d0.get(t)
        b = dT.get(t)
        if a is None or b is None:
            continue
        total += w * (a - b)
    return total


def normalize_bonus(raw: float) -> float:
    """Squash a raw bonus into [0, 0.5], preserving order; 0 maps to 0.25."""
    return 0.25 + 0.25 * raw / (1.0 + abs(raw))


def kbe_bonus(snapshot: DistanceSnapshot, final_state: GameState, kb: KnowledgeBase) -> float:
    if final_state.avatar is None:
        return 0.0
    types = [t for t in kb.eligible() if snapshot.distances.get(t) is not None]
    if not types:
        return 0.0
    dT = distances_by_type(final_state, final_state.avatar, types)
    return normalize_bonus(raw_bonus(kb.weights, snapshot.distances, dT))
