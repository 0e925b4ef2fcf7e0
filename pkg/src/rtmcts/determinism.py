"""Deterministic game detection and the behaviour switches it enables."""

from __future__ import annotations

import random
from dataclasses import dataclass

from rtmcts.engine import ONGOING, GameState, advance

DETERMINISTIC = "deterministic"
NONDETERMINISTIC = "nondeterministic"


@dataclass(frozen=True)
class ProbeConfig:
    sequences: int = 5
    length: int = 5
    repetitions: int = 3

    def __post_init__(self) -> None:
        if min(self.sequences, self.length, self.repetitions) < 1:
            raise ValueError("probe sizes must all be >= 1")


@dataclass(frozen=True)
class DeterminismVerdict:
    classification: str
    reason: str  # npc-observed | divergence | all-probes-agree

    @property
    def deterministic(self) -> bool:
        return self.classification == DETERMINISTIC


def _has_npc(state: GameState) -> bool:
    category = state.spec.category
    return any(category[o[1]] == "npc" for o in state.objects)


def classify(initial: GameState, probe: ProbeConfig, rng: random.Random) -> DeterminismVerdict:
    """Replay random action sequences on copies of ``initial`` and compare outcomes."""
    if _has_npc(initial):
        return DeterminismVerdict(NONDETERMINISTIC, "npc-observed")
    legal = initial.spec.legal
    for _ in range(probe.sequences):
        seq = [legal[rng.randrange(len(legal))] for _ in range(probe.length)]
        reference = None
        for _ in range(probe.repetitions):
            s = initial.copy()
            for a in seq:
                if s.status != ONGOING:
                    break
                advance(s, a, rng)
                if _has_npc(s):
                    return DeterminismVerdict(NONDETERMINISTIC, "npc-observed")
            key = s.serialize()
            if reference is None:
                reference = key
            elif key != reference:
                return DeterminismVerdict(NONDETERMINISTIC, "divergence")
    return DeterminismVerdict(DETERMINISTIC, "all-probes-agree")


def mixmax_value(mean_norm: float, max_norm: float) -> float:
    """Blend of normalized mean and normalized best value, weighted 3:1."""
    return 0.75 * mean_norm + 0.25 * max_norm


@dataclass(frozen=True)
class ModeSettings:
    gamma: float
    reset_novelty: bool
    mixmax: bool


def apply_mode(verdict: DeterminismVerdict | None, gamma: float) -> ModeSettings:
    """Deterministic games keep old results intact and select with mixmax."""
    if verdict is not None and verdict.deterministic:
        return ModeSettings(gamma=1.0, reset_novelty=False, mixmax=True)
    return ModeSettings(gamma=gamma, reset_novelty=True, mixmax=False)
