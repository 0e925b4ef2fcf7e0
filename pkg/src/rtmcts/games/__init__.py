"""Bundled game suite: eight small games, five levels each."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from rtmcts.engine import GameSpec, GameState, Level, init_state, load_level, load_spec

SUITE = ("frogs", "butterflies", "chase", "maze", "keysdoors", "shooter", "camelrace", "slowcross")
DETERMINISTIC_GAMES = ("maze", "keysdoors")
SUITES = {
    "default": SUITE,
    "deterministic": DETERMINISTIC_GAMES,
    "nondeterministic": tuple(g for g in SUITE if g not in DETERMINISTIC_GAMES),
}


@dataclass(frozen=True)
class Game:
    name: str
    spec: GameSpec
    levels: tuple[Level, ...]

    def initial_state(self, level: int, seed: int = 0) -> GameState:
        return init_state(self.spec, self.levels[level], seed)


def _read(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_game(name: str) -> Game:
    """Load a bundled game by name, or a ``.game`` file path with sibling ``<stem>_<k>.lvl`` levels."""
    if name in SUITE:
        spec = load_spec(_read(f"{name}.game"))
        levels = []
        k = 1
        while resources.files(__name__).joinpath(f"{name}_{k}.lvl").is_file():
            levels.append(load_level(_read(f"{name}_{k}.lvl"), spec))
            k += 1
        return Game(name, spec, tuple(levels))
    path = Path(name)
    if not path.is_file():
        raise FileNotFoundError(f"no bundled game or game file named {name!r}")
    spec = load_spec(path.read_text(encoding="utf-8"))
    levels = [load_level(p.read_text(encoding="utf-8"), spec)
              for p in sorted(path.parent.glob(f"{path.stem}_*.lvl"))]
    return Game(spec.name, spec, tuple(levels))


def suite(name: str) -> tuple[str, ...]:
    if name in SUITES:
        return SUITES[name]
    return tuple(g.strip() for g in name.split(",") if g.strip())
