"""Experiment runner: games x levels x repetitions x presets, journaled and resumable."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from rtmcts.agent import make_agent, preset
from rtmcts.engine import ONGOING, EngineError, advance
from rtmcts.games import load_game
from rtmcts.mcts import Budget, SearchConfig

log = logging.getLogger(__name__)

JOURNAL = "journal.jsonl"


@dataclass
class ExperimentConfig:
    presets: list[str] = field(default_factory=lambda: ["vanilla", "all"])
    games: list[str] = field(default_factory=list)
    levels: int = 5
    repetitions: int = 15
    budget: Budget = Budget("sims", 100)
    startup_budget: Budget = Budget("sims", 0)
    seed: int = 1
    jobs: int = 1
    out: Path | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    sets: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        for p in self.presets:
            preset(p)  # raises on unknown names

    def validate_games(self) -> None:
        for g in self.games:
            n = len(load_game(g).levels)
            if n < self.levels:
                raise ValueError(f"game {g!r} has {n} levels, {self.levels} requested")


@dataclass
class RunRecord:
    game: str
    level: int
    repetition: int
    preset: str
    seed: int
    outcome: str
    score: float
    ticks: int
    tick_cap: int
    verdict: str
    mean_simulations: float
    error: str = ""

    @property
    def key(self) -> tuple:
        return (self.game, self.level, self.repetition, self.preset)


HEADER = [f.name for f in fields(RunRecord)]


@dataclass(frozen=True)
class Cell:
    game: str
    level: int
    repetition: int
    preset: str
    seed: int
    budget: Budget
    startup_budget: Budget
    search: SearchConfig

    @property
    def key(self) -> tuple:
        return (self.game, self.level, self.repetition, self.preset)


def cell_seed(master: int, game: str, level: int, repetition: int, preset_name: str) -> int:
    """64-bit seed: big-endian BLAKE2b-8 digest of ``"master|game|level|repetition|preset"``."""
    text = f"{master}|{game}|{level}|{repetition}|{preset_name}".encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big")


def cells(config: ExperimentConfig) -> Iterator[Cell]:
    for g in config.games:
        for level in range(config.levels):
            for rep in range(config.repetitions):
                for p in config.presets:
                    yield Cell(g, level, rep, p, cell_seed(config.seed, g, level, rep, p),
                               config.budget, config.startup_budget, config.search)


def play_episode(game_name: str, level: int, preset_name: str, seed: int, budget: Budget,
                 startup_budget: Budget, search: SearchConfig | None = None, on_tick=None):
    """Play one game to the end; returns (final state, agent).

    The seed fixes the level's random directions, the game's own randomness
    and the agent's rng, each through a separate stream.
    """
    game = load_game(game_name)
    rng = random.Random(seed)
    state = game.initial_state(level, rng.getrandbits(32))
    env = random.Random(rng.getrandbits(64))
    agent = make_agent(preset_name, rng.getrandbits(64), search)
    agent.on_game_start(state, startup_budget)
    while state.status == ONGOING:
        action = agent.act(state, budget)
        advance(state, action, env)
        if on_tick is not None:
            on_tick(state, agent)
    return state, agent


def run_cell(cell: Cell) -> RunRecord:
    tick_cap = 0
    try:
        tick_cap = load_game(cell.game).spec.tick_cap
        state, agent = play_episode(cell.game, cell.level, cell.preset, cell.seed, cell.budget,
                                    cell.startup_budget, cell.search)
    except (EngineError, ValueError, KeyError, IndexError) as exc:
        log.error("cell %s failed: %s", cell.key, exc)
        return RunRecord(cell.game, cell.level, cell.repetition, cell.preset, cell.seed, "error",
                         0.0, 0, tick_cap, "", 0.0, f"{type(exc).__name__}: {exc}")
    verdict = agent.verdict.classification if agent.verdict is not None else ""
    return RunRecord(cell.game, cell.level, cell.repetition, cell.preset, cell.seed, state.status,
                     float(state.score), state.tick, tick_cap, verdict, round(agent.mean_simulations(), 3))


def load_journal(path: Path) -> dict[tuple, RunRecord]:
    done: dict[tuple, RunRecord] = {}
    if not path.is_file():
        return done
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = RunRecord(**json.loads(line))
            except (json.JSONDecodeError, TypeError):
                continue  # torn final line after an interruption
            done[rec.key] = rec
    return done


def run_experiment(config: ExperimentConfig, progress: Callable[[int, int, RunRecord], None] | None = None
                   ) -> list[RunRecord]:
    """Run every cell not already in the journal; returns records in cell order."""
    config.validate_games()
    todo_cells = list(cells(config))
    journal_path = config.out / JOURNAL if config.out is not None else None
    done = load_journal(journal_path) if journal_path is not None else {}
    wanted = {c.key: c for c in todo_cells}
    # a record only counts when it was produced with this cell's seed
    done = {k: r for k, r in done.items() if k in wanted and r.seed == wanted[k].seed}
    pending = [c for c in todo_cells if c.key not in done]
    total = len(todo_cells)
    fh = None
    if journal_path is not None:
        journal_path.parent.mkdir(parents=True, exist_ok=True)
        fh = journal_path.open("a", encoding="utf-8")
    try:
        results = _execute(pending, config.jobs)
        for rec in results:
            done[rec.key] = rec
            if fh is not None:
                fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
                fh.flush()
            if progress is not None:
                progress(len(done), total, rec)
    finally:
        if fh is not None:
            fh.close()
    return [done[c.key] for c in todo_cells]


def _execute(pending: list[Cell], jobs: int) -> Iterable[RunRecord]:
    if jobs <= 1 or len(pending) <= 1:
        return map(run_cell, pending)
    pool = ProcessPoolExecutor(max_workers=jobs)
    return _drain(pool, pending)


def _drain(pool: ProcessPoolExecutor, pending: list[Cell]) -> Iterator[RunRecord]:
    with pool:
        yield from pool.map(run_cell, pending, chunksize=1)


def records_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow([getattr(r, h) for h in HEADER])
    return buf.getvalue()


def read_records_csv(path: Path) -> list[RunRecord]:
    types = {f.name: f.type for f in fields(RunRecord)}
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                t = types[k]
                kw[k] = int(v) if t == "int" else float(v) if t == "float" else v
            out.append(RunRecord(**kw))
    return out


class ProgressPrinter:
    """Prints one line every ``every`` records and at the end, with a rough ETA."""

    def __init__(self, stream=None, every: int = 10):
        self.stream = stream or sys.stderr
        self.every = every
        self.start = time.monotonic()
        self.first: int | None = None

    def __call__(self, done: int, total: int, rec: RunRecord) -> None:
        if self.first is None:
            self.first = done - 1
        if done % self.every and done != total:
            return
        elapsed = time.monotonic() - self.start
        fresh = done - self.first
        eta = elapsed / fresh * (total - done) if fresh else 0.0
        print(f"[{done}/{total}] {rec.preset} {rec.game} L{rec.level} r{rec.repetition}: {rec.outcome} "
              f"elapsed {elapsed:.0f}s eta {eta:.0f}s", file=self.stream, flush=True)


def write_outputs(records: list[RunRecord], out: Path, sets: dict[str, str] | None = None) -> None:
    from rtmcts.harness.stats import summarize

    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_csv(records), encoding="utf-8")
    good = [r for r in records if r.outcome != "error"]
    if good:
        table = summarize(good, sets)
        (out / "summary.md").write_text(table.markdown(), encoding="utf-8")
        (out / "summary.csv").write_text(table.csv(), encoding="utf-8")


def with_search(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    return replace(config, search=replace(config.search, **overrides))
