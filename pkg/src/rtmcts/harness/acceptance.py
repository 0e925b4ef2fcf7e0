"""Directional comparison experiments over the bundled suite.

All experiments share one journal, so cells common to several comparisons
(same game, level, repetition and preset give the same seed) run once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from rtmcts.games import SUITE
from rtmcts.harness.experiment import ExperimentConfig, ProgressPrinter, RunRecord, run_experiment, write_outputs
from rtmcts.harness.stats import Comparison, compare, fmt_pct, summarize, wald
from rtmcts.mcts import Budget

BUDGET = Budget("sims", 100)
STARTUP = Budget("sims", 0)
LEVELS = 5
REPS = 15
TR_GAMMAS = ("0", "0.2", "0.4", "0.6", "0.8", "1")
LA_GAME = "frogs"
LA_REPS = 60
KBE_GAMES = ("maze", "butterflies")
KBE_REPS = 15


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class DirectionalReport:
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]
        for name, table in self.tables.items():
            lines.append(f"\n## {name}\n{table}")
        return "\n".join(lines)


def _plan(seed: int, out: Path, jobs: int) -> dict[str, ExperimentConfig]:
    common = dict(levels=LEVELS, budget=BUDGET, startup_budget=STARTUP, seed=seed, jobs=jobs, out=out)
    return {
        "main": ExperimentConfig(presets=["vanilla", "bfti", "all"], games=list(SUITE), repetitions=REPS, **common),
        "tr": ExperimentConfig(presets=["bfti"] + [f"tr@{g}" for g in TR_GAMMAS], games=list(SUITE),
                               repetitions=REPS, **common),
        "la": ExperimentConfig(presets=["bfti", "la"], games=[LA_GAME], repetitions=LA_REPS, **common),
        "kbe": ExperimentConfig(presets=["bfti", "kbe"], games=list(KBE_GAMES), repetitions=KBE_REPS, **common),
    }


def _total(table, a: str, b: str, metric: str = "win") -> Comparison:
    return next(c for c in compare(table, a, b, metric) if c.game_set == "total")


def _by_set(table, a: str, b: str, game: str) -> Comparison:
    return next(c for c in compare(table, a, b) if c.game_set == game)


def _desc(c: Comparison, a: str, b: str) -> str:
    return (f"{a} {fmt_pct(*wald(*c.a))} vs {b} {fmt_pct(*wald(*c.b))}, "
            f"delta {100 * c.delta:+.1f}, overlap {'yes' if c.overlap else 'no'}, p={c.p_value:.4g}")


def run_directional(out: Path, jobs: int = 1, seed: int = 1, progress=None) -> DirectionalReport:
    out = Path(out)
    plan = _plan(seed, out, jobs)
    records: dict[str, list[RunRecord]] = {}
    for name, cfg in plan.items():
        records[name] = run_experiment(cfg, progress or ProgressPrinter(every=25))
        write_outputs(records[name], out / name)
    rep = DirectionalReport()

    main = summarize(records["main"])
    rep.tables["main"] = main.markdown()
    c = _total(main, "vanilla", "all")
    rep.checks.append(Check("all vs vanilla: win gain >= 10 points, CIs disjoint",
                            c.delta >= 0.10 and not c.overlap, _desc(c, "vanilla", "all")))
    c = _total(main, "vanilla", "bfti", "early-loss")
    rep.checks.append(Check("bfti vs vanilla: lower early-loss share", c.delta < 0,
                            "early-loss " + _desc(c, "vanilla", "bfti")))

    la = summarize(records["la"])
    rep.tables["la"] = la.markdown()
    c = _by_set(la, "bfti", "la", LA_GAME)
    rep.checks.append(Check(f"la vs bfti on {LA_GAME}: higher win, p < 0.05",
                            c.delta > 0 and c.significant(), _desc(c, "bfti", "la")))

    kbe = summarize(records["kbe"])
    rep.tables["kbe"] = kbe.markdown()
    for g in KBE_GAMES:
        c = _by_set(kbe, "bfti", "kbe", g)
        rep.checks.append(Check(f"kbe vs bfti on {g}: higher win, p < 0.05",
                                c.delta > 0 and c.significant(), _desc(c, "bfti", "kbe")))

    tr = summarize(records["tr"])
    rep.tables["tr"] = tr.markdown()
    wins = []
    details = []
    for g in TR_GAMMAS:
        c = _total(tr, "bfti", f"tr@{g}")
        details.append(f"g={g}: {100 * c.delta:+.1f} (p={c.p_value:.3g})")
        if float(g) >= 0.4 and c.delta > 0 and c.significant():
            wins.append(g)
    rep.checks.append(Check("tr sweep: some gamma >= 0.4 beats no reuse, p < 0.05", bool(wins),
                            "; ".join(details)))
    return rep
