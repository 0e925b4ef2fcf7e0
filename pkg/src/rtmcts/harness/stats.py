"""Win-rate tables with Wald intervals, and pairwise preset comparisons."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

Z95 = 1.96
TOTAL = "total"


def wald(successes: int, n: int) -> tuple[float, float]:
    """Proportion and 95% half-width, both as fractions. Empty samples give (0, 0)."""
    if n <= 0:
        return 0.0, 0.0
    p = successes / n
    return p, Z95 * math.sqrt(p * (1.0 - p) / n)


def two_proportion_p(k1: int, n1: int, k2: int, n2: int) -> float:
    """Two-sided p-value of the pooled two-proportion z-test."""
    if n1 <= 0 or n2 <= 0:
        return 1.0
    pooled = (k1 + k2) / (n1 + n2)
    var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    if var <= 0.0:
        return 1.0
    z = (k1 / n1 - k2 / n2) / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


def fmt_pct(p: float, half: float) -> str:
    return f"{100.0 * p:.1f} ± {100.0 * half:.1f}"


@dataclass(frozen=True)
class Row:
    preset: str
    game_set: str
    runs: int
    wins: int
    losses: int
    early_losses: int

    @property
    def win(self) -> tuple[float, float]:
        return wald(self.wins, self.runs)

    @property
    def early_loss(self) -> tuple[float, float]:
        # share of lost games that ended before the tick cap
        return wald(self.early_losses, self.losses)


@dataclass
class SummaryTable:
    rows: list[Row]

    def get(self, preset: str, game_set: str = TOTAL) -> Row:
        for r in self.rows:
            if r.preset == preset and r.game_set == game_set:
                return r
        raise KeyError((preset, game_set))

    @property
    def presets(self) -> list[str]:
        return list(dict.fromkeys(r.preset for r in self.rows))

    @property
    def game_sets(self) -> list[str]:
        return list(dict.fromkeys(r.game_set for r in self.rows))

    def markdown(self) -> str:
        out = ["| preset | set | runs | win % | early-loss % |", "|---|---|---:|---:|---:|"]
        for r in self.rows:
            out.append(f"| {r.preset} | {r.game_set} | {r.runs} | {fmt_pct(*r.win)} | {fmt_pct(*r.early_loss)} |")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["preset", "set", "runs", "wins", "win_pct", "win_ci", "losses", "early_losses",
                    "early_loss_pct", "early_loss_ci"])
        for r in self.rows:
            p, h = r.win
            ep, eh = r.early_loss
            w.writerow([r.preset, r.game_set, r.runs, r.wins, f"{100 * p:.2f}", f"{100 * h:.2f}",
                        r.losses, r.early_losses, f"{100 * ep:.2f}", f"{100 * eh:.2f}"])
        return buf.getvalue()


def _field(rec, name):
    return rec[name] if isinstance(rec, Mapping) else getattr(rec, name)


def summarize(records: Iterable, sets: Mapping[str, str] | None = None) -> SummaryTable:
    """Aggregate run records per (preset, game set) plus a total row per preset.

    ``sets`` maps game name to set name; by default each game is its own set.
    Rows keep the order in which presets and sets first appear.
    """
    sets = sets or {}
    counts: dict[tuple[str, str], list[int]] = {}
    order_p: list[str] = []
    order_s: list[str] = []
    for rec in records:
        preset = _field(rec, "preset")
        game = _field(rec, "game")
        gs = sets.get(game, game)
        if preset not in order_p:
            order_p.append(preset)
        if gs not in order_s:
            order_s.append(gs)
        outcome = _field(rec, "outcome")
        early = outcome == "loss" and int(_field(rec, "ticks")) < int(_field(rec, "tick_cap"))
        for key in ((preset, gs), (preset, TOTAL)):
            c = counts.setdefault(key, [0, 0, 0, 0])
            c[0] += 1
            c[1] += outcome == "win"
            c[2] += outcome == "loss"
            c[3] += early
    if not counts:
        raise ValueError("no records to summarize")
    rows = []
    for p in order_p:
        for s in order_s + [TOTAL]:
            c = counts.get((p, s))
            if c is not None:
                rows.append(Row(p, s, *c))
    return SummaryTable(rows)


@dataclass(frozen=True)
class Comparison:
    game_set: str
    metric: str
    a: tuple[int, int]
    b: tuple[int, int]

    @property
    def delta(self) -> float:
        return wald(*self.b)[0] - wald(*self.a)[0]

    @property
    def overlap(self) -> bool:
        pa, ha = wald(*self.a)
        pb, hb = wald(*self.b)
        return not (pa + ha < pb - hb or pb + hb < pa - ha)

    @property
    def p_value(self) -> float:
        return two_proportion_p(*self.a, *self.b)

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def compare(table: SummaryTable, preset_a: str, preset_b: str, metric: str = "win") -> list[Comparison]:
    """Per-set and total comparison of ``preset_b`` against ``preset_a``; deltas are b - a."""
    if preset_a not in table.presets or preset_b not in table.presets:
        raise KeyError(f"both presets must be present, have {table.presets}")
    out = []
    for gs in table.game_sets:
        try:
            ra, rb = table.get(preset_a, gs), table.get(preset_b, gs)
        except KeyError:
            continue
        if metric == "win":
            out.append(Comparison(gs, metric, (ra.wins, ra.runs), (rb.wins, rb.runs)))
        else:
            out.append(Comparison(gs, metric, (ra.early_losses, ra.losses), (rb.early_losses, rb.losses)))
    return out


def render_comparison(rows: Sequence[Comparison], preset_a: str, preset_b: str) -> str:
    out = [f"| set | {preset_a} | {preset_b} | delta | CIs overlap | p |", "|---|---:|---:|---:|:---:|---:|"]
    for c in rows:
        out.append(f"| {c.game_set} | {fmt_pct(*wald(*c.a))} | {fmt_pct(*wald(*c.b))} | "
                   f"{100 * c.delta:+.1f} | {'yes' if c.overlap else 'no'} | {c.p_value:.4f} |")
    return "\n".join(out) + "\n"
