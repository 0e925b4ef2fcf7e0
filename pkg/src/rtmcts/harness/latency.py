"""Wall-clock budget compliance: per-tick decision latency against budget + one simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from rtmcts.harness.experiment import cell_seed, play_episode
from rtmcts.mcts import Budget


def percentile(values: list[float], q: float) -> float:
    """Nearest-rank percentile."""
    if not values:
        return 0.0
    ordered = sorted(values)
    k = max(0, math.ceil(q / 100.0 * len(ordered)) - 1)
    return ordered[k]


@dataclass
class LatencyReport:
    budget_ms: float
    latencies_ms: list[float] = field(default_factory=list)
    allowances_ms: list[float] = field(default_factory=list)  # budget + longest simulation of that tick
    episodes: int = 0

    @property
    def ticks(self) -> int:
        return len(self.latencies_ms)

    @property
    def p99_ms(self) -> float:
        return percentile(self.latencies_ms, 99)

    @property
    def p99_excess_ms(self) -> float:
        """99th percentile of latency minus (budget + that tick's longest simulation)."""
        return percentile([lat - allow for lat, allow in zip(self.latencies_ms, self.allowances_ms)], 99)

    @property
    def p99_simulation_ms(self) -> float:
        return percentile([a - self.budget_ms for a in self.allowances_ms], 99)

    @property
    def compliant(self) -> bool:
        return self.ticks > 0 and self.p99_excess_ms <= 0.0

    def render(self) -> str:
        return (f"episodes {self.episodes} ticks {self.ticks} budget {self.budget_ms:g} ms\n"
                f"p99 latency {self.p99_ms:.2f} ms, p99 longest simulation {self.p99_simulation_ms:.2f} ms\n"
                f"p99 latency - (budget + longest simulation) = {self.p99_excess_ms:+.2f} ms -> "
                f"{'PASS' if self.compliant else 'FAIL'}")


def measure_latency(games: list[str], preset_name: str = "all", budget: Budget = Budget("ms", 40),
                    levels: int = 1, repetitions: int = 2, seed: int = 1,
                    startup_budget: Budget = Budget("ms", 1000)) -> LatencyReport:
    if budget.kind != "ms":
        raise ValueError("latency is only meaningful for wall-clock budgets")
    report = LatencyReport(budget.amount)
    for g in games:
        for level in range(levels):
            for rep in range(repetitions):
                _, agent = play_episode(g, level, preset_name, cell_seed(seed, g, level, rep, preset_name),
                                        budget, startup_budget)
                report.episodes += 1
                for t in agent.log:
                    report.latencies_ms.append(t.seconds * 1000.0)
                    report.allowances_ms.append(budget.amount + t.longest_simulation * 1000.0)
    return report
