"""Acceptance gate: one PASS/FAIL line per criterion, printed to the terminal.

The directional experiment journals its cells under ``results/acceptance``; a
first run takes hours on one core, later runs only re-read the journal. Set
RTMCTS_JOBS to run cells in parallel.
"""

import os
import random
import time
from pathlib import Path

import pytest

from oracles import formula_checks
from test_agent import paired_toggle_mismatches
from test_determinism import suite_classification_errors, teleport_detections
from test_novelty import novelty_oracle_mismatches
from test_pathfinder import random_grid, reference_bfs
from rtmcts.games import SUITE
from rtmcts.harness.acceptance import run_directional
from rtmcts.harness.latency import measure_latency
from rtmcts.mcts import Budget
from rtmcts.pathfinder import ObstacleGrid, astar

ROOT = Path(__file__).resolve().parents[1]
RESULTS = Path(os.environ.get("RTMCTS_ACCEPTANCE_DIR", ROOT / "results" / "acceptance"))
JOBS = int(os.environ.get("RTMCTS_JOBS", "1"))


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    return emit


def test_criterion_1_formula_exactness(report):
    start = time.perf_counter()
    checks = formula_checks(n=60, seed=2024)
    elapsed = time.perf_counter() - start
    failed = {k: v[1][:2] for k, v in checks.items() if v[1]}
    ok = not failed and all(n >= 50 for n, _ in checks.values()) and elapsed < 60
    report(1, ok, f"{len(checks)} formulas x 60 random inputs at 10 significant digits, "
                  f"{len(failed)} mismatching, {elapsed:.1f}s")
    assert not failed
    assert elapsed < 60


def test_criterion_2_novelty_oracle(report):
    start = time.perf_counter()
    compared, bad = novelty_oracle_mismatches(searches=100, cap=200, seed=1)
    elapsed = time.perf_counter() - start
    ok = not bad and compared > 0 and elapsed < 300
    report(2, ok, f"100 searches capped at 200 nodes, {compared} tested nodes compared, "
                  f"{len(bad)} mismatches, {elapsed:.1f}s")
    assert bad == []
    assert elapsed < 300


def test_criterion_3_pathfinder_oracle(report):
    start = time.perf_counter()
    rng = random.Random(99)
    grids = mismatches = 0
    while grids < 1000:
        w, h, blocked, free = random_grid(rng, 30, 0.2)
        if not free:
            continue
        start_cell = rng.choice(free)
        goals = rng.sample(free, min(len(free), rng.randint(1, 3)))
        if astar(ObstacleGrid(w, h, frozenset(blocked)), start_cell, goals) != reference_bfs(w, h, blocked, start_cell, goals):
            mismatches += 1
        grids += 1
    elapsed = time.perf_counter() - start
    report(3, mismatches == 0 and elapsed < 60, f"{grids} random grids, {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60


def test_criterion_4_toggle_isolation(report):
    start = time.perf_counter()
    bad = paired_toggle_mismatches(100)
    elapsed = time.perf_counter() - start
    report(4, not bad and elapsed < 300, f"100 paired runs, {len(bad)} differing, {elapsed:.1f}s")
    assert bad == []
    assert elapsed < 300


def test_criterion_5_determinism_detection(report):
    start = time.perf_counter()
    errors = suite_classification_errors(100)
    hits = teleport_detections(100)
    elapsed = time.perf_counter() - start
    correct = 100 * len(SUITE) - len(errors)
    ok = not errors and hits >= 95 and elapsed < 120
    report(5, ok, f"suite {correct}/{100 * len(SUITE)} correct, teleporter detected {hits}/100, {elapsed:.1f}s")
    assert errors == []
    assert hits >= 95
    assert elapsed < 120


@pytest.mark.slow
def test_criterion_6_directional_reproduction(report):
    start = time.perf_counter()
    rep = run_directional(RESULTS, jobs=JOBS)
    elapsed = time.perf_counter() - start
    for check in rep.checks:
        report(6, check.passed, f"{check.name}: {check.detail}")
    (RESULTS / "directional.md").write_text(rep.render() + "\n", encoding="utf-8")
    report(6, rep.passed, f"{sum(c.passed for c in rep.checks)}/{len(rep.checks)} directional checks, "
                          f"{elapsed:.0f}s (journal reuse)")
    assert rep.passed


def test_criterion_7_budget_compliance(report):
    rep = measure_latency(list(SUITE), "all", Budget("ms", 40), levels=5, repetitions=1, seed=7)
    report(7, rep.compliant, f"{rep.ticks} ticks over {rep.episodes} games: p99 latency {rep.p99_ms:.2f} ms, "
                             f"p99 of latency minus (40 ms + longest simulation) {rep.p99_excess_ms:+.2f} ms")
    assert rep.compliant
