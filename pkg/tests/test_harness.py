import hashlib
import json
from dataclasses import replace

import pytest

from rtmcts.cli import main
from rtmcts.games import SUITE
from rtmcts.harness import experiment as exp
from rtmcts.harness.config import load_config
from rtmcts.harness.experiment import (ExperimentConfig, RunRecord, cell_seed, cells, read_records_csv,
                                       records_csv, run_experiment, write_outputs)
from rtmcts.harness.latency import LatencyReport, percentile
from rtmcts.harness.stats import Row, SummaryTable, compare, fmt_pct, summarize, two_proportion_p, wald
from rtmcts.mcts import Budget

TINY = dict(games=["keysdoors", "butterflies"], levels=2, repetitions=2, presets=["vanilla", "bfti"],
            budget=Budget("sims", 8), seed=5)


def rec(preset, outcome, ticks=10, cap=100, game="g"):
    return RunRecord(game, 0, 0, preset, 0, outcome, 0.0, ticks, cap, "", 1.0)


def test_seed_derivation_is_documented_hash():
    want = int.from_bytes(hashlib.blake2b(b"7|maze|2|3|all", digest_size=8).digest(), "big")
    assert cell_seed(7, "maze", 2, 3, "all") == want
    assert cell_seed(7, "maze", 2, 3, "all") != cell_seed(7, "maze", 2, 4, "all")


def test_cell_counting():
    cfg = ExperimentConfig(presets=["vanilla", "all"], games=list(SUITE), levels=5, repetitions=15)
    all_cells = list(cells(cfg))
    assert sum(c.preset == "vanilla" for c in all_cells) == 600
    assert len({c.key for c in all_cells}) == 1200


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(repetitions=0)
    with pytest.raises(KeyError):
        ExperimentConfig(presets=["nope"])
    with pytest.raises(ValueError):
        ExperimentConfig(games=["maze"], levels=9).validate_games()


def test_single_cell():
    cfg = ExperimentConfig(presets=["vanilla"], games=["maze"], levels=1, repetitions=1, budget=Budget("sims", 5))
    records = run_experiment(cfg)
    assert len(records) == 1
    r = records[0]
    assert r.ticks <= r.tick_cap and r.outcome in ("win", "loss") and r.mean_simulations == 5


def test_reproducible_and_parallel_equals_serial(tmp_path):
    a = run_experiment(ExperimentConfig(**TINY))
    b = run_experiment(ExperimentConfig(**TINY))
    c = run_experiment(ExperimentConfig(**TINY, jobs=2))
    assert a == b == c
    assert summarize(a).markdown() == summarize(c).markdown()


def test_resume_from_journal(tmp_path):
    cfg = ExperimentConfig(**TINY, out=tmp_path)
    full = run_experiment(cfg)
    journal = tmp_path / exp.JOURNAL
    lines = journal.read_text().splitlines()
    # simulate an interruption: keep half the records and a torn final line
    journal.write_text("\n".join(lines[:4]) + "\n" + lines[4][:20])
    seen = []
    resumed = run_experiment(cfg, progress=lambda done, total, r: seen.append(r.key))
    assert resumed == full
    assert len(seen) == len(full) - 4


def test_journal_ignores_foreign_seeds(tmp_path):
    cfg = ExperimentConfig(**TINY, out=tmp_path)
    run_experiment(cfg)
    other = replace(cfg, seed=6)
    ran = []
    run_experiment(other, progress=lambda d, t, r: ran.append(r))
    assert len(ran) == len(list(cells(other)))


def test_records_csv_roundtrip(tmp_path):
    records = run_experiment(ExperimentConfig(**TINY))
    path = tmp_path / "records.csv"
    path.write_text(records_csv(records))
    assert read_records_csv(path) == records
    assert path.read_text().splitlines()[0] == ",".join(exp.HEADER)


def test_outputs_written(tmp_path):
    records = run_experiment(ExperimentConfig(**TINY))
    write_outputs(records, tmp_path)
    assert {p.name for p in tmp_path.iterdir()} == {"records.csv", "summary.md", "summary.csv"}


def test_engine_error_aborts_only_its_cell(monkeypatch):
    real = exp.play_episode

    def flaky(game, level, *a, **k):
        if level == 1:
            raise exp.EngineError("boom")
        return real(game, level, *a, **k)

    monkeypatch.setattr(exp, "play_episode", flaky)
    records = run_experiment(ExperimentConfig(**TINY))
    errs = [r for r in records if r.outcome == "error"]
    assert errs and all(r.level == 1 and "boom" in r.error for r in errs)
    assert len(records) - len(errs) == len([r for r in records if r.level == 0])


def test_wald_examples():
    assert fmt_pct(*wald(300, 750)) == "40.0 ± 3.5"
    assert fmt_pct(*wald(0, 40)) == "0.0 ± 0.0"
    assert wald(0, 0) == (0.0, 0.0)


def test_summary_rows_and_zero_early_losses():
    records = [rec("a", "win"), rec("a", "loss", ticks=100), rec("b", "loss", ticks=5), rec("b", "win")]
    table = summarize(records)
    a = table.get("a")
    assert (a.runs, a.wins, a.losses, a.early_losses) == (2, 1, 1, 0)
    assert "| a | total | 2 | 50.0 ± 69.3 | 0.0 ± 0.0 |" in table.markdown()
    assert table.get("b").early_losses == 1
    header = table.csv().splitlines()[0]
    assert header.startswith("preset,set,runs,wins,win_pct,win_ci")


def test_named_sets():
    records = [rec("a", "win", game="x"), rec("a", "loss", game="y"), rec("a", "win", game="z")]
    table = summarize(records, {"x": "pair", "y": "pair"})
    assert table.game_sets == ["pair", "z", "total"]
    assert table.get("a", "pair").runs == 2


def test_compare_identical():
    records = [rec("a", "win"), rec("a", "loss"), rec("b", "win"), rec("b", "loss")]
    total = [c for c in compare(summarize(records), "a", "b") if c.game_set == "total"][0]
    assert total.delta == 0 and not total.significant() and total.overlap


def _table(ka, kb, n):
    return SummaryTable([Row("a", "total", n, ka, n - ka, 0), Row("b", "total", n, kb, n - kb, 0)])


def test_compare_large_gap():
    c = compare(_table(1395, 2178, 4500), "a", "b")[0]
    assert not c.overlap and c.p_value < 1e-10 and c.delta == pytest.approx(0.174)


def test_compare_small_gap():
    c = compare(_table(40, 41, 100), "a", "b")[0]
    assert c.overlap and not c.significant()
    assert c.p_value == pytest.approx(two_proportion_p(40, 100, 41, 100))
    assert 0.88 < c.p_value < 0.89


def test_compare_requires_both_presets():
    with pytest.raises(KeyError):
        compare(_table(1, 2, 10), "a", "c")


def test_ini_config(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("[experiment]\npresets = vanilla, tr@0.4\nsuite = deterministic\nlevels = 2\n"
                    "repetitions = 3\nbudget = sims:50\nseed = 9\njobs = 2\nout = res\n"
                    "[search]\nexploration = 1.0\nplayout_depth = 6\n[sets]\npuzzles = maze, keysdoors\n")
    cfg = load_config(path)
    assert cfg.presets == ["vanilla", "tr@0.4"] and cfg.games == ["maze", "keysdoors"]
    assert (cfg.levels, cfg.repetitions, cfg.seed, cfg.jobs) == (2, 3, 9, 2)
    assert cfg.budget == Budget("sims", 50)
    assert cfg.search.exploration == 1.0 and cfg.search.playout_depth == 6
    assert cfg.sets == {"maze": "puzzles", "keysdoors": "puzzles"}
    path.write_text("[search]\nbudget = ms:3\n")
    with pytest.raises(ValueError):
        load_config(path)


def test_cli_run_summarize_compare(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "--preset", "vanilla", "bfti", "--suite", "maze", "--levels", "1", "--repetitions", "2",
                 "--budget", "sims:5", "--seed", "3", "--out", str(out)]) == 0
    assert (out / "summary.md").exists() and (out / exp.JOURNAL).exists()
    capsys.readouterr()
    main(["summarize", str(out / "records.csv")])
    assert "| vanilla | maze |" in capsys.readouterr().out
    main(["compare", str(out / "records.csv"), "vanilla", "bfti"])
    assert "| total |" in capsys.readouterr().out


def test_cli_play_with_kb_dump(tmp_path, capsys):
    dump = tmp_path / "kb.tsv"
    main(["play", "maze", "--preset", "kbe", "--budget", "sims:10", "--startup-budget", "sims:0",
          "--kb-dump", str(dump)])
    assert "maze level 0 kbe" in capsys.readouterr().out
    text = dump.read_text()
    assert text.startswith("# tick 1\ntype\tcategory\tweight")


def test_percentile_and_latency_report():
    assert percentile([5.0, 1.0, 3.0, 2.0, 4.0], 99) == 5.0
    assert percentile(list(range(1, 101)), 99) == 99
    rep = LatencyReport(40.0, [41.0, 39.0], [42.0, 40.5], 1)
    assert rep.compliant and rep.p99_excess_ms < 0
    rep = LatencyReport(40.0, [50.0], [41.0], 1)
    assert not rep.compliant
