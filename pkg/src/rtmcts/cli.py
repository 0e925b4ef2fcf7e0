"""Command line entry point: run, summarize, compare, play, latency, acceptance."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from rtmcts.games import suite
from rtmcts.harness.experiment import (ExperimentConfig, ProgressPrinter, play_episode, read_records_csv,
                                       run_experiment, write_outputs)
from rtmcts.harness.stats import compare, render_comparison, summarize
from rtmcts.mcts import Budget


def _cmd_run(args) -> int:
    if args.config:
        from rtmcts.harness.config import load_config
        cfg = load_config(args.config)
    else:
        cfg = ExperimentConfig(games=list(suite("default")))
    kw = {}
    if args.preset:
        kw["presets"] = args.preset
    if args.suite:
        kw["games"] = list(suite(args.suite))
    if args.budget:
        kw["budget"] = Budget.parse(args.budget)
    if args.startup_budget:
        kw["startup_budget"] = Budget.parse(args.startup_budget)
    for key in ("seed", "jobs", "levels", "repetitions"):
        if getattr(args, key) is not None:
            kw[key] = getattr(args, key)
    if args.out:
        kw["out"] = Path(args.out)
    cfg = replace(cfg, **kw)
    if cfg.out is None:
        cfg = replace(cfg, out=Path("results"))
    records = run_experiment(cfg, ProgressPrinter(every=args.progress_every))
    write_outputs(records, cfg.out, cfg.sets)
    summary = cfg.out / "summary.md"
    if summary.exists():
        sys.stdout.write(summary.read_text(encoding="utf-8"))
    errors = sum(r.outcome == "error" for r in records)
    if errors:
        print(f"{errors} cells failed; see the log", file=sys.stderr)
    return 0


def _cmd_summarize(args) -> int:
    table = summarize(read_records_csv(args.records))
    sys.stdout.write(table.csv() if args.csv else table.markdown())
    return 0


def _cmd_compare(args) -> int:
    table = summarize(read_records_csv(args.records))
    rows = compare(table, args.a, args.b, args.metric)
    sys.stdout.write(render_comparison(rows, args.a, args.b))
    return 0


def _cmd_play(args) -> int:
    dump = open(args.kb_dump, "w", encoding="utf-8") if args.kb_dump else None

    def on_tick(state, agent):
        if dump is not None and agent.kb is not None:
            dump.write(f"# tick {state.tick}\n{agent.kb.dump()}\n")

    try:
        state, agent = play_episode(args.game, args.level, args.preset, args.seed, Budget.parse(args.budget),
                                    Budget.parse(args.startup_budget), on_tick=on_tick)
    finally:
        if dump is not None:
            dump.close()
    verdict = agent.verdict.classification if agent.verdict else "-"
    print(f"{args.game} level {args.level} {args.preset}: {state.status} score {state.score:g} "
          f"ticks {state.tick} verdict {verdict} sims/tick {agent.mean_simulations():.1f}")
    return 0


def _cmd_latency(args) -> int:
    from rtmcts.harness.latency import measure_latency
    report = measure_latency(list(suite(args.suite)), args.preset, Budget.parse(args.budget),
                             levels=args.levels, repetitions=args.repetitions, seed=args.seed)
    print(report.render())
    return 0 if report.compliant else 1


def _cmd_acceptance(args) -> int:
    from rtmcts.harness.acceptance import run_directional
    report = run_directional(Path(args.out), jobs=args.jobs, seed=args.seed)
    print(report.render())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtmcts", description="Real-time open-loop MCTS agents and benchmark harness")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment grid")
    r.add_argument("--config", help="INI experiment file")
    r.add_argument("--preset", nargs="+", help="agent presets, e.g. vanilla all tr@0.4")
    r.add_argument("--suite", help="suite name or comma-separated games")
    r.add_argument("--budget", help="ms:N or sims:N per tick")
    r.add_argument("--startup-budget", help="ms:N or sims:N before the first tick")
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int)
    r.add_argument("--levels", type=int)
    r.add_argument("--repetitions", type=int)
    r.add_argument("--out", help="output directory (journal, records.csv, summary.*)")
    r.add_argument("--progress-every", type=int, default=10)
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("summarize", help="win-rate table from records.csv")
    s.add_argument("records")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=_cmd_summarize)

    c = sub.add_parser("compare", help="compare two presets from records.csv")
    c.add_argument("records")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--metric", choices=("win", "early-loss"), default="win")
    c.set_defaults(func=_cmd_compare)

    g = sub.add_parser("play", help="play a single episode")
    g.add_argument("game")
    g.add_argument("--level", type=int, default=0)
    g.add_argument("--preset", default="all")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", default="ms:40")
    g.add_argument("--startup-budget", default="ms:1000")
    g.add_argument("--kb-dump", help="write the knowledge weight table after every tick to this file")
    g.set_defaults(func=_cmd_play)

    lat = sub.add_parser("latency", help="measure decision latency under a wall-clock budget")
    lat.add_argument("--suite", default="default")
    lat.add_argument("--preset", default="all")
    lat.add_argument("--budget", default="ms:40")
    lat.add_argument("--levels", type=int, default=1)
    lat.add_argument("--repetitions", type=int, default=2)
    lat.add_argument("--seed", type=int, default=1)
    lat.set_defaults(func=_cmd_latency)

    a = sub.add_parser("acceptance", help="run the directional comparison experiments")
    a.add_argument("--out", default="results/acceptance")
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--seed", type=int, default=1)
    a.set_defaults(func=_cmd_acceptance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
