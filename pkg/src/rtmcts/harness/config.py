"""INI experiment configuration.

Schema (every key optional)::

    [experiment]
    presets = vanilla, all        ; comma separated preset names, tr@0.4 style allowed
    suite = default               ; default | deterministic | nondeterministic | comma list | game paths
    levels = 5
    repetitions = 15
    budget = sims:100             ; or ms:40
    startup_budget = sims:0
    seed = 1
    jobs = 1
    out = results

    [search]                      ; any SearchConfig field except the budgets
    exploration = 0.6
    playout_depth = 10
    gamma = 0.6

    [sets]                        ; optional grouping of games into named sets
    traffic = frogs, slowcross
"""

from __future__ import annotations

import configparser
from dataclasses import fields, replace
from pathlib import Path

from rtmcts.games import suite
from rtmcts.harness.experiment import ExperimentConfig
from rtmcts.mcts import Budget, SearchConfig


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def search_overrides(section) -> dict:
    types = {f.name: f.type for f in fields(SearchConfig)}
    out = {}
    for key, raw in section.items():
        if key not in types or key in ("budget", "startup_budget"):
            raise ValueError(f"unknown [search] key {key!r}")
        out[key] = int(raw) if types[key] == "int" else float(raw)
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with Path(path).open(encoding="utf-8") as fh:
        parser.read_file(fh)
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    cfg = ExperimentConfig()
    kw: dict = {}
    if "presets" in exp:
        kw["presets"] = _split(exp["presets"])
    kw["games"] = list(suite(exp.get("suite", "default")))
    for key in ("levels", "repetitions", "seed", "jobs"):
        if key in exp:
            kw[key] = int(exp[key])
    for key in ("budget", "startup_budget"):
        if key in exp:
            kw[key] = Budget.parse(exp[key])
    if "out" in exp:
        kw["out"] = Path(exp["out"])
    if parser.has_section("search"):
        kw["search"] = replace(cfg.search, **search_overrides(parser["search"]))
    if parser.has_section("sets"):
        kw["sets"] = {g: name for name, games in parser["sets"].items() for g in _split(games)}
    return replace(cfg, **kw)
