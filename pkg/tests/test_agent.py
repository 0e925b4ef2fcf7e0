import random
from dataclasses import replace

import pytest

from rtmcts.agent import PRESETS, AgentConfig, make_agent, preset
from rtmcts.engine import ONGOING, Action, advance
from rtmcts.games import load_game
from rtmcts.mcts import Budget, SearchConfig

from conftest import make_state, TOY_SPEC

SIMS = Budget("sims", 40)
NONE = Budget("sims", 0)


def play(config, game="frogs", seed=0, level=0, ticks=25):
    g = load_game(game)
    state = g.initial_state(level, seed)
    env = random.Random(seed + 1)
    agent = make_agent(config, seed)
    agent.on_game_start(state, NONE)
    actions = []
    while state.status == ONGOING and len(actions) < ticks:
        a = agent.act(state, SIMS)
        actions.append(a)
        advance(state, a, env)
    return actions, state.serialize(), agent


def paired_toggle_mismatches(pairs=100):
    """Vanilla vs the same run again, and vs an all-toggles-off configuration."""
    games = ("frogs", "butterflies", "shooter", "maze")
    off = AgentConfig(frozenset(), SearchConfig(), "off")
    bad = []
    for i in range(pairs):
        game, seed = games[i % len(games)], 1000 + i
        a = play("vanilla", game, seed, ticks=8)
        b = play("vanilla", game, seed, ticks=8)
        c = play(off, game, seed, ticks=8)
        if not (a[:2] == b[:2] == c[:2]):
            bad.append((game, seed))
    return bad


def test_presets_known():
    assert PRESETS["vanilla"] == frozenset()
    assert PRESETS["all"] == {"PH", "NST", "TR", "BFTI", "LA", "NBP", "KBE", "DGD"}
    with pytest.raises(KeyError):
        preset("turbo")
    with pytest.raises(ValueError):
        AgentConfig(frozenset({"XYZ"}))
    assert preset("tr@0.4").search.gamma == 0.4


def test_vanilla_has_no_probe():
    _, _, agent = play("vanilla", ticks=2)
    assert agent.verdict is None and agent.history is None and agent.kb is None


def test_all_preset_on_maze_is_deterministic():
    _, _, agent = play("all", "maze", ticks=2)
    assert agent.verdict.deterministic
    assert agent.mode.gamma == 1.0 and agent.mode.mixmax


def test_zero_startup_budget_starts_fresh():
    _, _, agent = play("all", "frogs", ticks=1)
    assert agent.log[0].simulations == SIMS.amount


def test_all_preset_reproducible():
    assert play("all", "shooter", 7)[:2] == play("all", "shooter", 7)[:2]


def test_toggle_isolation_sample():
    assert paired_toggle_mismatches(8) == []


def test_neutral_history_matches_vanilla():
    # play-outs fully random and zero history weight: same trees as vanilla
    search = replace(SearchConfig(), nst_epsilon=1.0, ph_weight=0.0)
    neutral = AgentConfig(frozenset({"PH", "NST"}), search, "neutral")
    for seed in range(4):
        assert play(neutral, "butterflies", seed, ticks=10)[:2] == play("vanilla", "butterflies", seed, ticks=10)[:2]


def test_bfti_avoids_the_only_loss_with_one_simulation():
    s = make_state(TOY_SPEC, "ttt\ntAt\n...\n")
    agent = make_agent("bfti", 0)
    agent.on_game_start(s, NONE)
    # up, left and right walk into traps; only down and nil survive
    assert agent.act(s, Budget("sims", 1)) in (Action.DOWN, Action.NIL)
    assert agent.last_result.children and {c.action for c in agent.last_result.children if c.pruned} == {
        Action.UP, Action.LEFT, Action.RIGHT}


def test_tree_reuse_carries_decayed_child():
    s = load_game("butterflies").initial_state(0, 3)
    agent = make_agent("tr", 5)
    agent.on_game_start(s, NONE)
    a = agent.act(s, SIMS)
    child = agent.root.children[a]
    expected = child.visits * agent.config.search.gamma
    advance(s, a, random.Random(0))
    agent.act(s, Budget("sims", 0))
    assert agent.root is child
    assert child.visits == pytest.approx(expected)


def test_wall_clock_budget():
    s = load_game("frogs").initial_state(0)
    agent = make_agent("all", 0)
    agent.on_game_start(s, Budget("ms", 50))
    agent.act(s, Budget("ms", 30))
    rec = agent.log[-1]
    assert rec.simulations > 0
    assert rec.seconds < 0.030 + rec.longest_simulation + 0.02
