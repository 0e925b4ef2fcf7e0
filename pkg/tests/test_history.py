import random
from collections import Counter

import pytest

from rtmcts.engine import Action
from rtmcts.history import ActionHistory, nst_playout_action

L, R, U = Action.LEFT, Action.RIGHT, Action.UP


def test_update_counts_ngrams():
    h = ActionHistory(3)
    traj = [((0, 0), L), ((1, 0), R), ((2, 0), U)]
    h.update(traj, 2.0)
    sizes = Counter(len(k[1]) for k in h.table)
    assert sizes == {1: 3, 2: 2, 3: 1}
    assert h.entry((0, 0), (L, R, U)) == (2.0, 1.0)
    assert h.entry((1, 0), (R, U)) == (2.0, 1.0)


def test_zero_value_raises_counts_only():
    h = ActionHistory(2)
    h.update([((0, 0), L)], 0.0)
    h.update([((0, 0), L)], 0.0)
    assert h.entry((0, 0), (L,)) == (0.0, 2.0)


def test_identical_trajectories_mean_one():
    h = ActionHistory(3)
    traj = [((0, 0), L), ((0, 1), L), ((0, 2), R)]
    h.update(traj, 1.0)
    h.update(traj, 1.0)
    assert all(s / c == 1.0 for s, c in h.table.values())


def test_action_mean_and_decay():
    h = ActionHistory(1)
    h.update([((3, 3), U)], 4.0)
    h.update([((3, 3), U)], 2.0)
    assert h.action_mean((3, 3), U) == 3.0
    assert h.action_mean((3, 3), L) is None
    h.decay(0.5)
    assert h.entry((3, 3), (U,)) == (3.0, 1.0)
    assert h.action_mean((3, 3), U) == 3.0


def test_epsilon_one_is_uniform():
    h = ActionHistory(3)
    h.update([((0, 0), L)] * 3, 100.0)
    rng = random.Random(3)
    counts = Counter(nst_playout_action([L, R, U], (0, 0), [], h, 1.0, 7, rng) for _ in range(6000))
    assert all(1800 < counts[a] < 2200 for a in (L, R, U))


def test_epsilon_one_matches_plain_random():
    h = ActionHistory(3)
    a, b = random.Random(9), random.Random(9)
    picks = [nst_playout_action([L, R, U], None, [], h, 1.0, 7, a) for _ in range(50)]
    assert picks == [[L, R, U][b.randrange(3)] for _ in range(50)]


def test_empty_table_greedy_ties_uniform():
    h = ActionHistory(3)
    rng = random.Random(4)
    counts = Counter(nst_playout_action([L, R, U], (0, 0), [], h, 0.0, 7, rng) for _ in range(3000))
    assert all(850 < counts[a] < 1150 for a in (L, R, U))


def test_greedy_prefers_better_unigram():
    h = ActionHistory(3)
    h.table[((0, 0), (L,))] = [9.0, 10.0]
    h.table[((0, 0), (R,))] = [2.0, 10.0]
    rng = random.Random(0)
    assert all(nst_playout_action([L, R], (0, 0), [], h, 0.0, 7, rng) == L for _ in range(20))


def test_min_count_gate():
    h = ActionHistory(2)
    h.table[((0, 0), (L,))] = [0.6, 6.0]  # below k = 7: ignored, scores 0 like R
    h.table[((0, 0), (R,))] = [-7.0, 7.0]  # counted, mean -1
    rng = random.Random(0)
    assert {nst_playout_action([L, R], (0, 0), [], h, 0.0, 7, rng) for _ in range(20)} == {L}


def test_bigram_uses_previous_step_cell():
    h = ActionHistory(2)
    h.table[((5, 5), (U, R))] = [10.0, 10.0]
    rng = random.Random(0)
    recent = [((5, 5), U)]
    assert nst_playout_action([L, R], (5, 4), recent, h, 0.0, 7, rng) == R


def test_invalid_max_n():
    with pytest.raises(ValueError):
        ActionHistory(0)
