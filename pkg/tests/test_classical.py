import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgames.classical import (
    Method,
    _block_start,
    _scan_block,
    brute_force_oracle,
    chernoff_constant,
    chernoff_threshold,
    exact_value,
    gray,
    greedy_value,
    signs_from_gray,
)
from xorgames.errors import GuardError
from xorgames.game import XorGame, chsh, evaluate_sign, gen_bernoulli

small = st.integers(min_value=1, max_value=6)


def test_exact_all_ones():
    assert exact_value(XorGame(np.ones((3, 3)))).raw == 9


def test_exact_chsh():
    res = exact_value(chsh())
    assert res.raw == 2
    assert res.value.delta == 0.5
    assert res.method is Method.EXACT


def test_oracle_examples():
    res = brute_force_oracle(XorGame([[-1]]))
    assert res.raw == 1
    assert res.strategy.u[0] * res.strategy.v[0] == -1
    assert brute_force_oracle(XorGame(np.ones((2, 2)))).raw == 4
    assert brute_force_oracle(chsh()).raw == 2


def test_chsh_by_hand_enumeration():
    a = chsh().entries
    vals = [
        sum(a[i, j] * u[i] * v[j] for i in range(2) for j in range(2))
        for u in itertools.product((1, -1), repeat=2)
        for v in itertools.product((1, -1), repeat=2)
    ]
    assert max(vals) == 2


def test_guards():
    with pytest.raises(GuardError):
        exact_value(gen_bernoulli(31, 31, 0))
    with pytest.raises(GuardError):
        brute_force_oracle(gen_bernoulli(12, 13, 0))


def test_exact_rectangular_guard_uses_smaller_side():
    g = gen_bernoulli(3, 200, 5)
    res = exact_value(g)
    assert res.raw == evaluate_sign(g, res.strategy).raw
    assert res.raw == exact_value(g.transpose()).raw


@pytest.mark.parametrize("seed", range(200))
def test_exact_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n, k = rng.integers(1, 7, size=2)
    g = gen_bernoulli(int(n), int(k), seed)
    assert exact_value(g).raw == brute_force_oracle(g).raw


@settings(max_examples=40, deadline=None)
@given(small, small, st.integers(0, 2**63))
def test_exact_strategy_reproduces_value(n, k, seed):
    g = gen_bernoulli(n, k, seed)
    res = exact_value(g)
    assert evaluate_sign(g, res.strategy).raw == res.raw


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**63))
def test_exact_transpose_invariant(n, k, seed):
    g = gen_bernoulli(n, k, seed)
    assert exact_value(g).raw == exact_value(g.transpose()).raw


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**63), st.integers(0, 2**63))
def test_exact_dominates_greedy(n, seed, gseed):
    g = gen_bernoulli(n, n, seed)
    assert exact_value(g).raw >= greedy_value(g, gseed).raw


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 14), st.integers(1, 14), st.integers(0, 2**63))
def test_exact_beats_all_ones_row_choice(n, k, seed):
    g = gen_bernoulli(n, k, seed)
    a = g.entries.astype(int)
    assert exact_value(g).raw >= np.abs(a.sum(axis=0)).sum()
    assert exact_value(g).raw >= np.abs(a.sum(axis=1)).sum()


def test_thread_count_does_not_change_result():
    g = gen_bernoulli(22, 22, 3)
    a = exact_value(g, threads=1)
    b = exact_value(g, threads=4)
    assert a.raw == b.raw
    assert np.array_equal(a.strategy.u, b.strategy.u)


def test_gray_sequence_flips_one_bit():
    for t in range(1, 1 << 10):
        assert bin(gray(t) ^ gray(t - 1)).count("1") == 1


@pytest.mark.parametrize("seed", range(5))
def test_incremental_sums_match_scratch(seed):
    g = gen_bernoulli(14, 9, seed)
    a = g.entries.astype(np.int32)
    rng = np.random.default_rng(seed)
    total = 1 << 13
    checkpoints = np.sort(rng.choice(np.arange(1, total), size=20, replace=False))
    s, u = _block_start(a, 0)
    prev = 0
    for t in checkpoints:
        # scanning prev..t leaves (s, u) at the state of Gray index t
        _scan_block(2 * a, s, u, prev, int(t) + 1)
        want_u = signs_from_gray(int(t), 14)
        assert np.array_equal(u, want_u)
        assert np.array_equal(s, want_u @ a)
        prev = int(t)


def test_scan_block_reports_block_best():
    g = gen_bernoulli(10, 10, 11)
    a = g.entries.astype(np.int32)
    s, u = _block_start(a, 100)
    best, best_t = _scan_block(2 * a, s, u, 100, 300)
    scratch = [int(np.abs(signs_from_gray(t, 10) @ a).sum()) for t in range(100, 300)]
    assert best == max(scratch)
    assert best_t == 100 + scratch.index(max(scratch))


def test_greedy_hand_traces():
    assert greedy_value(XorGame(np.ones((2, 2))), 0).raw == 4
    res = greedy_value(XorGame([[1, -1], [-1, 1]]), 0)
    assert res.raw == 4
    assert list(res.strategy.u) == [1, -1]


def test_greedy_deterministic_per_seed():
    g = gen_bernoulli(50, 50, 2)
    a, b = greedy_value(g, 8), greedy_value(g, 8)
    assert np.array_equal(a.strategy.u, b.strategy.u)
    assert a.method is Method.GREEDY


def test_greedy_value_is_sum_of_abs_column_sums():
    g = gen_bernoulli(40, 33, 9)
    res = greedy_value(g, 1)
    s = res.strategy.u.astype(int) @ g.entries.astype(int)
    assert res.raw == np.abs(s).sum()
    assert np.all(res.strategy.v * s >= 0)


def test_chernoff_constant():
    assert chernoff_constant(26) == pytest.approx(1.6651092223153954 + 2 * math.sqrt(math.log(26)) / math.sqrt(26))
    assert chernoff_constant(10**16) == pytest.approx(2 * math.sqrt(math.log(2)), abs=1e-6)
    cs = [chernoff_constant(n) for n in range(3, 500)]
    assert all(x > y for x, y in zip(cs, cs[1:]))
    assert chernoff_threshold(26) == pytest.approx(chernoff_constant(26) * 26**1.5)
    with pytest.raises(ValueError):
        chernoff_constant(1)
