"""Classical value of an XOR game: the infinity-to-one norm of its sign matrix.

``exact_value`` enumerates sign vectors for the smaller side in reflected
binary Gray code. Only one sign flips per step, so the column sums
``S_j = sum_i A_ij u_i`` are updated in O(k) and the best response of the
other player is ``v_j = sign(S_j)``, worth ``sum_j |S_j|``. The first sign is
pinned to +1 because ``(u, v)`` and ``(-u, -v)`` score the same, leaving
``2**(m-1)`` states.

The state space is cut into contiguous blocks of Gray-code indices. Each
block recomputes its starting column sums from scratch and is scanned
independently, so blocks can run on separate threads; the winner is the
first block (in index order) holding the maximum, which keeps results
independent of the thread count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import GuardError
from .game import GameValue, SignStrategy, XorGame, evaluate_sign, make_rng

EXACT_MAX_SIDE = 30
ORACLE_MAX_TOTAL = 24
_BLOCK_LOG2 = 20

# The system TBB is too old for numba; try OpenMP first so no warning is raised.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


class Method(str, enum.Enum):
    EXACT = "exact"
    GREEDY = "greedy"
    ORACLE = "oracle"


@dataclass(frozen=True)
class ClassicalResult:
    strategy: SignStrategy
    value: GameValue
    method: Method

    @property
    def raw(self) -> int:
        return self.value.raw


def gray(t: int) -> int:
    return t ^ (t >> 1)


def signs_from_gray(t: int, m: int) -> np.ndarray:
    """Sign vector at Gray index ``t``: ``u[0] = +1``, ``u[i+1] = -1`` iff bit ``i`` of ``gray(t)``."""
    g = gray(t)
    u = np.ones(m, dtype=np.int32)
    for i in range(m - 1):
        if (g >> i) & 1:
            u[i + 1] = -1
    return u


@numba.njit(cache=True)
def _scan_block(a2, s, u, start, stop):
    """Scan Gray indices ``start..stop-1``; ``s`` and ``u`` hold the state at ``start``.

    ``s`` and ``u`` are updated in place to the state at ``stop - 1``.
    Returns the best total and its Gray index.
    """
    k = a2.shape[1]
    best = 0
    for j in range(k):
        best += abs(s[j])
    best_t = start
    for t in range(start + 1, stop):
        x = t
        b = 0
        while (x & 1) == 0:
            x >>= 1
            b += 1
        i = b + 1
        sign = u[i]
        u[i] = -sign
        row = a2[i]
        tot = 0
        if sign > 0:
            for j in range(k):
                val = s[j] - row[j]
                s[j] = val
                tot += abs(val)
        else:
            for j in range(k):
                val = s[j] + row[j]
                s[j] = val
                tot += abs(val)
        if tot > best:
            best = tot
            best_t = t
    return best, best_t


@numba.njit(cache=True)
def _block_start(a, start):
    m, k = a.shape
    g = start ^ (start >> 1)
    u = np.ones(m, dtype=np.int32)
    for i in range(m - 1):
        if (g >> i) & 1:
            u[i + 1] = -1
    s = np.zeros(k, dtype=np.int32)
    for i in range(m):
        for j in range(k):
            s[j] += u[i] * a[i, j]
    return s, u


@numba.njit(parallel=True, cache=True)
def _search(a, block_size, nblocks, total):
    a2 = 2 * a
    best = np.zeros(nblocks, dtype=np.int64)
    best_t = np.zeros(nblocks, dtype=np.int64)
    for b in numba.prange(nblocks):
        start = b * block_size
        stop = min(start + block_size, total)
        s, u = _block_start(a, start)
        best[b], best_t[b] = _scan_block(a2, s, u, start, stop)
    return best, best_t


def _best_response(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    s = u.astype(np.int64) @ a.astype(np.int64)
    return np.where(s >= 0, 1, -1).astype(np.int8)


def exact_value(game: XorGame, threads: int | None = None) -> ClassicalResult:
    """Exact ``max_{u,v} sum_ij A_ij u_i v_j`` by Gray-code enumeration over the smaller side."""
    m = min(game.n, game.k)
    if m > EXACT_MAX_SIDE:
        raise GuardError(f"exact enumeration needs min(n, k) <= {EXACT_MAX_SIDE}, got {m}")
    flipped = game.n > game.k
    a = np.ascontiguousarray((game.entries.T if flipped else game.entries).astype(np.int32))
    total = 1 << (m - 1)
    block_size = min(total, 1 << _BLOCK_LOG2)
    nblocks = -(-total // block_size)
    if threads is not None:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    best, best_t = _search(a, block_size, nblocks, total)
    winner = int(np.argmax(best))
    u = signs_from_gray(int(best_t[winner]), m).astype(np.int8)
    v = _best_response(a, u)
    strategy = SignStrategy(v, u) if flipped else SignStrategy(u, v)
    value = evaluate_sign(game, strategy)
    if value.raw != int(best[winner]):
        raise AssertionError(f"Gray-code total {best[winner]} disagrees with evaluation {value.raw}")
    return ClassicalResult(strategy, value, Method.EXACT)


def brute_force_oracle(game: XorGame) -> ClassicalResult:
    """Exhaustive maximum over all ``2**(n+k)`` sign pairs; a test oracle for :func:`exact_value`."""
    n, k = game.shape
    if n + k > ORACLE_MAX_TOTAL:
        raise GuardError(f"brute force needs n + k <= {ORACLE_MAX_TOTAL}, got {n + k}")
    us = _all_signs(n)
    vs = _all_signs(k)
    a = game.entries.astype(np.int64)
    best, best_uv = None, None
    chunk = max(1, (1 << 22) // len(vs))
    for lo in range(0, len(us), chunk):
        vals = us[lo:lo + chunk] @ a @ vs.T
        flat = int(np.argmax(vals))
        i, j = divmod(flat, vals.shape[1])
        if best is None or vals[i, j] > best:
            best, best_uv = int(vals[i, j]), (us[lo + i], vs[j])
    strategy = SignStrategy(*best_uv)
    return ClassicalResult(strategy, evaluate_sign(game, strategy), Method.ORACLE)


def _all_signs(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(m, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int64)


def greedy_value(game: XorGame, seed: int = 0) -> ClassicalResult:
    """Row-by-row greedy strategy.

    Row 1 gets ``u_1 = +1``. Each later row picks the sign under which it
    agrees with the signs of the running column sums in the most positions.
    A zero column sum contributes a fair coin, and so does an exact tie
    between the two choices. Finally every column takes the sign of its
    total (``+1`` on zero), so the value is ``sum_j |S_j|``.
    """
    rng = make_rng(seed)
    a = game.entries.astype(np.int64)
    n = game.n
    u = np.empty(n, dtype=np.int8)
    u[0] = 1
    s = a[0].copy()
    for r in range(1, n):
        z = np.sign(s)
        zeros = z == 0
        nz = int(np.count_nonzero(zeros))
        if nz:
            z[zeros] = 2 * rng.integers(0, 2, size=nz) - 1
        score = int(z @ a[r])
        if score == 0:
            sign = 1 if rng.integers(0, 2) else -1
        else:
            sign = 1 if score > 0 else -1
        u[r] = sign
        s += sign * a[r]
    v = np.where(s >= 0, 1, -1).astype(np.int8)
    strategy = SignStrategy(u, v)
    value = evaluate_sign(game, strategy)
    assert value.raw == int(np.abs(s).sum())
    return ClassicalResult(strategy, value, Method.GREEDY)


def chernoff_constant(n: int) -> float:
    """``2 sqrt(ln 2) + 2 sqrt(ln n) / sqrt(n)``; tends to ``2 sqrt(ln 2) = 1.6651...``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return 2 * math.sqrt(math.log(2)) + 2 * math.sqrt(math.log(n)) / math.sqrt(n)


def chernoff_threshold(n: int) -> float:
    """Chernoff upper bound ``C n**1.5`` on the classical value of a random ``n x n`` game.

    A fixed sign pair scores a sum of ``n**2`` fair +-1 variables, so it
    exceeds ``C n**1.5`` with probability below ``exp(-C**2 n / 2)``, which
    for this ``C`` is at most ``1 / (4**n n**2)``. A union bound over the
    ``4**n`` sign pairs puts the probability that the classical value
    exceeds the threshold below ``1 / n**2``.
    """
    return chernoff_constant(n) * n ** 1.5
