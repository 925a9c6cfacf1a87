"""Biased random walk on the non-negative integers with a reflecting wall at 0.

From 0 the walker always steps to 1; from ``i > 0`` it steps up with
probability ``p = (1 + eps) / 2`` and down otherwise. In the greedy
classical strategy each ``|S_j|`` performs this walk with
``eps ~ sqrt(2 / (pi n))``, so ``E[K_n]`` governs the greedy value.

Expectation bookkeeping: ``E[K_{i+1}] = E[K_i] + eps + (1 - eps) Pr[K_i = 0]``,
hence ``E[K_n] = eps n + (1 - eps) sum_{i<n} Pr[K_i = 0]``.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import spectra
from .errors import GuardError
from .game import make_rng

DP_MAX_STEPS = 100_000
FORMULA_MAX_STEPS = 600
IDENTITY_MAX_M = 25


@dataclass(frozen=True)
class WalkModel:
    n: int
    eps: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")

    @property
    def alpha(self) -> float:
        return self.eps * math.sqrt(self.n)

    @property
    def p(self) -> float:
        return 0.5 + self.eps / 2

    @classmethod
    def from_alpha(cls, n: int, alpha: float) -> WalkModel:
        return cls(n, alpha / math.sqrt(n))

    @classmethod
    def from_greedy(cls, n: int) -> WalkModel:
        """Bias seen by one column in the greedy strategy, taken as exactly ``sqrt(2/(pi n))``.

        The true bias is ``(1 + o(1)) sqrt(2/(pi n))``; the correction is dropped.
        """
        return cls(n, math.sqrt(2 / (math.pi * n)))


@dataclass
class WalkDistribution:
    expectation: float
    zero_visit_sum: float
    zero_probs: np.ndarray  # Pr[K_i = 0], i = 0..n
    expectations: np.ndarray  # E[K_i], i = 0..n
    max_mass_drift: float
    marginals: list = field(default_factory=list)


def dp_distribution(model: WalkModel, keep_marginals: bool = False) -> WalkDistribution:
    """Exact forward recursion over positions, holding two rolling rows."""
    n = model.n
    if n > DP_MAX_STEPS:
        raise GuardError(f"exact walk DP limited to n <= {DP_MAX_STEPS}")
    p, q = model.p, 1 - model.p
    pos = np.arange(n + 1, dtype=float)
    cur = np.zeros(n + 2)
    cur[0] = 1.0
    zero_probs = np.empty(n + 1)
    expectations = np.empty(n + 1)
    marginals = []
    drift = 0.0
    for i in range(n + 1):
        zero_probs[i] = cur[0]
        expectations[i] = float(pos @ cur[: n + 1])
        drift = max(drift, abs(cur.sum() - 1.0))
        if keep_marginals:
            marginals.append(cur[: i + 1].copy())
        if i == n:
            break
        top = i + 1
        nxt = np.zeros_like(cur)
        nxt[1] = cur[0]
        nxt[2 : top + 1] += p * cur[1:top]
        nxt[0 : top - 1] += q * cur[1:top]
        cur = nxt
    return WalkDistribution(
        expectation=float(expectations[n]),
        zero_visit_sum=float(math.fsum(zero_probs[:n])),
        zero_probs=zero_probs,
        expectations=expectations,
        max_mass_drift=drift,
        marginals=marginals,
    )


def simulate(model: WalkModel, seed: int, trials: int) -> float:
    """Monte Carlo mean of ``K_n`` over ``trials`` independent seeded walks."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = make_rng(seed)
    k = np.zeros(trials, dtype=np.int64)
    for _ in range(model.n):
        up = rng.random(trials) < model.p
        k = np.where((k == 0) | up, k + 1, k - 1)
    return float(k.mean())


def erf(x: float) -> float:
    """Error function ``2/sqrt(pi) * integral_0^x exp(-t^2) dt`` (libm, ~1e-16 absolute)."""
    return math.erf(x)


def f_alpha(alpha: float) -> float:
    """Walk lower-bound constant: ``E[K_n] >= (f(alpha) - o(1)) sqrt(n)`` when ``eps = alpha / sqrt(n)``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 0.5 * (
        math.exp(-alpha * alpha / 2) * math.sqrt(2 / math.pi)
        + alpha
        + (1 / alpha + alpha) * erf(alpha / math.sqrt(2))
    )


def _log_binom(s: int, a: int) -> float:
    return math.lgamma(s + 1) - math.lgamma(a + 1) - math.lgamma(s - a + 1)


def zero_visit_formula(n: int, p: float) -> float:
    """``sum_{i=0}^{n-1} Pr[K_i = 0]`` as the double binomial sum over ``(S, A)``.

    Terms are ``(binom(S, A) - binom(S, A-1)) p^A (1-p)^(S-A+1)`` with
    ``0 <= S <= 2h - 2``, ``max(0, S - h + 1) <= A <= S // 2`` and
    ``h = (n - 1) // 2``. The binomial difference equals
    ``binom(S, A) (S - 2A + 1) / (S - A + 1) >= 0``, so each term is formed in
    log space and the terms are added with ``math.fsum``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > FORMULA_MAX_STEPS:
        raise GuardError(f"binomial zero-visit sum limited to n <= {FORMULA_MAX_STEPS}")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    h = (n - 1) // 2
    lp = math.log(p)
    lq = math.log1p(-p) if p < 1 else -math.inf
    terms = [1.0]
    for s in range(0, 2 * h - 1):
        for a in range(max(0, s - h + 1), s // 2 + 1):
            if lq == -math.inf:
                continue
            log_t = (
                _log_binom(s, a)
                + math.log((s - 2 * a + 1) / (s - a + 1))
                + a * lp
                + (s - a + 1) * lq
            )
            terms.append(math.exp(log_t))
    return math.fsum(terms)


def dyck_returns(m: int, t: int) -> int:
    """``T(m, t) = (t/m) binom(2m - t - 1, m - t)``: non-negative length-``2m`` excursions with ``t`` returns to 0."""
    if not 1 <= t <= m:
        return 0
    return t * math.comb(2 * m - t - 1, m - t) // m


def count_paths(m: int, t: int) -> int:
    """Enumerate all +-1 paths of length ``2m`` from 0 to 0 staying >= 0 with ``t`` returns to 0."""
    count = 0
    for steps in itertools.product((1, -1), repeat=2 * m):
        h, returns, ok = 0, 0, True
        for st in steps:
            h += st
            if h < 0:
                ok = False
                break
            if h == 0:
                returns += 1
        if ok and h == 0 and returns == t:
            count += 1
    return count


def pebble_sum(m: int) -> Fraction:
    return sum((Fraction(math.comb(s, m), 2 ** s) for s in range(m, 2 * m + 1)), Fraction(0))


def tail_sum(n: int, p: float) -> float:
    """The second binomial double sum (``S = h..2h-2``, ``A = 0..S-h``); bounded above by 1."""
    h = (n - 1) // 2
    total = []
    for s in range(h, 2 * h - 1):
        for a in range(0, s - h + 1):
            diff = math.comb(s, a) - (math.comb(s, a - 1) if a >= 1 else 0)
            total.append(diff * p ** a * (1 - p) ** (s - a))
    return math.fsum(total)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def identities_suite(m_max: int = 20, n: int = 300, p: float | None = None, path_m: int = 6, binom_s: int = 40) -> list[Check]:
    """Run every combinatorial identity behind the zero-visit sum and its bounds."""
    if m_max > IDENTITY_MAX_M:
        raise GuardError(f"m_max limited to {IDENTITY_MAX_M}")
    if path_m > 8:
        raise GuardError("path enumeration limited to m <= 8")
    if p is None:
        p = WalkModel.from_greedy(n).p
    checks = []

    bad = [(m, t) for m in range(1, path_m + 1) for t in range(1, m + 1) if dyck_returns(m, t) != count_paths(m, t)]
    checks.append(Check("dyck_returns", not bad, f"T(m,t) vs enumeration for m <= {path_m}; mismatches {bad}"))

    bad = []
    for s in range(0, binom_s + 1):
        for a in range(0, s + 1):
            lhs = Fraction(math.comb(s, a) * (s - 2 * a + 1), s - a + 1)
            rhs = math.comb(s, a) - (math.comb(s, a - 1) if a else 0)
            if lhs != rhs:
                bad.append((s, a))
    checks.append(Check("binomial_difference", not bad, f"exact for S <= {binom_s}; mismatches {bad}"))

    exact_bad = [m for m in range(1, m_max + 1) if pebble_sum(m) != 1]
    float_err = max(
        abs(math.fsum(math.comb(s, m) * 2.0 ** -s for s in range(m, 2 * m + 1)) - 1) for m in range(1, m_max + 1)
    )
    checks.append(Check(
        "pebble",
        not exact_bad and float_err <= 1e-12,
        f"sum_S binom(S,m) 2^-S = 1 for m <= {m_max}; exact mismatches {exact_bad}, float error {float_err:.3g}",
    ))

    bad = [m for m in range(1, min(m_max, 12) + 1) if sum(spectra.narayana(m, i) for i in range(m)) != spectra.catalan(m)]
    checks.append(Check("narayana_catalan", not bad, f"for m <= {min(m_max, 12)}; mismatches {bad}"))

    tail = tail_sum(n, p)
    checks.append(Check("tail_below_one", tail < 1, f"n={n}, p={p:.12g}: tail sum {tail:.12g}"))

    if n <= FORMULA_MAX_STEPS:
        formula = zero_visit_formula(n, p)
        dp = dp_distribution(WalkModel(n, 2 * p - 1)).zero_visit_sum
        checks.append(Check(
            "zero_visit_formula",
            abs(formula - dp) <= 1e-9,
            f"n={n}: formula {formula:.15g}, DP {dp:.15g}",
        ))
    return checks


def write_steps_csv(dist: WalkDistribution, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["i", "pr_zero", "expectation"])
    for i, (z, e) in enumerate(zip(dist.zero_probs, dist.expectations)):
        w.writerow([i, f"{z:.12g}", f"{e:.12g}"])
