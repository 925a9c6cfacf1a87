"""Seeded experiment sweeps over random square games, scaling fits and reports.

Every trial draws its game from ``derive_seed(seed, n, trial)`` and reuses
that seed for the greedy coin flips and the ascent restarts, so a sweep is a
pure function of its arguments.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import classical, quantum
from .errors import GuardError
from .game import derive_seed, gen_bernoulli

CSV_COLUMNS = [
    "n", "trial", "seed",
    "classical_exact", "classical_greedy",
    "quantum_lb", "quantum_ub",
    "ratio", "ratio_basis",
]


@dataclass(frozen=True)
class SweepRecord:
    n: int
    trial: int
    seed: int
    classical_exact: int | None = None
    classical_greedy: int | None = None
    quantum_lb: float | None = None
    quantum_ub: float | None = None
    ratio: float | None = None
    ratio_basis: str | None = None


@dataclass(frozen=True)
class SweepOptions:
    exact: bool = True
    greedy: bool = True
    quantum: bool = True
    restarts: int = 3
    d: int | None = None
    threads: int | None = None


def run_trial(n: int, trial: int, seed: int, opts: SweepOptions = SweepOptions()) -> SweepRecord:
    tseed = derive_seed(seed, n, trial)
    game = gen_bernoulli(n, n, tseed)
    exact = greedy = lb = ub = None
    if opts.exact and n <= classical.EXACT_MAX_SIDE:
        exact = classical.exact_value(game, threads=opts.threads).raw
    if opts.greedy:
        greedy = classical.greedy_value(game, tseed).raw
    if opts.quantum:
        qb = quantum.alternating_ascent(game, d=opts.d, restarts=opts.restarts, seed=tseed)
        lb, ub = qb.lower_raw, qb.upper_raw
    ratio = basis = None
    if lb is not None:
        if exact:
            ratio, basis = lb / exact, "exact"
        elif exact is None and greedy:
            ratio, basis = lb / greedy, "greedy"
    return SweepRecord(n, trial, tseed, exact, greedy, lb, ub, ratio, basis)


def sweep(n_list, trials: int, seed: int, opts: SweepOptions = SweepOptions()) -> list[SweepRecord]:
    """One record per ``(n, trial)``, ordered by ``n`` as given and then trial index."""
    if trials < 1:
        raise ValueError("trials must be positive")
    return [run_trial(n, t, seed, opts) for n in n_list for t in range(trials)]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])


def write_json(records, fh) -> None:
    rows = []
    for r in records:
        row = asdict(r)
        for key, val in row.items():
            if isinstance(val, float):
                row[key] = float(f"{val:.12g}")
        rows.append(row)
    json.dump(rows, fh, indent=1)
    fh.write("\n")


def read_csv(fh) -> list[SweepRecord]:
    types = {f.name: f.type for f in fields(SweepRecord)}
    out = []
    for row in csv.DictReader(fh):
        kw = {}
        for key in CSV_COLUMNS:
            val = row.get(key, "")
            if val == "":
                kw[key] = None
            elif key == "ratio_basis":
                kw[key] = val
            elif types[key].startswith("int"):
                kw[key] = int(val)
            else:
                kw[key] = float(val)
        out.append(SweepRecord(**kw))
    return out


@dataclass(frozen=True)
class ScaledStats:
    n: int
    count: int
    mean: float
    median: float
    max: float


def scaled_stats(records, column: str = "classical_exact") -> list[ScaledStats]:
    """Mean, median and max of ``value / n**1.5`` per ``n``."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        val = getattr(r, column)
        if val is not None:
            by_n.setdefault(r.n, []).append(val / r.n ** 1.5)
    return [
        ScaledStats(n, len(v), statistics.fmean(v), statistics.median(v), max(v))
        for n, v in sorted(by_n.items())
    ]


def mean_points(records, column: str = "classical_exact") -> list[tuple[int, float]]:
    by_n: dict[int, list[float]] = {}
    for r in records:
        val = getattr(r, column)
        if val is not None:
            by_n.setdefault(r.n, []).append(val)
    return [(n, statistics.fmean(v)) for n, v in sorted(by_n.items())]


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    residual: float

    @property
    def ratio(self) -> float:
        """Quantum-to-classical ratio ``2 / a`` implied by the entangled value ``2 n**1.5``."""
        return 2 / self.a


def fit_scaling(points) -> FitResult:
    """Least-squares fit of ``y ~ a n**1.5 + b n`` via the 2x2 normal equations."""
    ns = sorted({float(n) for n, _ in points})
    if len(ns) < 2:
        raise ValueError("need at least two distinct n")
    s33 = s32 = s22 = y3 = y2 = 0.0
    for n, y in points:
        x3, x2 = n ** 1.5, float(n)
        s33 += x3 * x3
        s32 += x3 * x2
        s22 += x2 * x2
        y3 += x3 * y
        y2 += x2 * y
    det = s33 * s22 - s32 * s32
    a = (y3 * s22 - y2 * s32) / det
    b = (s33 * y2 - s32 * y3) / det
    resid = math.sqrt(math.fsum((y - a * n ** 1.5 - b * n) ** 2 for n, y in points))
    return FitResult(a, b, resid)


@dataclass(frozen=True)
class ConcentrationReport:
    n: int
    trials: int
    mean: float
    std: float
    beyond_4n: int
    beyond_8n: int
    azuma_bound_4n: float

    @property
    def envelope_ok(self) -> bool:
        return self.beyond_4n / self.trials < self.azuma_bound_4n


def concentration_report(n: int, trials: int, seed: int, threads: int | None = None) -> ConcentrationReport:
    """Spread of the exact classical value over random ``n x n`` games.

    Flipping one entry moves the value by at most 2, so Azuma's inequality
    gives ``Pr[|X - E X| >= a n] < 2 exp(-a^2 / 8)``; at ``a = 4`` that is
    ``2 e^-2 ~ 0.27``. Deviations are measured from the sample mean.
    """
    if n > 20:
        raise GuardError("concentration report uses exact values and is limited to n <= 20")
    if trials < 1:
        raise ValueError("trials must be positive")
    xs = np.array([
        classical.exact_value(gen_bernoulli(n, n, derive_seed(seed, n, t)), threads=threads).raw
        for t in range(trials)
    ], dtype=float)
    mean = float(xs.mean())
    std = float(xs.std(ddof=1)) if trials > 1 else 0.0
    dev = np.abs(xs - mean)
    return ConcentrationReport(
        n, trials, mean, std,
        int(np.count_nonzero(dev >= 4 * n)),
        int(np.count_nonzero(dev >= 8 * n)),
        2 * math.exp(-2),
    )
