"""Bounds on the entangled value of an XOR game.

The entangled bias is ``max sum_ij A_ij <u_i, v_j> / (n k)`` over unit
vectors. Upper bound: concatenating the vectors gives
``sum_ij A_ij <u_i, v_j> = <u, (A kron I) v> <= ||A|| sqrt(n k)``. Lower
bounds come from feasible strategies: the singular-vector construction in
:func:`mp_construction` and local search by :func:`alternating_ascent`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import spectra
from .errors import DimensionError, GuardError
from .game import VectorStrategy, XorGame, as_matrix, evaluate_vector, make_rng

SPECTRUM_MAX_SIDE = 2000


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class QuantumBounds:
    lower_raw: float
    upper_raw: float
    strategy: VectorStrategy


def power_iteration(game: XorGame, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> PowerIterationResult:
    """Largest singular value by power iteration on the Gram matrix ``A^T A``.

    The estimate is ``sqrt(||A x||^2)`` for the unit iterate ``x``. Iteration
    stops once the relative change of that Rayleigh quotient is below ``tol``
    on two consecutive steps, or after ``max_iter`` steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(game)
    x = make_rng(seed).standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    rho = 0.0
    calm = 0
    for it in range(1, max_iter + 1):
        y = a @ x
        rho_new = float(y @ y)
        z = a.T @ y
        norm = np.linalg.norm(z)
        if norm == 0.0:
            return PowerIterationResult(0.0, it, True)
        x = z / norm
        if abs(rho_new - rho) <= tol * rho_new:
            calm += 1
            if calm == 2:
                return PowerIterationResult(math.sqrt(rho_new), it, True)
        else:
            calm = 0
        rho = rho_new
    return PowerIterationResult(math.sqrt(rho), max_iter, False)


def spectral_norm(game: XorGame, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> float:
    res = power_iteration(game, tol, max_iter, seed)
    if not res.converged:
        warnings.warn(
            f"power iteration did not converge in {max_iter} steps; returning {res.value:.12g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return res.value


@dataclass(frozen=True)
class Spectrum:
    """Singular triples sorted by decreasing value; ``A @ right[:, i] == values[i] * left[:, i]``."""

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        for i in range(len(self.values)):
            yield self.values[i], self.left[:, i], self.right[:, i]


def full_spectrum(game) -> Spectrum:
    """All singular triples via LAPACK's divide-and-conquer SVD."""
    a = as_matrix(game)
    if max(a.shape) > SPECTRUM_MAX_SIDE:
        raise GuardError(f"full spectrum limited to sides <= {SPECTRUM_MAX_SIDE}, got {a.shape}")
    left, values, right_t = np.linalg.svd(a, full_matrices=True)
    return Spectrum(values, left, right_t.T)


@dataclass(frozen=True)
class MPConstruction:
    strategy: VectorStrategy
    selected: int
    threshold: float
    scale: float
    zeroed_u: int
    zeroed_v: int
    u_sq_norms: np.ndarray
    v_sq_norms: np.ndarray

    @property
    def empty(self) -> bool:
        return self.selected == 0


def mp_construction(game, eps: float = 0.2, delta: float = 0.05, spectrum: Spectrum | None = None) -> MPConstruction:
    """Strategy built from the top singular vectors of a square game.

    Keep the triples with ``lambda >= (2 - eps) sqrt(n)``. Question ``j`` of
    player A gets the vector of ``j``-th coordinates of the kept left
    singular vectors, player B likewise from the right ones. Any vector whose
    squared norm exceeds ``f(2 - eps) + delta`` is replaced by zero, and all
    vectors are divided by ``sqrt(f(2 - eps) + delta)`` so they fit in the
    unit ball. ``u_sq_norms``/``v_sq_norms`` record the squared norms before
    clamping; each sums to the number of kept triples.
    """
    if not 0 < eps < 2:
        raise ValueError("eps must lie in (0, 2)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    n, k = as_matrix(game).shape if spectrum is None else (len(spectrum.left), len(spectrum.right))
    if k != n:
        raise DimensionError("the singular-vector construction needs a square game")
    spec = full_spectrum(game) if spectrum is None else spectrum
    threshold = (2 - eps) * math.sqrt(n)
    keep = spec.values >= threshold
    cap = spectra.mp_tail(2 - eps) + delta
    m = int(np.count_nonzero(keep))
    if m == 0:
        zeros = np.zeros(n)
        return MPConstruction(VectorStrategy.zeros(n, n), 0, threshold, cap, 0, 0, zeros, zeros)
    u = spec.left[:, keep].copy()
    v = spec.right[:, keep].copy()
    u_sq = np.sum(u * u, axis=1)
    v_sq = np.sum(v * v, axis=1)
    u[u_sq > cap] = 0.0
    v[v_sq > cap] = 0.0
    scale = 1 / math.sqrt(cap)
    strategy = VectorStrategy(u * scale, v * scale)
    return MPConstruction(
        strategy, m, threshold, cap,
        int(np.count_nonzero(u_sq > cap)), int(np.count_nonzero(v_sq > cap)),
        u_sq, v_sq,
    )


def _normalize_rows(x: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    out = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    dead = norms[:, 0] == 0
    out[dead] = fallback[dead]
    return out


def _ascend(a: np.ndarray, u: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, np.ndarray, float]:
    v = _normalize_rows(a.T @ u, np.eye(1, u.shape[1]).repeat(a.shape[1], axis=0))
    obj = float(np.sum(v * (a.T @ u)))
    for _ in range(max_iter):
        prev = obj
        au = a @ v
        u = _normalize_rows(au, u)
        half = float(np.sum(u * au))
        av = a.T @ u
        v = _normalize_rows(av, v)
        obj = float(np.sum(v * av))
        slack = 1e-12 * max(1.0, abs(prev))
        if half < prev - slack or obj < half - slack:
            raise AssertionError(f"ascent objective decreased: {prev} -> {half} -> {obj}")
        if obj - prev < tol * max(1.0, abs(obj)):
            break
    return u, v, obj


def alternating_ascent(
    game: XorGame,
    d: int | None = None,
    restarts: int = 5,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 10_000,
    upper: float | None = None,
) -> QuantumBounds:
    """Lower-bound the entangled value by block-coordinate ascent on unit vectors.

    Each half-step replaces every ``u_i`` by the normalised ``sum_j A_ij v_j``
    (then every ``v_j`` likewise), which can only raise the objective. A
    restart stops when one full sweep gains less than ``tol`` relative to the
    objective. The best restart is returned along with the upper bound
    ``sigma_max * sqrt(n k)``; pass ``upper`` to reuse a precomputed norm bound.
    """
    if d is None:
        d = min(game.n, 64)
    if d < 1:
        raise ValueError("d must be at least 1")
    if restarts < 1:
        raise ValueError("need at least one restart")
    a = game.entries.astype(float)
    rng = make_rng(seed)
    best = None
    for _ in range(restarts):
        u0 = _normalize_rows(rng.standard_normal((game.n, d)), np.eye(1, d).repeat(game.n, axis=0))
        u, v, obj = _ascend(a, u0, tol, max_iter)
        if best is None or obj > best[2]:
            best = (u, v, obj)
    u, v, _ = best
    strategy = VectorStrategy(u, v)
    lower = evaluate_vector(game, strategy).raw
    if upper is None:
        upper = spectral_norm(game) * math.sqrt(game.n * game.k)
    return QuantumBounds(lower, upper, strategy)
