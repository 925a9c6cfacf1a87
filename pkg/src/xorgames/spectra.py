"""Empirical spectral statistics of sign matrices against the Marcenko-Pastur law.

For an ``n x n`` matrix with i.i.d. mean-zero unit-variance entries, the
fraction of singular values at least ``C sqrt(n)`` tends to

    f(C) = 1/(2 pi) * integral_{C^2}^{4} sqrt(4/x - 1) dx,

and, for each basis vector ``e_i``, the squared length of its projection
onto the span of those right (or left) singular vectors concentrates at the
same ``f(C)``. The normalised Gram moments ``<e_1|(A^T A)^m|e_1> / n^m``
approach the Catalan numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quantum
from .errors import GuardError
from .game import XorGame, as_matrix

SIMPSON_TOL = 1e-10
CATALAN_MAX = 30
MOMENT_MAX = 8


def adaptive_simpson(f, a: float, b: float, tol: float = SIMPSON_TOL, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature; an interval is split until ``|S2 - S1| <= 15 tol``."""

    def simpson(fa, fm, fb, h):
        return h / 6 * (fa + 4 * fm + fb)

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    whole = simpson(fa, fm, fb, b - a)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, t, depth = stack.pop()
        mid = (lo + hi) / 2
        lm, rm = (lo + mid) / 2, (mid + hi) / 2
        flm, frm = f(lm), f(rm)
        left = simpson(flo, flm, fmid, mid - lo)
        right = simpson(fmid, frm, fhi, hi - mid)
        err = left + right - s
        if depth >= max_depth or abs(err) <= 15 * t:
            total += left + right + err / 15
        else:
            stack.append((lo, mid, flo, flm, fmid, left, t / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, t / 2, depth + 1))
    return total


def _check_c(c: float) -> None:
    if not 0 <= c <= 2:
        raise ValueError(f"C must lie in [0, 2], got {c}")


def mp_tail(c: float) -> float:
    """Limiting fraction of singular values ``>= C sqrt(n)``.

    The substitution ``x = (2 - s^2)^2`` removes both endpoint singularities:
    the integral becomes ``(1/pi) * integral_0^{sqrt(2-C)} 2 s^2 sqrt(4 - s^2) ds``,
    which is smooth, and is evaluated by adaptive Simpson.
    """
    _check_c(c)
    top = math.sqrt(2 - c)
    return adaptive_simpson(lambda s: 2 * s * s * math.sqrt(4 - s * s), 0.0, top) / math.pi


def mp_tail_closed_form(c: float) -> float:
    _check_c(c)
    return 1 - c * math.sqrt(4 - c * c) / (2 * math.pi) - 2 / math.pi * math.asin(c / 2)


def _side(game) -> int:
    return game.n if isinstance(game, XorGame) else as_matrix(game).shape[0]


def tail_fraction(game, c: float, spectrum=None) -> float:
    spec = quantum.full_spectrum(game) if spectrum is None else spectrum
    n = _side(game)
    return int(np.count_nonzero(spec.values >= c * math.sqrt(n))) / n


def projector_overlaps(game, c: float, side: str = "right", spectrum=None) -> np.ndarray:
    """``||P_C e_i||^2`` for every coordinate ``i``.

    ``P_C`` projects onto the right (or left) singular vectors whose singular
    value is at least ``C sqrt(n)``.
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    spec = quantum.full_spectrum(game) if spectrum is None else spectrum
    keep = spec.values >= c * math.sqrt(_side(game))
    vecs = (spec.right if side == "right" else spec.left)[:, : len(spec.values)][:, keep]
    return np.sum(vecs * vecs, axis=1)


def spectral_moments(game, m_max: int, coordinate: int = 0) -> np.ndarray:
    """``M_m = <e_c|(A^T A)^m|e_c> / n^m`` for ``m = 1..m_max`` by repeated mat-vecs."""
    if not 1 <= m_max <= MOMENT_MAX:
        raise GuardError(f"m_max must lie in 1..{MOMENT_MAX}")
    a = as_matrix(game)
    n = a.shape[0]
    x = a[:, coordinate].copy()
    out = np.empty(m_max)
    y = a.T @ x
    out[0] = y[coordinate] / n
    for m in range(2, m_max + 1):
        y = a.T @ (a @ y)
        out[m - 1] = y[coordinate] / n ** m
    return out


def catalan(m: int) -> int:
    if not 0 <= m <= CATALAN_MAX:
        raise GuardError(f"catalan(m) limited to 0 <= m <= {CATALAN_MAX}")
    return math.comb(2 * m, m) // (m + 1)


def narayana(m: int, i: int) -> int:
    """``N(m, i) = binom(m, i) binom(m - 1, i) / (i + 1)``, nonzero for ``0 <= i <= m - 1``.

    Summed over all ``i`` this gives the Catalan number ``C_m``.
    """
    if not 1 <= m <= CATALAN_MAX:
        raise GuardError(f"narayana(m, i) limited to 1 <= m <= {CATALAN_MAX}")
    if i < 0 or i > m - 1:
        return 0
    return math.comb(m, i) * math.comb(m - 1, i) // (i + 1)


@dataclass
class SpectralSummary:
    singular_values: np.ndarray
    tail_fractions: dict = field(default_factory=dict)
    overlaps_right: dict = field(default_factory=dict)
    overlaps_left: dict = field(default_factory=dict)
    moments: np.ndarray = field(default_factory=lambda: np.empty(0))


def summarize(game, cs=(0.5, 1.0, 1.5), m_max: int = 4) -> SpectralSummary:
    spec = quantum.full_spectrum(game)
    out = SpectralSummary(np.sort(spec.values))
    for c in cs:
        out.tail_fractions[c] = tail_fraction(game, c, spec)
        out.overlaps_right[c] = projector_overlaps(game, c, "right", spec)
        out.overlaps_left[c] = projector_overlaps(game, c, "left", spec)
    out.moments = spectral_moments(game, m_max)
    return out
