"""XOR games, strategies and their payoff functionals.

A game is an ``n x k`` matrix of signs. Player A receives a row index,
player B a column index, and they win on question ``(i, j)`` when the
product of their +-1 answers equals ``A[i, j]``. Questions are drawn
uniformly, so the bias of a strategy is its bilinear sum divided by ``n*k``.

Randomness
----------
All random draws go through :func:`make_rng`, which wraps numpy's Philox
4x64 counter-based bit generator keyed by the 64-bit seed. Philox output is
defined by its key and counter alone, so the same seed yields the same
stream on every platform.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, MatrixFormatError, NormError

MASK64 = (1 << 64) - 1
NORM_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & MASK64))


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, n: int, trial: int) -> int:
    """Per-trial seed: ``seed XOR splitmix64((n << 32) | trial)``."""
    return (int(seed) & MASK64) ^ splitmix64(((n & 0xFFFFFFFF) << 32) | (trial & 0xFFFFFFFF))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class XorGame:
    """An ``n x k`` XOR game stored as a read-only int8 sign matrix."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        a = np.asarray(entries)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"game matrix must be 2-D and non-empty, got shape {a.shape}")
        if not np.all((a == 1) | (a == -1)):
            raise MatrixFormatError("game entries must all be +1 or -1")
        self._entries = _frozen(a.astype(np.int8))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    @property
    def k(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries.shape

    @property
    def row_masks(self) -> tuple[int, ...]:
        """Row ``i`` as an integer whose bit ``j`` is set iff ``A[i, j] == +1``."""
        weights = 1 << np.arange(self.k, dtype=object)
        return tuple(int(np.sum(weights[row > 0])) for row in self._entries)

    def transpose(self) -> XorGame:
        return XorGame(self._entries.T)

    def __eq__(self, other):
        if not isinstance(other, XorGame):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash((self.shape, self._entries.tobytes()))

    def __repr__(self):
        return f"XorGame(n={self.n}, k={self.k})"


@dataclass(frozen=True, eq=False)
class SignStrategy:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u)
        v = np.asarray(self.v)
        if u.ndim != 1 or v.ndim != 1:
            raise DimensionError("sign strategies are 1-D sequences")
        for s in (u, v):
            if not np.all((s == 1) | (s == -1)):
                raise MatrixFormatError("sign strategy entries must be +1 or -1")
        object.__setattr__(self, "u", _frozen(u.astype(np.int8)))
        object.__setattr__(self, "v", _frozen(v.astype(np.int8)))

    def __neg__(self):
        return SignStrategy(-self.u, -self.v)


@dataclass(frozen=True, eq=False)
class VectorStrategy:
    """Real vectors for both players, one per question, rows of ``u_vectors``/``v_vectors``.

    Vectors of norm below one are allowed: the maximum of the bilinear form
    over the unit ball equals the maximum over the unit sphere.
    """

    u_vectors: np.ndarray
    v_vectors: np.ndarray

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.u_vectors, dtype=float))
        v = np.atleast_2d(np.asarray(self.v_vectors, dtype=float))
        if u.ndim != 2 or v.ndim != 2 or u.shape[1] != v.shape[1]:
            raise DimensionError(f"vector strategies need a shared dimension, got {u.shape} and {v.shape}")
        for name, vecs in (("u", u), ("v", v)):
            worst = float(np.max(np.linalg.norm(vecs, axis=1)))
            if worst > 1 + NORM_TOL:
                raise NormError(f"{name} vector of norm {worst:.12g} exceeds 1")
        object.__setattr__(self, "u_vectors", _frozen(u))
        object.__setattr__(self, "v_vectors", _frozen(v))

    @property
    def d(self) -> int:
        return self.u_vectors.shape[1]

    @classmethod
    def from_signs(cls, s: SignStrategy) -> VectorStrategy:
        return cls(s.u.astype(float)[:, None], s.v.astype(float)[:, None])

    @classmethod
    def zeros(cls, n: int, k: int, d: int = 1) -> VectorStrategy:
        return cls(np.zeros((n, d)), np.zeros((k, d)))


@dataclass(frozen=True)
class GameValue:
    raw: float
    delta: float

    @classmethod
    def from_raw(cls, raw, n: int, k: int) -> GameValue:
        return cls(raw, raw / (n * k))


def as_matrix(obj) -> np.ndarray:
    """Float matrix of a game, or of any real 2-D array (spectral routines accept both)."""
    if isinstance(obj, XorGame):
        return obj.entries.astype(float)
    a = np.asarray(obj, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def gen_bernoulli(n: int, k: int, seed: int) -> XorGame:
    """Random game with i.i.d. uniform +-1 entries, a pure function of ``(n, k, seed)``."""
    if n < 1 or k < 1:
        raise DimensionError("n and k must be positive")
    bits = make_rng(seed).integers(0, 2, size=(n, k), dtype=np.int8)
    return XorGame(2 * bits - 1)


def chsh() -> XorGame:
    return XorGame([[1, 1], [1, -1]])


def evaluate_sign(game: XorGame, s: SignStrategy) -> GameValue:
    if s.u.shape[0] != game.n or s.v.shape[0] != game.k:
        raise DimensionError(f"strategy sizes ({s.u.shape[0]}, {s.v.shape[0]}) do not match game {game.shape}")
    a = game.entries.astype(np.int64)
    raw = int(s.u.astype(np.int64) @ a @ s.v.astype(np.int64))
    return GameValue.from_raw(raw, game.n, game.k)


def evaluate_vector(game: XorGame, vs: VectorStrategy) -> GameValue:
    if vs.u_vectors.shape[0] != game.n or vs.v_vectors.shape[0] != game.k:
        raise DimensionError(
            f"strategy sizes ({vs.u_vectors.shape[0]}, {vs.v_vectors.shape[0]}) do not match game {game.shape}"
        )
    raw = float(np.sum(vs.u_vectors * (game.entries @ vs.v_vectors)))
    return GameValue.from_raw(raw, game.n, game.k)


# -- text format -------------------------------------------------------------

_TOKENS = {"+1": 1, "-1": -1, "+": 1, "-": -1}


def read_matrix(text: str) -> XorGame:
    """Parse ``"n k"`` followed by ``n`` lines of ``k`` tokens from ``+1 -1 + -``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise MatrixFormatError(f"malformed header {lines[0]!r}, expected 'n k'")
    n, k = int(header[0]), int(header[1])
    if n < 1 or k < 1:
        raise MatrixFormatError("header dimensions must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}")
    out = np.empty((n, k), dtype=np.int8)
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != k:
            raise MatrixFormatError(f"row {i + 1}: expected {k} tokens, found {len(tokens)}")
        for j, tok in enumerate(tokens):
            try:
                out[i, j] = _TOKENS[tok]
            except KeyError:
                raise MatrixFormatError(f"row {i + 1}, column {j + 1}: illegal token {tok!r}") from None
    return XorGame(out)


def write_matrix(game: XorGame) -> str:
    buf = io.StringIO()
    buf.write(f"{game.n} {game.k}\n")
    for row in game.entries:
        buf.write(" ".join("+1" if x > 0 else "-1" for x in row))
        buf.write("\n")
    return buf.getvalue()
