import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgames.classical import exact_value
from xorgames.errors import DimensionError, GuardError
from xorgames.game import XorGame, chsh, evaluate_vector, gen_bernoulli
from xorgames.quantum import (
    ConvergenceWarning,
    _ascend,
    _normalize_rows,
    alternating_ascent,
    full_spectrum,
    mp_construction,
    power_iteration,
    spectral_norm,
)
from xorgames.spectra import mp_tail


def test_spectral_norm_small():
    assert spectral_norm(XorGame([[1, -1], [-1, -1]])) == pytest.approx(math.sqrt(2), rel=1e-12)
    assert spectral_norm(chsh()) == pytest.approx(math.sqrt(2), rel=1e-12)
    assert spectral_norm(XorGame(np.ones((5, 5)))) == pytest.approx(5, rel=1e-12)


def test_spectral_norm_identity():
    # spectral routines also take plain matrices
    assert spectral_norm(np.eye(2)) == pytest.approx(1, rel=1e-12)
    spec = full_spectrum(np.eye(5))
    assert np.allclose(spec.values, 1)


@pytest.mark.parametrize("seed", range(3))
def test_power_iteration_matches_svd(seed):
    g = gen_bernoulli(120, 90, seed)
    want = np.linalg.svd(g.entries.astype(float), compute_uv=False)[0]
    res = power_iteration(g, tol=1e-13)
    assert res.converged
    assert res.value == pytest.approx(want, rel=1e-6)


def test_power_iteration_cap_warns():
    g = gen_bernoulli(80, 80, 1)
    with pytest.warns(ConvergenceWarning):
        val = spectral_norm(g, tol=1e-15, max_iter=3)
    assert 0 < val <= np.linalg.svd(g.entries.astype(float), compute_uv=False)[0] + 1e-9
    with pytest.raises(ValueError):
        spectral_norm(g, tol=0)


def test_full_spectrum_examples():
    spec = full_spectrum(XorGame(np.ones((6, 6))))
    assert spec.values[0] == pytest.approx(6)
    assert np.allclose(spec.values[1:], 0, atol=1e-12)
    spec = full_spectrum(chsh())
    assert np.allclose(spec.values, math.sqrt(2))


def test_full_spectrum_residuals():
    g = gen_bernoulli(200, 200, 4)
    spec = full_spectrum(g)
    a = g.entries.astype(float)
    lam_max = spec.values[0]
    assert np.all(np.diff(spec.values) <= 0)
    for lam, l, r in spec:
        assert np.linalg.norm(l) == pytest.approx(1, abs=1e-12)
        assert np.linalg.norm(r) == pytest.approx(1, abs=1e-12)
        assert np.linalg.norm(a @ r - lam * l) <= 1e-8 * lam_max


def test_full_spectrum_guard():
    with pytest.raises(GuardError):
        full_spectrum(XorGame(np.ones((2001, 1))))


def test_mp_construction_empty_selection():
    res = mp_construction(np.eye(4), eps=0.5, delta=0.05)
    assert res.empty
    # Sylvester-Hadamard game: every singular value is sqrt(n) < 1.5 sqrt(n)
    h = np.array([[1]])
    for _ in range(3):
        h = np.block([[h, h], [h, -h]])
    g = XorGame(h)
    res = mp_construction(g, eps=0.5, delta=0.05)
    assert res.empty
    assert evaluate_vector(g, res.strategy).raw == 0
    res = mp_construction(chsh(), eps=0.5, delta=0.05)
    assert res.empty and res.selected == 0


def test_mp_construction_all_ones():
    n = 100
    g = XorGame(np.ones((n, n)))
    res = mp_construction(g, eps=0.5, delta=0.05)
    assert res.selected == 1
    assert res.zeroed_u == res.zeroed_v == 0
    # lambda_1 = n, l = r = 1/sqrt(n): value n^2 (1/n) / (f(1.5) + delta); f(1.5) by quadrature
    assert evaluate_vector(g, res.strategy).raw == pytest.approx(514.6849582519834, rel=1e-9)


def test_mp_construction_norms_before_clamp():
    g = gen_bernoulli(300, 300, 2)
    res = mp_construction(g, eps=0.6, delta=0.05)
    assert res.selected > 0
    assert res.u_sq_norms.sum() == pytest.approx(res.selected, rel=1e-10)
    assert res.v_sq_norms.sum() == pytest.approx(res.selected, rel=1e-10)
    assert np.all(np.linalg.norm(res.strategy.u_vectors, axis=1) <= 1 + 1e-9)
    assert res.scale == pytest.approx(mp_tail(1.4) + 0.05)


def test_mp_construction_value_identity():
    # before clamping and scaling the bilinear sum equals the sum of the kept singular values
    g = gen_bernoulli(150, 150, 3)
    spec = full_spectrum(g)
    res = mp_construction(g, eps=1.0, delta=10.0, spectrum=spec)
    assert res.zeroed_u == res.zeroed_v == 0
    kept = spec.values[spec.values >= math.sqrt(150)]
    assert evaluate_vector(g, res.strategy).raw * res.scale == pytest.approx(kept.sum(), rel=1e-9)


def test_mp_construction_errors():
    with pytest.raises(DimensionError):
        mp_construction(gen_bernoulli(3, 4, 0))
    with pytest.raises(ValueError):
        mp_construction(chsh(), eps=2.5)
    with pytest.raises(ValueError):
        mp_construction(chsh(), delta=0)


def test_ascent_chsh():
    b = alternating_ascent(chsh(), d=2)
    assert b.lower_raw == pytest.approx(2 * math.sqrt(2), abs=1e-6)
    assert b.lower_raw <= b.upper_raw * (1 + 1e-6)


def test_ascent_all_ones():
    n = 7
    b = alternating_ascent(XorGame(np.ones((n, n))), d=3)
    assert b.lower_raw == pytest.approx(n * n, rel=1e-10)


def test_ascent_monotone_per_half_step():
    g = gen_bernoulli(40, 40, 5)
    a = g.entries.astype(float)
    u = _normalize_rows(np.random.default_rng(0).standard_normal((40, 8)), np.ones((40, 8)))
    objs = []
    for _ in range(50):
        v = _normalize_rows(a.T @ u, np.ones((40, 8)))
        objs.append(np.sum(v * (a.T @ u)))
        u = _normalize_rows(a @ v, u)
        objs.append(np.sum(u * (a @ v)))
    assert all(y >= x - 1e-9 for x, y in zip(objs, objs[1:]))
    # the internal loop asserts monotonicity too
    _ascend(a, u, 1e-12, 200)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**63))
def test_bounds_sandwich(n, seed):
    g = gen_bernoulli(n, n, seed)
    b = alternating_ascent(g, restarts=2, seed=seed)
    assert evaluate_vector(g, b.strategy).raw == pytest.approx(b.lower_raw, rel=1e-9)
    assert b.lower_raw <= b.upper_raw * (1 + 1e-6)
    assert exact_value(g).raw <= b.upper_raw * (1 + 1e-9)


def test_ascent_deterministic():
    g = gen_bernoulli(30, 30, 6)
    a = alternating_ascent(g, seed=4, restarts=2)
    b = alternating_ascent(g, seed=4, restarts=2)
    assert a.lower_raw == b.lower_raw
    with pytest.raises(ValueError):
        alternating_ascent(g, d=0)


def test_zero_row_fallback_keeps_previous():
    prev = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = _normalize_rows(np.array([[0.0, 0.0], [3.0, 4.0]]), prev)
    assert np.array_equal(out[0], prev[0])
    assert np.allclose(out[1], [0.6, 0.8])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        alternating_ascent(XorGame([[1, -1]]), d=1)
