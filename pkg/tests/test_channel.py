"""Tests for channel generation, CSI corruption, and the trace lemmas."""

import numpy as np
import pytest

from relaycap.channel import (
    corrupt_csi,
    draw_realization,
    lemma_bounds,
    sample_cn01,
    stream,
    verify_lemmas,
)
from relaycap.config import NetworkConfig
from relaycap.linalg import hermitian


def test_stream_determinism():
    a = sample_cn01(stream(42, 0, 7), 3, 4)
    b = sample_cn01(stream(42, 0, 7), 3, 4)
    assert np.array_equal(a, b)


def test_stream_distinct_ids_differ():
    a = sample_cn01(stream(42, 0, 7), 3, 4)
    b = sample_cn01(stream(42, 0, 8), 3, 4)
    assert not np.allclose(a, b)


def test_batched_draw_matches_sequential():
    # one (K, r, c) call consumes the stream like K single calls
    batched = sample_cn01(stream(1, 5), 2, 3, count=4)
    rng = stream(1, 5)
    seq = np.stack([sample_cn01(rng, 2, 3) for _ in range(4)])
    assert np.array_equal(batched, seq)


def test_cn01_moments():
    z = sample_cn01(stream(3, 11), 1, 1, count=100_000)[:, 0, 0]
    assert abs(np.mean(z)) < 0.02
    assert 0.98 < np.mean(np.abs(z) ** 2) < 1.02
    # circular symmetry: both components carry half the power
    assert 0.47 < np.var(z.real) < 0.53


def test_cn01_rejects_bad_shape():
    with pytest.raises(ValueError):
        sample_cn01(stream(0, 0), 0, 3)


def test_wishart_mean():
    # E[H^H H] = N I_M for N x M draws
    h = sample_cn01(stream(4, 12), 6, 4, count=10_000)
    mean = np.mean(hermitian(h) @ h, axis=0)
    assert np.max(np.abs(mean - 6.0 * np.eye(4))) < 0.1


def test_corrupt_csi_identity():
    rng = stream(5, 13)
    g = sample_cn01(rng, 4, 6)
    ghat, omega = corrupt_csi(g, 0.1, rng)
    assert np.array_equal(ghat, g + 0.1 * omega)
    assert np.allclose(ghat - g, 0.1 * omega, rtol=0.0, atol=1e-15)


def test_corrupt_csi_zero_error():
    rng = stream(5, 14)
    g = sample_cn01(rng, 4, 6)
    ghat, omega = corrupt_csi(g, 0.0, rng)
    assert np.array_equal(ghat, g)
    assert omega.shape == g.shape  # still drawn, discarded downstream


def test_corrupt_csi_error_power():
    rng = stream(6, 15)
    g = sample_cn01(rng, 4, 6, count=10_000)
    ghat, _ = corrupt_csi(g, 0.1, rng)
    per_entry = np.mean(np.abs(ghat - g) ** 2)
    assert abs(per_entry - 0.01) < 0.0005


def test_independence_of_error_direction():
    rng = stream(7, 16)
    g = sample_cn01(rng, 4, 6, count=10_000)
    _, omega = corrupt_csi(g, 0.1, rng)
    corr = np.abs(np.vdot(g, omega)) / np.sqrt(
        np.sum(np.abs(g) ** 2) * np.sum(np.abs(omega) ** 2)
    )
    assert corr < 0.03


def test_realization_layout_and_determinism():
    cfg = NetworkConfig.from_db(M=4, N=6, K=5, e=0.2)
    rz1 = draw_realization(cfg, 21, 3)
    rz2 = draw_realization(cfg, 21, 3)
    assert rz1.H.shape == (5, 6, 4)
    assert rz1.G.shape == (5, 4, 6)
    assert np.array_equal(rz1.H, rz2.H)
    assert np.array_equal(rz1.Ghat, rz2.Ghat)
    assert np.array_equal(rz1.Ghat, rz1.G + 0.2 * rz1.Omega)


def test_realization_common_random_numbers_across_e():
    # same seed, different error gain: identical channel and error draws
    base = NetworkConfig.from_db(M=4, N=6, K=5)
    rz0 = draw_realization(base.with_(e=0.0), 22, 0)
    rz1 = draw_realization(base.with_(e=0.3), 22, 0)
    assert np.array_equal(rz0.H, rz1.H)
    assert np.array_equal(rz0.G, rz1.G)
    assert np.array_equal(rz0.Omega, rz1.Omega)


def test_lemmas_zero_matrix():
    trials = 1000
    a = np.zeros((3, 5))
    b = np.zeros((5, 3))
    dev = verify_lemmas(stream(8, 17), trials, a, b)
    bound = 5.0 / np.sqrt(trials)
    assert dev.lemma1 < bound and dev.lemma2 < bound and dev.lemma3 < bound


def test_lemma2_clt_tolerance():
    rng = stream(9, 18)
    a = sample_cn01(rng, 4, 6)
    b = hermitian(a)
    dev = verify_lemmas(stream(9, 19), 100_000, a, b)
    assert dev.lemma2 < 0.05 * abs(np.trace(a @ b))


def test_lemma3_identity_case():
    # C = I_N: the estimator of Omega Omega^H approaches N * I_M
    m, n, trials = 4, 6, 100_000
    rng = stream(10, 20)
    om = sample_cn01(rng, m, n, count=trials)
    est = np.einsum("tmn,tqn->mq", om, om.conj()) / trials
    assert np.max(np.abs(np.diagonal(est).real - n)) < 0.03 * n


def test_lemma_deviations_shrink():
    rng = stream(11, 21)
    a = sample_cn01(rng, 4, 6)
    b = sample_cn01(rng, 6, 4)
    small = verify_lemmas(stream(11, 22), 1_000, a, b)
    big = verify_lemmas(stream(11, 23), 100_000, a, b)
    assert big.lemma1 < small.lemma1
    assert big.lemma2 < small.lemma2
    assert big.lemma3 < small.lemma3
    bounds = lemma_bounds(a, b, 100_000)
    assert big.lemma1 < bounds.lemma1
    assert big.lemma2 < bounds.lemma2
    assert big.lemma3 < bounds.lemma3
