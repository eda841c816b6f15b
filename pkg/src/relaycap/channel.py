"""Seeded generation of channel realizations and CSI errors.

Every random quantity in the simulator is drawn from a counter-based
Philox stream keyed by (master_seed, stream id), so a trial's draws are a
pure function of the seed and the trial index regardless of execution
order or worker count.  Within one trial the draw order is fixed: first
all source-relay channels H_1..H_K, then all relay-destination channels
G_1..G_K, then all error directions Omega_1..Omega_K.  Omega is drawn
even when e = 0 so that sweeps over e at a fixed seed share identical
channel draws (common random numbers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig

# stream-id salts separating independent uses of the same master seed
TRIAL_SALT = 0
ORACLE_SALT = 1
EIGEN_SALT = 2
LEMMA_SALT = 3
MOMENT_SALT = 4


def stream(master_seed: int, *stream_id: int) -> np.random.Generator:
    """Counter-based random stream for (master_seed, stream_id).

    Identical arguments yield identical draws on any platform and in any
    execution order; distinct stream ids are statistically independent.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(stream_id))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream: a (master_seed, stream_id) pair."""

    master_seed: int
    stream_id: tuple

    def generator(self) -> np.random.Generator:
        sid = self.stream_id if isinstance(self.stream_id, tuple) else (self.stream_id,)
        return stream(self.master_seed, *sid)


def sample_cn01(rng: np.random.Generator, rows: int, cols: int, count: int | None = None):
    """Draw i.i.d. circularly-symmetric complex Gaussian entries, unit variance.

    Real and imaginary parts are each N(0, 1/2) so that E|z|^2 = 1.  With
    ``count`` a stacked (count, rows, cols) batch is returned; the entries
    come off the stream in the same order as ``count`` sequential calls.
    """
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be at least 1")
    shape = (rows, cols, 2) if count is None else (count, rows, cols, 2)
    z = rng.standard_normal(shape)
    return np.sqrt(0.5) * (z[..., 0] + 1j * z[..., 1])


def corrupt_csi(G: np.ndarray, e: float, rng: np.random.Generator):
    """Overlay Gaussian CSI error on a true channel: Ghat = G + e * Omega.

    Omega is i.i.d. CN(0,1) and independent of G, so the error power per
    entry is e**2.  Omega is drawn (and returned) even for e = 0.
    """
    if e < 0:
        raise ValueError("error gain e must be nonnegative")
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim == 3:
        omega = sample_cn01(rng, G.shape[1], G.shape[2], count=G.shape[0])
    else:
        omega = sample_cn01(rng, G.shape[0], G.shape[1])
    return G + e * omega, omega


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all per-relay channel matrices.

    H: (K, N, M) source-relay channels; G: (K, M, N) true relay-destination
    channels; Omega: (K, M, N) error directions; Ghat = G + e * Omega, the
    imperfect CSI the relays actually see.
    """

    H: np.ndarray
    G: np.ndarray
    Omega: np.ndarray
    Ghat: np.ndarray

    @property
    def K(self) -> int:
        return self.H.shape[0]

    @property
    def M(self) -> int:
        return self.H.shape[2]

    @property
    def N(self) -> int:
        return self.H.shape[1]


def draw_realization(cfg: NetworkConfig, master_seed: int, trial: int) -> ChannelRealization:
    """Draw the trial-th channel realization for the given configuration."""
    rng = stream(master_seed, TRIAL_SALT, trial)
    if cfg.K == 0:
        empty_h = np.zeros((0, cfg.N, cfg.M), dtype=np.complex128)
        empty_g = np.zeros((0, cfg.M, cfg.N), dtype=np.complex128)
        return ChannelRealization(empty_h, empty_g, empty_g, empty_g)
    H = sample_cn01(rng, cfg.N, cfg.M, count=cfg.K)
    G = sample_cn01(rng, cfg.M, cfg.N, count=cfg.K)
    Ghat, Omega = corrupt_csi(G, cfg.e, rng)
    return ChannelRealization(H=H, G=G, Omega=Omega, Ghat=Ghat)


@dataclass(frozen=True)
class LemmaDeviations:
    """Empirical deviations of the three trace-identity estimators."""

    lemma1: float
    lemma2: float
    lemma3: float


def verify_lemmas(rng: np.random.Generator, trials: int, A: np.ndarray, B: np.ndarray) -> LemmaDeviations:
    """Monte-Carlo check of the three expectation identities for CN(0,1) matrices.

    For Omega with i.i.d. CN(0,1) entries and any fixed A (M x N), B (N x M):

    1. E[tr(A Omega^H) Omega] = A
    2. E[tr(A Omega^H) tr(B Omega)] = tr(A B)
    3. E[Omega C Omega^H] = tr(C) I_M  with C = B A (N x N)

    Returns the Frobenius / absolute deviations of the sample means from
    these targets; each shrinks as O(1/sqrt(trials)).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    m, n = A.shape
    if B.shape != (n, m):
        raise ValueError("B must have the transposed shape of A")
    C = B @ A

    acc1 = np.zeros((m, n), dtype=np.complex128)
    acc2 = 0.0 + 0.0j
    acc3 = np.zeros((m, m), dtype=np.complex128)
    done = 0
    while done < trials:
        chunk = min(trials - done, 50_000)
        om = sample_cn01(rng, m, n, count=chunk)
        t1 = np.einsum("mn,tmn->t", A, om.conj())
        t2 = np.einsum("nm,tmn->t", B, om)
        acc1 += np.einsum("t,tmn->mn", t1, om)
        acc2 += np.sum(t1 * t2)
        acc3 += np.einsum("tmn,np,tqp->mq", om, C, om.conj())
        done += chunk

    dev1 = float(np.linalg.norm(acc1 / trials - A))
    dev2 = float(abs(acc2 / trials - np.trace(C)))
    dev3 = float(np.linalg.norm(acc3 / trials - np.trace(C) * np.eye(m)))
    return LemmaDeviations(dev1, dev2, dev3)


def lemma_bounds(A: np.ndarray, B: np.ndarray, trials: int) -> LemmaDeviations:
    """Three-sigma scale bounds for the verify_lemmas estimators.

    Derived from the exact per-entry estimator variances: each entry of the
    first estimator has variance ||A||_F^2 / T, the second estimator has
    variance ||A||_F^2 ||B||_F^2 / T, and each entry of the third has
    variance ||C||_F^2 / T.  The returned values are three times the RMS
    deviation implied by those variances.
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    m, n = A.shape
    C = B @ A
    root_t = float(np.sqrt(trials))
    b1 = 3.0 * np.sqrt(m * n) * np.linalg.norm(A) / root_t
    b2 = 3.0 * np.linalg.norm(A) * np.linalg.norm(B) / root_t
    b3 = 3.0 * m * np.linalg.norm(C) / root_t
    return LemmaDeviations(float(b1), float(b2), float(b3))
