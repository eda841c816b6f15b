"""Ergodic and asymptotic capacity of the relay network.

Ergodic capacity is the Monte-Carlo mean over channel realizations of the
half-duplex sum rate (1/2) sum_m log2(1 + gamma_m).  The asymptotic
(large relay count) closed forms replace the per-relay dynamic power
factors with a single average factor and the random effective channel
with its law-of-large-numbers limit; for the regularized scheme the
limits involve expectations over the eigenvalues of the destination-side
Gram matrix, estimated by sampling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beamforming import build_beamformer, exact_power_factor, taylor_power_factor
from .channel import EIGEN_SALT, ORACLE_SALT, draw_realization, sample_cn01, stream
from .config import MF, MF_RZF, MF_ZF, SCHEMES, NetworkConfig
from .linalg import hermitian
from .receiver import exact_snr_oracle, flagged_realization, post_snr

POWER_FACTOR_MODES = ("exact", "average", "taylor")

#: default sample count for eigenvalue expectations
DEFAULT_EIG_SAMPLES = 10_000


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo capacity estimate in bits per channel use.

    half_width is the 95% normal-approximation confidence half-width;
    flagged_trials counts realizations that hit the near-singular guard.
    """

    mean: float
    half_width: float
    trials: int
    flagged_trials: int


@dataclass(frozen=True)
class EigenExpectations:
    """Sampled eigenvalue expectations of the destination-side Gram matrix.

    For lambda an eigenvalue of G G^H (G an M x N draw with i.i.d. CN(0,1)
    entries) and a fixed regularizer alpha:

        m1 = E[lambda / (lambda + alpha)]
        m2 = E[lambda / (lambda + alpha)^2]
        m3 = E[lambda^2 / (lambda + alpha)^2]

    The exact identity m3 = m1 - alpha * m2 holds on any sample set.
    """

    m1: float
    m2: float
    m3: float
    samples: int
    alpha: float


def eigenvalue_samples(M: int, N: int, samples: int, master_seed: int) -> np.ndarray:
    """Eigenvalues of `samples` draws of G G^H, flattened to one array."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = stream(master_seed, EIGEN_SALT)
    out = []
    done = 0
    while done < samples:
        chunk = min(samples - done, 20_000)
        g = sample_cn01(rng, M, N, count=chunk)
        out.append(np.linalg.eigvalsh(g @ hermitian(g)).ravel())
        done += chunk
    return np.concatenate(out)


def moments_from_eigenvalues(lam: np.ndarray, alpha: float, samples: int) -> EigenExpectations:
    """Evaluate the three regularized moments on a fixed eigenvalue sample."""
    shifted = lam + alpha
    m1 = float(np.mean(lam / shifted))
    m2 = float(np.mean(lam / shifted**2))
    m3 = float(np.mean(lam**2 / shifted**2))
    return EigenExpectations(m1=m1, m2=m2, m3=m3, samples=samples, alpha=alpha)


def eigen_expectations(
    cfg: NetworkConfig,
    samples: int = DEFAULT_EIG_SAMPLES,
    master_seed: int = 0,
    alpha: float | None = None,
) -> EigenExpectations:
    """Monte-Carlo estimate of the regularized eigenvalue moments."""
    if samples < 1_000:
        raise ValueError("need at least 1000 sampled matrices")
    a = cfg.alpha if alpha is None else alpha
    lam = eigenvalue_samples(cfg.M, cfg.N, samples, master_seed)
    return moments_from_eigenvalues(lam, a, samples)


def average_power_factor(
    kind: str, cfg: NetworkConfig, eig: EigenExpectations | None = None
) -> float:
    """Fixed power-control factor shared by all relays (closed form).

    Replaces the per-relay dynamic factor by the value matching the
    scheme's average power denominator.  The MF-ZF form requires N > M
    (the inverse-Gram expectation diverges at N = M).  The regularized
    form needs the eigenvalue moment m2 = E[lambda/(lambda+alpha)^2],
    estimated by eigen_expectations when not supplied.
    """
    if kind not in SCHEMES:
        raise ValueError(f"unknown beamformer kind {kind!r}")
    m_, n_, p, q = cfg.M, cfg.N, cfg.P, cfg.Q
    if kind == MF:
        return float(np.sqrt(q / ((p * (m_ + n_) + m_) * n_**2)))
    if kind == MF_ZF:
        if n_ <= m_:
            raise ValueError("MF-ZF average power factor requires N > M")
        return float(np.sqrt(q * (n_ - m_) / (p * (m_ + n_) + m_)))
    if eig is None:
        eig = eigen_expectations(cfg)
    return float(np.sqrt(q / ((p * (m_ + n_) * n_ + m_ * n_) * eig.m2)))


def asymptotic_capacity(
    kind: str, cfg: NetworkConfig, eig: EigenExpectations | None = None
) -> float:
    """Large-relay-count closed-form capacity, bits per channel use.

    Evaluates the law-of-large-numbers limits with the fixed average power
    factor.  MF-ZF requires N > M.  The regularized form uses the sampled
    eigenvalue moments (computed with defaults when not supplied).
    """
    if kind not in SCHEMES:
        raise ValueError(f"unknown beamformer kind {kind!r}")
    m_, n_, k = cfg.M, cfg.N, cfg.K
    p, q = cfg.P, cfg.Q
    s1, s2 = cfg.sigma1_sq, cfg.sigma2_sq
    e2 = cfg.e**2
    if k == 0:
        return 0.0
    if kind == MF:
        denom = (e2 * p + s1) * k * m_ * (m_ + n_) / n_ + (
            p * m_ * (m_ + n_) + m_**2
        ) * s2 / (q * n_)
        ratio = p * k**2 * n_ / denom
    elif kind == MF_ZF:
        if n_ <= m_:
            raise ValueError("MF-ZF asymptotic capacity requires N > M")
        denom = (
            e2 * p * k * m_ * (m_ + n_) / (n_ - m_)
            + k * m_ * s1
            + (p * m_ * (m_ + n_) + m_**2) * s2 / (q * (n_ - m_))
        )
        ratio = p * k**2 * n_ / denom
    else:
        if eig is None:
            eig = eigen_expectations(cfg)
        denom = (
            e2 * p * k * m_ * (m_ + n_) * eig.m2
            + k * m_ * eig.m3 * s1
            + (p * m_ * (m_ + n_) + m_**2) * eig.m2 * s2 / q
        )
        ratio = p * k**2 * n_ * eig.m1**2 / denom
    return float(m_ / 2.0 * np.log2(1.0 + ratio))


def optimal_alpha(cfg: NetworkConfig) -> float:
    """Regularizer maximizing the asymptotic regularized-scheme capacity.

    This is the exact stationary point of the closed form in alpha, for
    any eigenvalue distribution (hence also for sampled moments).
    """
    if cfg.K < 1:
        raise ValueError("need at least one relay")
    num = (cfg.P * (cfg.M + cfg.N) + cfg.M) / cfg.Q * cfg.sigma2_sq
    num += cfg.e**2 * cfg.P * cfg.K * (cfg.M + cfg.N)
    return float(num / (cfg.K * cfg.sigma1_sq))


def dynamic_error(K: int, sigma_q: float, sigma_d: float) -> float:
    """CSI error gain when feedback delay grows with the relay count:
    e = sigma_q + K * sigma_d."""
    if sigma_q < 0 or sigma_d < 0:
        raise ValueError("error components must be nonnegative")
    return float(sigma_q + K * sigma_d)


def _trial_rate(
    kind: str,
    cfg: NetworkConfig,
    master_seed: int,
    trial: int,
    power_factor: str,
    avg_rho: float | None,
    oracle_symbols: int | None,
) -> tuple[float, bool]:
    rz = draw_realization(cfg, master_seed, trial)
    flagged = flagged_realization(kind, rz, cfg)
    try:
        if power_factor == "exact":
            f = build_beamformer(kind, rz.H, rz.Ghat, cfg.alpha, check=False)
            rho = exact_power_factor(f, rz.H, cfg)
        elif power_factor == "average":
            rho = np.full(cfg.K, avg_rho)
        else:
            rho = taylor_power_factor(kind, rz.H, rz.G, rz.Omega, cfg).rho_taylor
        if oracle_symbols is None:
            report = post_snr(kind, rz, rho, cfg)
        else:
            rng = stream(master_seed, ORACLE_SALT, trial)
            report = exact_snr_oracle(kind, rz, cfg, oracle_symbols, rng)
        return report.sum_rate, flagged
    except np.linalg.LinAlgError:
        # exactly singular draw: treated as a zero-rate flagged trial
        return 0.0, True


def _run_trials(worker, trials: int, workers: int):
    rates = np.empty(trials)
    flags = np.empty(trials, dtype=bool)

    def fill(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            rates[t], flags[t] = worker(t)

    if workers <= 1 or trials < 2 * workers:
        fill(0, trials)
    else:
        bounds = np.linspace(0, trials, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(fill, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for fut in futures:
                fut.result()
    return rates, flags


def ergodic_capacity(
    kind: str,
    cfg: NetworkConfig,
    trials: int,
    master_seed: int,
    power_factor: str = "exact",
    workers: int = 1,
    oracle_symbols: int | None = None,
) -> CapacityEstimate:
    """Monte-Carlo ergodic capacity of one beamforming scheme.

    Per-trial rates come from the closed-form per-stream SINR with, by
    default, the exact per-relay power factors (dynamic power control);
    power_factor="average" switches to the fixed closed-form factor and
    "taylor" to the first-order factor.  With oracle_symbols set, SINRs
    come from the exact received-signal oracle instead of the closed form.
    Output is a pure function of (master_seed, cfg, trials); the worker
    count only parallelizes and never changes results.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if power_factor not in POWER_FACTOR_MODES:
        raise ValueError(f"unknown power factor mode {power_factor!r}")
    if cfg.K == 0:
        return CapacityEstimate(0.0, 0.0, trials, 0)

    avg_rho = None
    if power_factor == "average":
        eig = eigen_expectations(cfg, master_seed=master_seed) if kind == MF_RZF else None
        avg_rho = average_power_factor(kind, cfg, eig)

    def worker(t: int):
        return _trial_rate(kind, cfg, master_seed, t, power_factor, avg_rho, oracle_symbols)

    rates, flags = _run_trials(worker, trials, workers)
    half_width = 1.96 * float(np.std(rates, ddof=1)) / np.sqrt(trials)
    return CapacityEstimate(
        mean=float(np.mean(rates)),
        half_width=half_width,
        trials=trials,
        flagged_trials=int(np.sum(flags)),
    )


def cutset_upper_bound(
    cfg: NetworkConfig, trials: int, master_seed: int, workers: int = 1
) -> CapacityEstimate:
    """Cut-set upper bound on the network capacity (first-hop cut).

    Monte-Carlo mean of (1/2) log2 det(I_M + P/(M sigma1^2) sum_k H_k^H H_k)
    over the source-relay channel draws.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if cfg.K == 0:
        return CapacityEstimate(0.0, 0.0, trials, 0)
    scale = cfg.P / (cfg.M * cfg.sigma1_sq)
    eye = np.eye(cfg.M)

    def worker(t: int):
        rz = draw_realization(cfg, master_seed, t)
        gram = np.einsum("knm,knp->mp", rz.H.conj(), rz.H)
        _, logdet = np.linalg.slogdet(eye + scale * gram)
        return 0.5 * logdet / np.log(2.0), False

    rates, _ = _run_trials(worker, trials, workers)
    half_width = 1.96 * float(np.std(rates, ddof=1)) / np.sqrt(trials)
    return CapacityEstimate(
        mean=float(np.mean(rates)),
        half_width=half_width,
        trials=trials,
        flagged_trials=0,
    )
