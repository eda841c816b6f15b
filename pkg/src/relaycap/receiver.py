"""Destination-side processing: effective channels, QRD detection, SINR.

The destination sees the superposition of all relay transmissions.  After
the relays' beamforming, the network collapses to an M x M effective
channel whose QR factorization drives successive interference
cancellation.  Per-stream SINR is computed two ways: the closed-form
first-order expressions (the error contribution enters as a separate
channel-error-generated noise term proportional to e^2), and an exact
Monte-Carlo oracle that simulates the full received signal and measures
residual noise empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamforming import build_beamformer, error_free_power_terms, exact_power_factor
from .channel import ChannelRealization, sample_cn01
from .config import MF, MF_RZF, MF_ZF, SCHEMES, NetworkConfig
from .linalg import COND_LIMIT, SingularMatrixError, hermitian, qr_decompose


@dataclass(frozen=True)
class EffectiveChannel:
    """M x M end-to-end channel of one realization with its QR factors."""

    kind: str
    H_sd: np.ndarray
    Q_sd: np.ndarray
    R_sd: np.ndarray


def _check_kind(kind: str) -> None:
    if kind not in SCHEMES:
        raise ValueError(f"unknown beamformer kind {kind!r}")


def _scheme_terms(kind: str, rz: ChannelRealization, alpha: float):
    """Per-relay building blocks shared by the effective channel and SINR.

    Returns (signal_terms, HhH, extras) where signal_terms stacks the
    per-relay M x M contributions to the effective channel.
    """
    HhH = hermitian(rz.H) @ rz.H
    if kind == MF:
        W = rz.G @ hermitian(rz.G)
        return W @ HhH, HhH, {"W": W}
    if kind == MF_ZF:
        return HhH, HhH, {}
    W = rz.G @ hermitian(rz.G)
    m = W.shape[-1]
    try:
        Ga = np.linalg.inv(W + alpha * np.eye(m))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    shrink = np.eye(m) - alpha * Ga
    return shrink @ HhH, HhH, {"Ga": Ga, "shrink": shrink}


def effective_channel(
    kind: str, rz: ChannelRealization, rho, alpha: float = 0.0
) -> EffectiveChannel:
    """Assemble the effective end-to-end channel and its QR factorization.

    rho holds the per-relay power factors (scalar broadcasts).  The MF
    effective channel is sum_k rho_k G_k G_k^H H_k^H H_k; MF-ZF drops the
    destination-side factors entirely; MF-RZF keeps the regularized
    shrinkage (I - alpha (G G^H + alpha I)^-1).
    """
    _check_kind(kind)
    m = rz.M
    if rz.K == 0:
        H_sd = np.zeros((m, m), dtype=np.complex128)
    else:
        rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), (rz.K,))
        terms, _, _ = _scheme_terms(kind, rz, alpha)
        H_sd = np.einsum("k,kij->ij", rho, terms)
    q, r = qr_decompose(H_sd)
    return EffectiveChannel(kind=kind, H_sd=H_sd, Q_sd=q, R_sd=r)


def qrd_detect(eff: EffectiveChannel, y: np.ndarray) -> np.ndarray:
    """Rotate a received vector into the SIC basis: returns Q^H y."""
    return hermitian(eff.Q_sd) @ np.asarray(y, dtype=np.complex128)


@dataclass(frozen=True)
class StreamSnrReport:
    """Per-stream post-processing SINR with its noise decomposition.

    gamma[m] = signal_power[m] / (ceg_noise[m] + relay_noise[m] + dest_noise)
    exactly as assembled.  ceg_noise is the channel-error-generated term
    (zero when e = 0), relay_noise the forwarded relay-noise term, and
    dest_noise the destination noise power.
    """

    gamma: np.ndarray
    signal_power: np.ndarray
    ceg_noise: np.ndarray
    relay_noise: np.ndarray
    dest_noise: float

    @property
    def sum_rate(self) -> float:
        """Half-duplex sum rate (1/2) sum_m log2(1 + gamma_m), in bits."""
        return float(0.5 * np.sum(np.log2(1.0 + self.gamma)))


def post_snr(kind: str, rz: ChannelRealization, rho, cfg: NetworkConfig) -> StreamSnrReport:
    """Closed-form per-stream SINR of one realization.

    Signal power is (P/M) R_mm^2 from the QR diagonal of the effective
    channel.  The noise denominators follow the first-order analysis: an
    e^2-proportional channel-error term, the relay-noise term with the
    scheme's destination-side filter applied, and the destination noise.
    """
    _check_kind(kind)
    m_ant = cfg.M
    if rz.K == 0:
        zeros = np.zeros(m_ant)
        return StreamSnrReport(zeros, zeros, zeros, zeros.copy(), cfg.sigma2_sq)

    rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), (rz.K,))
    terms, HhH, extras = _scheme_terms(kind, rz, cfg.alpha)
    H_sd = np.einsum("k,kij->ij", rho, terms)
    q, r = qr_decompose(H_sd)
    qh = hermitian(q)

    diag = np.diagonal(r).real
    signal = (cfg.P / cfg.M) * diag**2
    rho_sq = rho**2
    X2 = HhH @ HhH

    if kind == MF:
        tr_x2 = np.trace(X2, axis1=-2, axis2=-1).real
        rows_g = qh[None, :, :] @ rz.G
        ceg = (cfg.e**2 * cfg.P / cfg.M) * np.einsum(
            "k,k,kmn,kmn->m", rho_sq, tr_x2, rows_g, rows_g.conj()
        ).real
        filt = extras["W"] @ hermitian(rz.H)
    elif kind == MF_ZF:
        W = rz.G @ hermitian(rz.G)
        ceg_scalar = np.einsum(
            "k,k->", rho_sq, np.trace(np.linalg.solve(W, X2), axis1=-2, axis2=-1).real
        )
        ceg = np.full(m_ant, (cfg.e**2 * cfg.P / cfg.M) * ceg_scalar)
        filt = hermitian(rz.H)
    else:
        Ga, shrink = extras["Ga"], extras["shrink"]
        ceg_scalar = np.einsum(
            "k,k->",
            rho_sq,
            np.trace(X2 @ Ga @ (np.eye(m_ant) - cfg.alpha * Ga), axis1=-2, axis2=-1).real,
        )
        ceg = np.full(m_ant, (cfg.e**2 * cfg.P / cfg.M) * ceg_scalar)
        filt = shrink @ hermitian(rz.H)

    rows_n = qh[None, :, :] @ filt
    relay = cfg.sigma1_sq * np.einsum("k,kmn,kmn->m", rho_sq, rows_n, rows_n.conj()).real

    gamma = signal / (ceg + relay + cfg.sigma2_sq)
    return StreamSnrReport(
        gamma=gamma,
        signal_power=signal,
        ceg_noise=ceg,
        relay_noise=relay,
        dest_noise=cfg.sigma2_sq,
    )


def flagged_realization(kind: str, rz: ChannelRealization, cfg: NetworkConfig) -> bool:
    """Whether the draw hits the near-singular guard for inverting schemes.

    MF-ZF (and MF-RZF at alpha = 0) invert the Gram matrices of both the
    true and the corrupted destination channel; a condition estimate above
    COND_LIMIT on any relay flags the trial.  Flagged trials are still
    evaluated (their large-noise SINR is part of the statistics).
    """
    if rz.K == 0 or kind == MF or (kind == MF_RZF and cfg.alpha > 0.0):
        return False
    W = rz.G @ hermitian(rz.G)
    if np.any(np.linalg.cond(W) > COND_LIMIT):
        return True
    if cfg.e > 0.0:
        What = rz.Ghat @ hermitian(rz.Ghat)
        if np.any(np.linalg.cond(What) > COND_LIMIT):
            return True
    return False


def exact_snr_oracle(
    kind: str,
    rz: ChannelRealization,
    cfg: NetworkConfig,
    symbol_trials: int,
    rng: np.random.Generator,
) -> StreamSnrReport:
    """Ground-truth per-stream SINR by simulating the received signal.

    Transmits random symbol vectors through the true two-hop channel with
    the exactly-scaled, imperfect-CSI beamformers, detects with the Q
    factor of the approximated effective channel (all the destination can
    form), and measures per-stream residual noise empirically.  The
    channel-error and relay-noise contributions are measured from their
    separately propagated residuals; destination noise enters at its known
    power.
    """
    _check_kind(kind)
    if symbol_trials < 1000:
        raise ValueError("oracle needs at least 1000 symbol draws")
    if rz.K == 0:
        zeros = np.zeros(cfg.M)
        return StreamSnrReport(zeros, zeros, zeros, zeros.copy(), cfg.sigma2_sq)

    F = build_beamformer(kind, rz.H, rz.Ghat, cfg.alpha, check=False)
    rho_hat = exact_power_factor(F, rz.H, cfg)
    u = error_free_power_terms(kind, rz.H, rz.G, cfg, cfg.alpha)
    rho_zero = np.sqrt(cfg.Q / u)
    eff = effective_channel(kind, rz, rho_zero, cfg.alpha)
    qh = hermitian(eff.Q_sd)

    t = symbol_trials
    s = np.sqrt(cfg.P / cfg.M) * sample_cn01(rng, cfg.M, t)
    noise_r = np.sqrt(cfg.sigma1_sq) * sample_cn01(rng, cfg.N, t, count=rz.K)
    noise_d = np.sqrt(cfg.sigma2_sq) * sample_cn01(rng, cfg.M, t)

    GF = rho_hat[:, None, None] * (rz.G @ F)
    y_signal = np.einsum("kmn,knt->mt", GF, rz.H @ s)
    y_relay = np.einsum("kmn,knt->mt", GF, noise_r)

    z_signal = qh @ y_signal
    z_relay = qh @ y_relay
    z_total = z_signal + z_relay + qh @ noise_d

    # residual of the SIC model once all later streams are cancelled
    r_err = z_signal - eff.R_sd @ s
    ceg = np.mean(np.abs(r_err) ** 2, axis=1)
    relay = np.mean(np.abs(z_relay) ** 2, axis=1)

    gain = np.sum(z_total * s.conj(), axis=1) / np.sum(np.abs(s) ** 2, axis=1)
    signal = (cfg.P / cfg.M) * np.abs(gain) ** 2

    gamma = signal / (ceg + relay + cfg.sigma2_sq)
    return StreamSnrReport(
        gamma=gamma,
        signal_power=signal,
        ceg_noise=ceg,
        relay_noise=relay,
        dest_noise=cfg.sigma2_sq,
    )
