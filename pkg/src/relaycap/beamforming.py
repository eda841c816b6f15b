"""Relay beamformer construction and power-control factors.

Each relay applies an N x N linear transform F built from its perfect
source-relay CSI H and its (possibly corrupted) relay-destination CSI
Ghat:

    MF      F = Ghat^H H^H
    MF-ZF   F = Ghat^H (Ghat Ghat^H)^-1 H^H
    MF-RZF  F = Ghat^H (Ghat Ghat^H + alpha I)^-1 H^H

MF-ZF is the alpha = 0 special case of MF-RZF.  A scalar power-control
factor rho scales F so the relay's average transmit power meets its
budget Q; both the exact factor and its first-order expansion in the
error gain e are provided.

All functions broadcast over leading batch axes, so a (K, ...) stack of
per-relay matrices is processed in one call.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import MF, MF_RZF, MF_ZF, SCHEMES, NetworkConfig
from .linalg import COND_LIMIT, SingularMatrixError, hermitian


class DegenerateBeamformerError(ValueError):
    """The beamformer radiates no power, so no scaling can meet the budget."""


def _check_kind(kind: str) -> None:
    if kind not in SCHEMES:
        raise ValueError(f"unknown beamformer kind {kind!r}")


def gram_condition(Ghat: np.ndarray) -> np.ndarray:
    """2-norm condition number of Ghat Ghat^H, batched."""
    g = np.asarray(Ghat, dtype=np.complex128)
    return np.linalg.cond(g @ hermitian(g))


def build_beamformer(kind: str, H, Ghat, alpha: float = 0.0, check: bool = True):
    """Relay beamforming matrix F for one scheme.

    H is (..., N, M), Ghat is (..., M, N); returns (..., N, N).  For MF-ZF
    (and MF-RZF at alpha = 0) a SingularMatrixError is raised when the Gram
    matrix condition estimate exceeds COND_LIMIT, unless ``check`` is False,
    in which case the solve proceeds and the caller flags the draw.
    """
    _check_kind(kind)
    H = np.asarray(H, dtype=np.complex128)
    Ghat = np.asarray(Ghat, dtype=np.complex128)
    if H.shape[-2] != Ghat.shape[-1] or H.shape[-1] != Ghat.shape[-2]:
        raise ValueError(f"dimension mismatch: H {H.shape} vs Ghat {Ghat.shape}")
    Hh = hermitian(H)
    Gh = hermitian(Ghat)
    if kind == MF:
        return Gh @ Hh
    gram = Ghat @ Gh
    if kind == MF_RZF:
        m = gram.shape[-1]
        gram = gram + alpha * np.eye(m)
    if check and (kind == MF_ZF or alpha == 0.0):
        if np.any(np.linalg.cond(gram) > COND_LIMIT):
            raise SingularMatrixError(
                "Ghat Ghat^H is numerically singular; precoder inverse unreliable"
            )
    return Gh @ np.linalg.solve(gram, Hh)


def relay_output_power(F, H, cfg: NetworkConfig):
    """Average transmit power tr{F ((P/M) H H^H + sigma1^2 I) F^H} of a relay.

    With the exact power-control factor applied to F this equals Q.
    """
    F = np.asarray(F, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    n = H.shape[-2]
    S = (cfg.P / cfg.M) * (H @ hermitian(H)) + cfg.sigma1_sq * np.eye(n)
    power = np.einsum("...ij,...jk,...ik->...", F, S, F.conj()).real
    return float(power) if power.ndim == 0 else power


def exact_power_factor(F, H, cfg: NetworkConfig):
    """Exact power-control factor rho = sqrt(Q / relay_output_power(F))."""
    power = relay_output_power(F, H, cfg)
    if np.any(np.asarray(power) <= 0.0):
        raise DegenerateBeamformerError("beamformer radiates no power")
    return np.sqrt(cfg.Q / power)


def _source_side_quadratic(H, cfg: NetworkConfig):
    """X = H^H ((P/M) H H^H + sigma1^2 I) H = (P/M)(H^H H)^2 + sigma1^2 H^H H."""
    HhH = hermitian(H) @ H
    return (cfg.P / cfg.M) * (HhH @ HhH) + cfg.sigma1_sq * HhH


def _btrace(a) -> np.ndarray:
    """Real trace over the last two axes."""
    return np.trace(a, axis1=-2, axis2=-1).real


def error_free_power_terms(kind: str, H, G, cfg: NetworkConfig, alpha: float = 0.0):
    """The scheme's power denominator u evaluated at the true channel G.

    rho = sqrt(Q / u) is the error-free power-control factor.
    """
    _check_kind(kind)
    H = np.asarray(H, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    X = _source_side_quadratic(H, cfg)
    W = G @ hermitian(G)
    if kind == MF:
        return _btrace(X @ W)
    if kind == MF_ZF:
        return _btrace(np.linalg.solve(W, X))
    m = W.shape[-1]
    Ga = np.linalg.inv(W + alpha * np.eye(m))
    return _btrace(X @ (Ga - alpha * (Ga @ Ga)))


@dataclass(frozen=True)
class PowerFactorBreakdown:
    """Exact power factor next to its first-order expansion in e.

    rho_zero = sqrt(Q/u) is the error-free factor; u and v are the zeroth
    and first-order coefficients of the power denominator's expansion in e;
    rho_taylor = rho_zero * (1 -+ e v / (2u)) approximates rho_exact with an
    O(e^2) remainder (minus sign for MF, plus for MF-ZF and MF-RZF).
    """

    rho_exact: np.ndarray
    rho_zero: np.ndarray
    u: np.ndarray
    v: np.ndarray
    rho_taylor: np.ndarray


def taylor_power_factor(kind: str, H, G, Omega, cfg: NetworkConfig) -> PowerFactorBreakdown:
    """First-order expansion of the power-control factor in the error gain e.

    Expands the power denominator tr{F(...)F^H} around the true channel G
    with Ghat = G + e Omega and keeps the O(e) term.  For MF the denominator
    grows with e (rho shrinks); for MF-ZF and MF-RZF it shrinks (rho grows).
    """
    _check_kind(kind)
    if cfg.e > 0.3:
        warnings.warn(
            "first-order power factor is unreliable for e > 0.3",
            RuntimeWarning,
            stacklevel=2,
        )
    H = np.asarray(H, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    Omega = np.asarray(Omega, dtype=np.complex128)
    X = _source_side_quadratic(H, cfg)
    W = G @ hermitian(G)
    Ge = G @ hermitian(Omega) + Omega @ hermitian(G)

    if kind == MF:
        u = _btrace(X @ W)
        v = _btrace(X @ Ge)
        sign = -1.0
    elif kind == MF_ZF:
        WinvX = np.linalg.solve(W, X)
        WinvGe = np.linalg.solve(W, Ge)
        u = _btrace(WinvX)
        v = _btrace(WinvX @ WinvGe)
        sign = 1.0
    else:
        m = W.shape[-1]
        Ga = np.linalg.inv(W + cfg.alpha * np.eye(m))
        u = _btrace(X @ (Ga - cfg.alpha * (Ga @ Ga)))
        inner = Ge @ Ga @ W + W @ Ga @ Ge - Ge
        v = _btrace(X @ Ga @ inner @ Ga)
        sign = 1.0

    rho_zero = np.sqrt(cfg.Q / u)
    rho_taylor = rho_zero * (1.0 + sign * cfg.e * v / (2.0 * u))
    Ghat = G + cfg.e * Omega
    F = build_beamformer(kind, H, Ghat, cfg.alpha, check=False)
    rho_exact = exact_power_factor(F, H, cfg)
    return PowerFactorBreakdown(
        rho_exact=rho_exact, rho_zero=rho_zero, u=u, v=v, rho_taylor=rho_taylor
    )
