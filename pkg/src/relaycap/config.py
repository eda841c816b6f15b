"""Scalar parameters of the dual-hop relay network model."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

MF = "MF"
MF_ZF = "MF-ZF"
MF_RZF = "MF-RZF"
SCHEMES = (MF, MF_ZF, MF_RZF)


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB to linear scale."""
    return float(10.0 ** (value_db / 10.0))


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB."""
    if value <= 0:
        raise ValueError("dB conversion needs a positive ratio")
    import math

    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class NetworkConfig:
    """All scalars of the link model.

    M, N, K: antenna count at source/destination, antennas per relay, and
    number of relays.  Relays must satisfy N >= M to carry all M spatial
    streams.  P and Q are the total source power and the per-relay power
    budget (linear).  sigma1_sq / sigma2_sq are the noise powers at each
    relay and at the destination.  e is the gain of the relay-to-destination
    CSI error (the error power per entry is e**2), alpha the regularizer of
    the RZF precoder, and kind selects the relay beamformer.
    """

    M: int
    N: int
    K: int
    P: float
    Q: float
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    e: float = 0.0
    alpha: float = 0.0
    kind: str = MF

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError("need at least one source/destination antenna")
        if self.N < self.M:
            raise ValueError(
                f"relay antennas N={self.N} must be >= M={self.M} so each "
                "relay can support all M data streams"
            )
        # K == 0 is allowed as the degenerate no-relay network; sweeps
        # require K >= 1.
        if self.K < 0:
            raise ValueError("relay count K must be nonnegative")
        for name in ("P", "Q", "sigma1_sq", "sigma2_sq"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.e < 0:
            raise ValueError("CSI error gain e must be nonnegative")
        if self.alpha < 0:
            raise ValueError("regularizer alpha must be nonnegative")
        if self.kind not in SCHEMES:
            raise ValueError(f"unknown beamformer kind {self.kind!r}")

    @classmethod
    def from_db(
        cls,
        M: int,
        N: int,
        K: int,
        pnr_db: float = 10.0,
        qnr_db: float = 10.0,
        *,
        sigma1_sq: float = 1.0,
        sigma2_sq: float = 1.0,
        **kwargs,
    ) -> "NetworkConfig":
        """Build a config from PNR = P/sigma1^2 and QNR = Q/sigma2^2 in dB."""
        return cls(
            M=M,
            N=N,
            K=K,
            P=db_to_linear(pnr_db) * sigma1_sq,
            Q=db_to_linear(qnr_db) * sigma2_sq,
            sigma1_sq=sigma1_sq,
            sigma2_sq=sigma2_sq,
            **kwargs,
        )

    @property
    def pnr_db(self) -> float:
        return linear_to_db(self.P / self.sigma1_sq)

    @property
    def qnr_db(self) -> float:
        return linear_to_db(self.Q / self.sigma2_sq)

    def with_(self, **changes) -> "NetworkConfig":
        """Return a copy with the given fields replaced."""
        return dataclasses.replace(self, **changes)
