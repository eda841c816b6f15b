"""Capacity simulator for dual-hop MIMO multi-relay networks.

Monte-Carlo and closed-form evaluation of the ergodic and asymptotic
capacity of matched-filter, zero-forcing and regularized zero-forcing
relay beamforming with Gaussian relay-to-destination CSI error.
"""

from .beamforming import (
    DegenerateBeamformerError,
    PowerFactorBreakdown,
    build_beamformer,
    exact_power_factor,
    relay_output_power,
    taylor_power_factor,
)
from .capacity import (
    CapacityEstimate,
    EigenExpectations,
    asymptotic_capacity,
    average_power_factor,
    cutset_upper_bound,
    dynamic_error,
    eigen_expectations,
    ergodic_capacity,
    optimal_alpha,
)
from .channel import (
    ChannelRealization,
    LemmaDeviations,
    RngStream,
    corrupt_csi,
    draw_realization,
    lemma_bounds,
    sample_cn01,
    stream,
    verify_lemmas,
)
from .config import MF, MF_RZF, MF_ZF, SCHEMES, NetworkConfig
from .linalg import SingularMatrixError, hermitian_eig, pseudo_inverse, qr_decompose
from .receiver import (
    EffectiveChannel,
    StreamSnrReport,
    effective_channel,
    exact_snr_oracle,
    post_snr,
    qrd_detect,
)
from .sweep import ConfigError, SweepRow, SweepSpec, emit_csv, parse_config, run_sweep

__version__ = "0.1.0"

__all__ = [
    "MF",
    "MF_ZF",
    "MF_RZF",
    "SCHEMES",
    "NetworkConfig",
    "SingularMatrixError",
    "qr_decompose",
    "pseudo_inverse",
    "hermitian_eig",
    "RngStream",
    "stream",
    "sample_cn01",
    "corrupt_csi",
    "draw_realization",
    "ChannelRealization",
    "verify_lemmas",
    "lemma_bounds",
    "LemmaDeviations",
    "build_beamformer",
    "relay_output_power",
    "exact_power_factor",
    "taylor_power_factor",
    "PowerFactorBreakdown",
    "DegenerateBeamformerError",
    "EffectiveChannel",
    "effective_channel",
    "qrd_detect",
    "post_snr",
    "exact_snr_oracle",
    "StreamSnrReport",
    "CapacityEstimate",
    "EigenExpectations",
    "ergodic_capacity",
    "cutset_upper_bound",
    "average_power_factor",
    "asymptotic_capacity",
    "eigen_expectations",
    "optimal_alpha",
    "dynamic_error",
    "ConfigError",
    "SweepSpec",
    "SweepRow",
    "parse_config",
    "run_sweep",
    "emit_csv",
]
