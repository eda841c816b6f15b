"""Self-check suites: trace-lemma estimators, moment sanity, oracle accord.

Backs the `relaycap verify` CLI command.  Each check returns a
(name, passed, detail) tuple; the runner prints one line per check.
"""

from __future__ import annotations

import numpy as np

from .beamforming import (
    build_beamformer,
    error_free_power_terms,
    exact_power_factor,
    relay_output_power,
)
from .channel import (
    LEMMA_SALT,
    MOMENT_SALT,
    ORACLE_SALT,
    draw_realization,
    lemma_bounds,
    sample_cn01,
    stream,
    verify_lemmas,
)
from .config import MF, MF_RZF, MF_ZF, NetworkConfig
from .linalg import hermitian
from .receiver import exact_snr_oracle, post_snr


def check_lemmas(master_seed: int = 1, big_trials: int = 100_000):
    """Trace-identity estimators: within 3-sigma bounds and shrinking."""
    rng = stream(master_seed, LEMMA_SALT)
    A = sample_cn01(rng, 4, 6)
    B = sample_cn01(rng, 6, 4)
    small = verify_lemmas(stream(master_seed, LEMMA_SALT, 1), big_trials // 100, A, B)
    big = verify_lemmas(stream(master_seed, LEMMA_SALT, 2), big_trials, A, B)
    bounds = lemma_bounds(A, B, big_trials)
    within = (
        big.lemma1 < bounds.lemma1
        and big.lemma2 < bounds.lemma2
        and big.lemma3 < bounds.lemma3
    )
    ratios = (
        small.lemma1 / big.lemma1,
        small.lemma2 / big.lemma2,
        small.lemma3 / big.lemma3,
    )
    shrinks = all(r >= 8.0 for r in ratios)
    detail = (
        f"deviations {big.lemma1:.4f}/{big.lemma2:.4f}/{big.lemma3:.4f} vs "
        f"bounds {bounds.lemma1:.4f}/{bounds.lemma2:.4f}/{bounds.lemma3:.4f}; "
        f"shrink x{min(ratios):.1f}"
    )
    return "lemma-estimators", bool(within and shrinks), detail


def check_wishart_moments(master_seed: int = 1, samples: int = 10_000):
    """Inverse-Gram trace mean near M/(N-M); squared-Gram diagonal near MN+N^2."""
    m, n = 4, 6
    rng = stream(master_seed, MOMENT_SALT)
    g = sample_cn01(rng, m, n, count=samples)
    inv_trace = np.mean(
        np.trace(np.linalg.inv(g @ hermitian(g)), axis1=-2, axis2=-1).real
    )
    h = sample_cn01(rng, n, m, count=samples)
    hhh = hermitian(h) @ h
    sq_diag = np.mean(np.diagonal(hhh @ hhh, axis1=-2, axis2=-1).real)
    ok = abs(inv_trace - 2.0) < 0.1 and abs(sq_diag - 60.0) < 2.0
    return (
        "wishart-moments",
        bool(ok),
        f"E[tr(inv Gram)] = {inv_trace:.3f} (target 2.0 +- 0.1); "
        f"E[diag(Gram^2)] = {sq_diag:.2f} (target 60 +- 2)",
    )


def check_nesting_and_closure(master_seed: int = 1, draws: int = 20):
    """RZF at alpha=0 equals ZF; exact scaling meets the power budget."""
    cfg = NetworkConfig.from_db(M=4, N=6, K=1, e=0.1)
    worst_nest = 0.0
    worst_power = 0.0
    for t in range(draws):
        rz = draw_realization(cfg, master_seed, t)
        f_zf = build_beamformer(MF_ZF, rz.H, rz.Ghat)
        f_rzf0 = build_beamformer(MF_RZF, rz.H, rz.Ghat, alpha=0.0)
        worst_nest = max(
            worst_nest, float(np.linalg.norm(f_zf - f_rzf0) / np.linalg.norm(f_zf))
        )
        for kind, alpha in ((MF, 0.0), (MF_ZF, 0.0), (MF_RZF, 0.5)):
            f = build_beamformer(kind, rz.H, rz.Ghat, alpha)
            rho = exact_power_factor(f, rz.H, cfg)
            power = relay_output_power(rho * f, rz.H, cfg)
            worst_power = max(worst_power, float(np.max(np.abs(power - cfg.Q) / cfg.Q)))
    ok = worst_nest < 1e-12 and worst_power < 1e-9
    return (
        "nesting-and-power-closure",
        bool(ok),
        f"max nesting gap {worst_nest:.2e} (limit 1e-12); "
        f"max power error {worst_power:.2e} (limit 1e-9)",
    )


def check_oracle_agreement(master_seed: int = 1, draws: int = 5, symbols: int = 4000):
    """Closed-form SINR matches the received-signal oracle at zero error."""
    cfg = NetworkConfig.from_db(M=4, N=6, K=10, e=0.0)
    worst_z = 0.0
    for t in range(draws):
        rz = draw_realization(cfg, master_seed, t)
        rho = np.sqrt(cfg.Q / error_free_power_terms(MF, rz.H, rz.G, cfg))
        closed = post_snr(MF, rz, rho, cfg)
        oracle = exact_snr_oracle(
            MF, rz, cfg, symbols, stream(master_seed, ORACLE_SALT, t)
        )
        sigma = oracle.gamma * np.sqrt(2.0 / symbols)
        worst_z = max(worst_z, float(np.max(np.abs(closed.gamma - oracle.gamma) / sigma)))
    ok = worst_z < 4.0
    return (
        "oracle-agreement",
        bool(ok),
        f"max |closed - oracle| = {worst_z:.2f} estimator sigmas (limit 4)",
    )


def run_all(master_seed: int = 1) -> bool:
    """Run every check, print one PASS/FAIL line each, return overall truth."""
    checks = (
        check_lemmas(master_seed),
        check_wishart_moments(master_seed),
        check_nesting_and_closure(master_seed),
        check_oracle_agreement(master_seed),
    )
    all_ok = True
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        all_ok &= ok
    return all_ok
