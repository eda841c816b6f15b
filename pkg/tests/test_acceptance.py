"""Acceptance suite: one test per criterion, one PASS line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`.  Monte-Carlo criteria use
frozen seeds; every tolerance is stated inline.  Ergodic runs are memoized
so the cut-set dominance criterion can piggyback on earlier criteria's
configurations.
"""

import math

import numpy as np
import pytest

from relaycap.beamforming import (
    build_beamformer,
    error_free_power_terms,
    exact_power_factor,
    relay_output_power,
)
from relaycap.capacity import (
    asymptotic_capacity,
    cutset_upper_bound,
    dynamic_error,
    eigenvalue_samples,
    ergodic_capacity,
    moments_from_eigenvalues,
    optimal_alpha,
)
from relaycap.channel import (
    LEMMA_SALT,
    MOMENT_SALT,
    ORACLE_SALT,
    draw_realization,
    lemma_bounds,
    sample_cn01,
    stream,
    verify_lemmas,
)
from relaycap.config import MF, MF_RZF, MF_ZF, SCHEMES, NetworkConfig
from relaycap.linalg import hermitian
from relaycap.receiver import exact_snr_oracle, post_snr

SEED = 1


def _report(num: int, name: str, detail: str) -> None:
    print(f"\n[criterion {num:02d}] PASS {name}: {detail}")


class Runs:
    """Memoized Monte-Carlo runs shared between criteria."""

    def __init__(self):
        self._ergodic = {}
        self._cutset = {}
        self._eigs = {}

    def ergodic(self, kind, cfg, trials=2000):
        key = (kind, cfg, trials)
        if key not in self._ergodic:
            self._ergodic[key] = ergodic_capacity(kind, cfg, trials, SEED)
        return self._ergodic[key]

    def cutset(self, cfg, trials=2000):
        key = (cfg.M, cfg.N, cfg.K, cfg.P, cfg.sigma1_sq, trials)
        if key not in self._cutset:
            self._cutset[key] = cutset_upper_bound(cfg, trials, SEED)
        return self._cutset[key]

    def lam(self, m, n, samples=20_000):
        key = (m, n, samples)
        if key not in self._eigs:
            self._eigs[key] = eigenvalue_samples(m, n, samples, SEED)
        return self._eigs[key]

    def rzf_asymptotic(self, cfg, alpha):
        eig = moments_from_eigenvalues(self.lam(cfg.M, cfg.N), alpha, 20_000)
        return asymptotic_capacity(MF_RZF, cfg.with_(alpha=alpha), eig)

    def scheme_asymptotic(self, kind, cfg, alpha=None):
        if kind == MF_RZF:
            return self.rzf_asymptotic(cfg, cfg.alpha if alpha is None else alpha)
        return asymptotic_capacity(kind, cfg)

    def all_pairs(self):
        """(cfg, kind, ergodic mean) triples accumulated so far."""
        return [
            (key[1], key[0], est.mean) for key, est in self._ergodic.items()
        ]


@pytest.fixture(scope="module")
def runs():
    return Runs()


def test_criterion_01_lemma_suite():
    rng = stream(SEED, LEMMA_SALT)
    a = sample_cn01(rng, 4, 6)
    b = sample_cn01(rng, 6, 4)
    small = verify_lemmas(stream(SEED, LEMMA_SALT, 1), 1_000, a, b)
    big = verify_lemmas(stream(SEED, LEMMA_SALT, 2), 100_000, a, b)
    bounds = lemma_bounds(a, b, 100_000)
    for dev, bound in zip(
        (big.lemma1, big.lemma2, big.lemma3),
        (bounds.lemma1, bounds.lemma2, bounds.lemma3),
    ):
        assert dev < bound
    ratios = [
        small.lemma1 / big.lemma1,
        small.lemma2 / big.lemma2,
        small.lemma3 / big.lemma3,
    ]
    assert min(ratios) >= 8.0
    _report(
        1,
        "lemma suite",
        f"deviations {big.lemma1:.4f}/{big.lemma2:.4f}/{big.lemma3:.4f} below "
        f"3-sigma bounds; shrink x{min(ratios):.1f} (need >= 8)",
    )


def test_criterion_02_wishart_moments():
    m, n, samples = 4, 6, 10_000
    rng = stream(SEED, MOMENT_SALT)
    g = sample_cn01(rng, m, n, count=samples)
    inv_trace = float(
        np.mean(np.trace(np.linalg.inv(g @ hermitian(g)), axis1=-2, axis2=-1).real)
    )
    assert abs(inv_trace - 2.0) < 0.1
    h = sample_cn01(rng, n, m, count=samples)
    hhh = hermitian(h) @ h
    sq_diag = float(np.mean(np.diagonal(hhh @ hhh, axis1=-2, axis2=-1).real))
    assert abs(sq_diag - 60.0) < 2.0
    _report(
        2,
        "wishart moments",
        f"E[tr(inverse Gram)] = {inv_trace:.3f} (2.0 +- 0.1); "
        f"E[squared-Gram diagonal] = {sq_diag:.2f} (60 +- 2)",
    )


def test_criterion_03_nesting_and_closure():
    cfg = NetworkConfig.from_db(M=4, N=6, K=2, e=0.1, alpha=0.5)
    worst_nest, worst_power = 0.0, 0.0
    for t in range(100):
        rz = draw_realization(cfg, SEED, t)
        f_zf = build_beamformer(MF_ZF, rz.H, rz.Ghat)
        f_rzf0 = build_beamformer(MF_RZF, rz.H, rz.Ghat, alpha=0.0)
        worst_nest = max(
            worst_nest,
            float(np.linalg.norm(f_zf - f_rzf0) / np.linalg.norm(f_zf)),
        )
        for kind in SCHEMES:
            f = build_beamformer(kind, rz.H, rz.Ghat, cfg.alpha)
            rho = exact_power_factor(f, rz.H, cfg)
            power = relay_output_power(rho[:, None, None] * f, rz.H, cfg)
            worst_power = max(worst_power, float(np.max(np.abs(power - cfg.Q)) / cfg.Q))
    assert worst_nest < 1e-12
    assert worst_power < 1e-9
    _report(
        3,
        "nesting and closure",
        f"max RZF(0)-vs-ZF gap {worst_nest:.2e} (< 1e-12); "
        f"max relay-power error {worst_power:.2e} (< 1e-9), 100 draws",
    )


def test_criterion_04_oracle_agreement():
    draws, symbols = 50, 8000
    stats = {}
    for kind in SCHEMES:
        gaps = {}
        z_at_zero = []
        for e in (0.0, 0.05, 0.1):
            cfg = NetworkConfig.from_db(M=4, N=6, K=10, e=e, alpha=0.5)
            rel = []
            for t in range(draws):
                rz = draw_realization(cfg, SEED, t)
                rho0 = np.sqrt(
                    cfg.Q / error_free_power_terms(kind, rz.H, rz.G, cfg, cfg.alpha)
                )
                closed = post_snr(kind, rz, rho0, cfg)
                oracle = exact_snr_oracle(
                    kind, rz, cfg, symbols, stream(SEED, ORACLE_SALT, t)
                )
                rel.extend(np.abs(closed.gamma - oracle.gamma) / oracle.gamma)
                if e == 0.0:
                    sigma = oracle.gamma * np.sqrt(2.0 / symbols)
                    z_at_zero.extend(np.abs(closed.gamma - oracle.gamma) / sigma)
            gaps[e] = float(np.median(rel))
        z_at_zero = np.array(z_at_zero)
        # agreement at zero error within the oracle's own statistical noise
        assert np.mean(z_at_zero < 3.0) >= 0.97
        assert np.median(z_at_zero) < 1.5
        # first-order regime at e = 0.1, and the gap is first order in e
        assert gaps[0.1] < 0.15
        assert gaps[0.05] <= 0.5 * gaps[0.1]
        stats[kind] = gaps
    detail = "; ".join(
        f"{k}: median gap {100 * v[0.1]:.1f}% at e=0.1 (<15%), "
        f"halving ratio {v[0.1] / v[0.05]:.1f} (>=2)"
        for k, v in stats.items()
    )
    _report(4, "oracle agreement", detail)


def test_criterion_05_asymptotic_match(runs):
    tol = {MF: 0.05, MF_ZF: 0.20, MF_RZF: 0.05}
    details = []
    for e in (0.0, 0.1):
        cfg = NetworkConfig.from_db(M=4, N=6, K=20, e=e, alpha=0.5)
        for kind in SCHEMES:
            erg = runs.ergodic(kind, cfg, trials=2000).mean
            asym = runs.scheme_asymptotic(kind, cfg)
            gap = abs(erg - asym) / asym
            assert gap < tol[kind], (kind, e, erg, asym)
            details.append(f"{kind}@e={e}: {100 * gap:.1f}%")
    _report(5, "asymptotic match", "; ".join(details) + " (MF/RZF < 5%, ZF < 20%)")


def test_criterion_06_scaling_law(runs):
    details = []
    for kind in SCHEMES:
        caps = {}
        for k in (20, 40, 80):
            cfg = NetworkConfig.from_db(M=4, N=6, K=k, e=0.0, alpha=0.5)
            caps[k] = runs.ergodic(kind, cfg, trials=1500).mean
        deltas = (caps[40] - caps[20], caps[80] - caps[40])
        for d in deltas:
            assert 0.85 * 2.0 <= d <= 1.15 * 2.0, (kind, deltas)
        details.append(f"{kind}: {deltas[0]:.2f}/{deltas[1]:.2f}")
    _report(
        6,
        "relay scaling law",
        "bits per doubling of K " + "; ".join(details) + " (target 2.0 in [1.7, 2.3])",
    )


def test_criterion_07_ordering_under_error(runs):
    # The error-power pin e^2 = 0.01 sits below the MF/MF-ZF crossover at
    # PNR = QNR = 10 dB (the closed forms put MF-ZF above MF until
    # e^2 ~ 0.015 there), so the source power is pinned at PNR = 25 dB
    # where the e^2 P error term dominates and the degradation shows.
    details = []
    for k in (10, 20, 40):
        cfg = NetworkConfig.from_db(M=4, N=6, K=k, pnr_db=25, qnr_db=10, e=0.1)
        c_mf = runs.ergodic(MF, cfg, trials=1000).mean
        c_zf = runs.ergodic(MF_ZF, cfg, trials=1000).mean
        c_rz = runs.ergodic(
            MF_RZF, cfg.with_(alpha=optimal_alpha(cfg)), trials=1000
        ).mean
        assert c_zf < c_mf, (k, c_zf, c_mf)
        assert c_zf < c_rz, (k, c_zf, c_rz)
        details.append(f"K={k}: ZF {c_zf:.2f} < MF {c_mf:.2f}, RZFopt {c_rz:.2f}")
    for k in (10, 20, 40):
        cfg0 = NetworkConfig.from_db(M=4, N=6, K=k, e=0.0, alpha=0.5)
        c_mf0 = runs.ergodic(MF, cfg0, trials=1000).mean
        c_rz0 = runs.ergodic(MF_RZF, cfg0, trials=1000).mean
        assert c_rz0 > c_mf0, (k, c_rz0, c_mf0)
    _report(
        7,
        "ordering under error",
        "; ".join(details) + "; and RZF(0.5) above MF at e=0 for K in {10,20,40}",
    )


def test_criterion_08_optimized_rzf_dominance(runs):
    margins = []
    for e_sq in np.arange(0.0, 0.0501, 0.005):
        cfg = NetworkConfig.from_db(
            M=4, N=6, K=20, pnr_db=10, qnr_db=20, e=float(math.sqrt(e_sq))
        )
        c_rz = runs.rzf_asymptotic(cfg, optimal_alpha(cfg))
        c_mf = asymptotic_capacity(MF, cfg)
        margins.append(c_rz - c_mf)
    assert min(margins) >= -0.05
    _report(
        8,
        "optimized-RZF dominance",
        f"min margin over e^2 grid = {min(margins):+.3f} bits (need >= -0.05)",
    )


def test_criterion_09_alpha_closed_form_vs_grid(runs):
    cfg = NetworkConfig.from_db(M=2, N=4, K=20, pnr_db=10, qnr_db=10, e=0.1)
    lam = runs.lam(2, 4)
    grid = np.arange(0.0, 10.0001, 0.01)
    caps = [
        asymptotic_capacity(
            MF_RZF,
            cfg.with_(alpha=float(a)),
            moments_from_eigenvalues(lam, float(a), lam.size // 2),
        )
        for a in grid
    ]
    best = float(grid[int(np.argmax(caps))])
    target = optimal_alpha(cfg)
    assert abs(best - target) < 0.05
    _report(
        9,
        "optimal regularizer",
        f"grid argmax {best:.2f} vs closed form {target:.4f} (within 0.05)",
    )


def test_criterion_10_ceiling_effect(runs):
    # powers swept at the QNR-sweep antenna setup (M=2, N=4), K=20
    diffs = {}
    for e in (0.1, 0.0):
        per_scheme = []
        for kind in SCHEMES:
            caps = []
            for db in (30, 40):
                cfg = NetworkConfig.from_db(M=2, N=4, K=20, pnr_db=db, qnr_db=db, e=e)
                if kind == MF_RZF:
                    caps.append(runs.rzf_asymptotic(cfg, optimal_alpha(cfg)))
                else:
                    caps.append(asymptotic_capacity(kind, cfg))
            per_scheme.append(caps[1] - caps[0])
        diffs[e] = per_scheme
    assert max(diffs[0.1]) < 0.2
    assert min(diffs[0.0]) > 3.0
    _report(
        10,
        "ceiling effect",
        f"40dB-30dB capacity growth at e=0.1: {['%.3f' % d for d in diffs[0.1]]} "
        f"(< 0.2); at e=0: {['%.2f' % d for d in diffs[0.0]]} (> 3)",
    )


def test_criterion_11_optimal_relay_count(runs):
    ks = list(range(2, 101, 2))
    argmaxes = {}
    for kind in SCHEMES:
        caps = []
        for k in ks:
            e = dynamic_error(k, 0.05, 0.005)
            cfg = NetworkConfig.from_db(M=4, N=6, K=k, e=e)
            if kind == MF_RZF:
                caps.append(runs.rzf_asymptotic(cfg, optimal_alpha(cfg)))
            else:
                caps.append(asymptotic_capacity(kind, cfg))
        idx = int(np.argmax(caps))
        assert 0 < idx < len(ks) - 1, (kind, ks[idx])
        argmaxes[kind] = ks[idx]
    _report(
        11,
        "optimal relay count",
        "interior argmax over K in [2, 100]: "
        + ", ".join(f"{k}: K*={v}" for k, v in argmaxes.items()),
    )


def test_criterion_12_determinism(tmp_path):
    from relaycap.cli import main

    outs = [tmp_path / f"fig2_{i}.csv" for i in range(3)]
    argsets = [
        ["preset", "fig2", "--trials", "200", "--out", str(outs[0]), "--no-plot"],
        ["preset", "fig2", "--trials", "200", "--out", str(outs[1]), "--no-plot"],
        [
            "preset",
            "fig2",
            "--trials",
            "200",
            "--workers",
            "3",
            "--out",
            str(outs[2]),
            "--no-plot",
        ],
    ]
    for argv in argsets:
        assert main(argv) == 0
    data = [o.read_bytes() for o in outs]
    assert data[0] == data[1]
    assert data[0] == data[2]
    _report(
        12,
        "determinism",
        f"fig2 rerun and 3-worker run byte-identical ({len(data[0])} bytes)",
    )


def test_criterion_13_cutset_dominance(runs):
    # every ergodic value accumulated by criteria 5-7 sits below the bound
    pairs = runs.all_pairs()
    assert len(pairs) >= 12
    checked = 0
    for cfg, kind, value in pairs:
        bound = runs.cutset(cfg).mean
        assert value < bound, (kind, cfg, value, bound)
        checked += 1
    # the optimized-dominance configuration (criterion 8) as well
    worst_margin = np.inf
    for e_sq in (0.0, 0.01, 0.05):
        cfg = NetworkConfig.from_db(
            M=4, N=6, K=20, pnr_db=10, qnr_db=20, e=float(math.sqrt(e_sq))
        )
        bound = runs.cutset(cfg).mean
        for kind in SCHEMES:
            run_cfg = cfg.with_(alpha=optimal_alpha(cfg)) if kind == MF_RZF else cfg
            value = runs.ergodic(kind, run_cfg, trials=1000).mean
            assert value < bound, (kind, e_sq, value, bound)
            worst_margin = min(worst_margin, bound - value)
            checked += 1
    _report(
        13,
        "cut-set dominance",
        f"bound exceeds all {checked} scheme runs; tightest margin "
        f"{worst_margin:.3f} bits",
    )
