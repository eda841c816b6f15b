"""Figure-style parameter sweeps: config parsing, execution, CSV output.

A sweep walks one axis (relay count, error power, transmit power levels,
or relay count with delay-driven error growth) and evaluates a set of
scheme variants at every point.  Results land in a fixed-schema CSV:

    axis,scheme,ergodic,ci,asymptotic,cutset,alpha,flagged

Cells are 12-significant-digit decimal numbers, empty when not
applicable, or the marker ERROR when a cell's computation failed.  Output
is byte-identical across reruns with the same seed and any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .capacity import (
    asymptotic_capacity,
    average_power_factor,
    cutset_upper_bound,
    dynamic_error,
    eigenvalue_samples,
    ergodic_capacity,
    moments_from_eigenvalues,
    optimal_alpha,
)
from .config import MF, MF_RZF, MF_ZF, NetworkConfig, db_to_linear

AXES = ("K", "e_sq", "PNR", "QNR", "PNR_eq_QNR", "K_dynamic_e")
SWEEP_SCHEMES = (
    "MF",
    "MF-ZF",
    "MF-RZF-fixed",
    "MF-RZF-opt",
    "MF-RZF-conventional",
    "AF-cutset",
)

CSV_HEADER = ("axis", "scheme", "ergodic", "ci", "asymptotic", "cutset", "alpha", "flagged")

_ALLOWED_KEYS = {
    "M",
    "N",
    "K",
    "pnr_db",
    "qnr_db",
    "e",
    "e_sq",
    "alpha",
    "axis",
    "axis_values",
    "scheme",
    "schemes",
    "trials",
    "master_seed",
    "sigma_q",
    "sigma_d",
    "e_values",
    "emit_asymptotic",
    "emit_oracle",
    "eig_samples",
    "oracle_symbols",
}


class ConfigError(ValueError):
    """A sweep configuration file is missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class SweepSpec:
    """Fully validated description of one sweep."""

    base: NetworkConfig
    axis: str
    axis_values: tuple
    schemes: tuple
    trials: int = 1000
    master_seed: int = 1
    sigma_q: float | None = None
    sigma_d: float | None = None
    e_values: tuple | None = None
    emit_asymptotic: bool = False
    emit_oracle: bool = False
    eig_samples: int = 10_000
    oracle_symbols: int = 2000

    def with_(self, **changes) -> "SweepSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class SweepRow:
    """One (axis value, scheme) cell of the result table."""

    axis_value: float
    scheme: str
    ergodic: float | None = None
    ci: float | None = None
    asymptotic: float | None = None
    cutset: float | None = None
    alpha: float | None = None
    flagged: int | None = None
    error: str | None = None


def _fail(msg: str) -> ConfigError:
    return ConfigError(msg)


def parse_config_data(data: dict, source: str = "<config>") -> SweepSpec:
    """Validate a key-value mapping into a SweepSpec."""
    if not isinstance(data, dict):
        raise _fail(f"{source}: top level must be a mapping")
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise _fail(f"{source}: unknown keys {sorted(unknown)}")

    for key in ("M", "N"):
        if key not in data:
            raise _fail(f"{source}: missing required key {key!r}")
    m, n = int(data["M"]), int(data["N"])
    if m < 1:
        raise _fail(f"{source}: M must be at least 1")
    if n < m:
        raise _fail(f"{source}: N={n} < M={m}; relays cannot carry all streams")

    axis = data.get("axis")
    axis_values = data.get("axis_values")
    k_entry = data.get("K")
    if axis is None and isinstance(k_entry, list):
        axis, axis_values, k_entry = "K", k_entry, None
    if axis is None:
        raise _fail(f"{source}: no sweep axis given (set 'axis' or pass K as a list)")
    if axis not in AXES:
        raise _fail(f"{source}: axis must be one of {AXES}, got {axis!r}")
    if not axis_values:
        raise _fail(f"{source}: axis_values must be a nonempty list")
    axis_values = tuple(float(v) for v in axis_values)
    if any(b <= a for a, b in zip(axis_values, axis_values[1:])):
        raise _fail(f"{source}: axis_values must be strictly increasing")
    if axis in ("K", "K_dynamic_e"):
        if any(v != int(v) or v < 1 for v in axis_values):
            raise _fail(f"{source}: relay counts must be integers >= 1")
        axis_values = tuple(int(v) for v in axis_values)

    schemes = data.get("schemes")
    if schemes is None and "scheme" in data:
        schemes = [data["scheme"]]
    if not schemes:
        raise _fail(f"{source}: at least one scheme is required")
    bad = [s for s in schemes if s not in SWEEP_SCHEMES]
    if bad:
        raise _fail(f"{source}: unknown schemes {bad}; choose from {SWEEP_SCHEMES}")
    schemes = tuple(schemes)

    if "e" in data and "e_sq" in data:
        raise _fail(f"{source}: give either e or e_sq, not both")
    e = float(data.get("e", 0.0))
    if "e_sq" in data:
        e_sq = float(data["e_sq"])
        if e_sq < 0:
            raise _fail(f"{source}: e_sq must be nonnegative")
        e = float(np.sqrt(e_sq))
    if e < 0:
        raise _fail(f"{source}: e must be nonnegative")

    base_k = int(k_entry) if k_entry is not None else int(axis_values[0]) if axis in ("K", "K_dynamic_e") else None
    if base_k is None:
        raise _fail(f"{source}: missing required key 'K'")
    if base_k < 1:
        raise _fail(f"{source}: K must be at least 1")

    sigma_q = data.get("sigma_q")
    sigma_d = data.get("sigma_d")
    if axis == "K_dynamic_e":
        if sigma_q is None or sigma_d is None:
            raise _fail(f"{source}: the K_dynamic_e axis needs sigma_q and sigma_d")
        sigma_q, sigma_d = float(sigma_q), float(sigma_d)
        if sigma_q < 0 or sigma_d < 0:
            raise _fail(f"{source}: sigma_q and sigma_d must be nonnegative")

    e_values = data.get("e_values")
    if e_values is not None:
        if axis == "e_sq":
            raise _fail(f"{source}: e_values cannot be combined with the e_sq axis")
        e_values = tuple(float(v) for v in e_values)
        if any(v < 0 for v in e_values):
            raise _fail(f"{source}: e_values must be nonnegative")

    trials = int(data.get("trials", 1000))
    if trials < 100:
        raise _fail(f"{source}: trials must be at least 100")
    eig_samples = int(data.get("eig_samples", 10_000))
    oracle_symbols = int(data.get("oracle_symbols", 2000))

    try:
        base = NetworkConfig.from_db(
            M=m,
            N=n,
            K=base_k,
            pnr_db=float(data.get("pnr_db", 10.0)),
            qnr_db=float(data.get("qnr_db", 10.0)),
            e=e,
            alpha=float(data.get("alpha", 0.0)),
        )
    except ValueError as exc:
        raise _fail(f"{source}: {exc}") from exc

    return SweepSpec(
        base=base,
        axis=axis,
        axis_values=axis_values,
        schemes=schemes,
        trials=trials,
        master_seed=int(data.get("master_seed", 1)),
        sigma_q=sigma_q,
        sigma_d=sigma_d,
        e_values=e_values,
        emit_asymptotic=bool(data.get("emit_asymptotic", False)),
        emit_oracle=bool(data.get("emit_oracle", False)),
        eig_samples=eig_samples,
        oracle_symbols=oracle_symbols,
    )


def parse_config(path) -> SweepSpec:
    """Load and validate a JSON sweep configuration file."""
    if not os.path.exists(path):
        raise _fail(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise _fail(f"{path}: not valid JSON ({exc})") from exc
    return parse_config_data(data, source=str(path))


def _config_at(spec: SweepSpec, axis_value, e_override: float | None) -> NetworkConfig:
    """Instantiate the network config for one axis point."""
    base = spec.base
    changes: dict = {}
    if spec.axis == "K":
        changes["K"] = int(axis_value)
    elif spec.axis == "e_sq":
        changes["e"] = float(np.sqrt(axis_value))
    elif spec.axis == "PNR":
        changes["P"] = db_to_linear(axis_value) * base.sigma1_sq
    elif spec.axis == "QNR":
        changes["Q"] = db_to_linear(axis_value) * base.sigma2_sq
    elif spec.axis == "PNR_eq_QNR":
        changes["P"] = db_to_linear(axis_value) * base.sigma1_sq
        changes["Q"] = db_to_linear(axis_value) * base.sigma2_sq
    elif spec.axis == "K_dynamic_e":
        changes["K"] = int(axis_value)
        if e_override is None:
            changes["e"] = dynamic_error(int(axis_value), spec.sigma_q, spec.sigma_d)
    if e_override is not None:
        changes["e"] = e_override
    return base.with_(**changes)


def _scheme_setup(scheme: str, cfg: NetworkConfig) -> tuple[str, float | None]:
    """Map a sweep scheme label onto (beamformer kind, alpha)."""
    if scheme == "MF":
        return MF, None
    if scheme == "MF-ZF":
        return MF_ZF, None
    if scheme == "MF-RZF-fixed":
        return MF_RZF, cfg.alpha
    if scheme == "MF-RZF-opt":
        return MF_RZF, optimal_alpha(cfg)
    if scheme == "MF-RZF-conventional":
        return MF_RZF, cfg.M * cfg.sigma2_sq / cfg.Q
    raise ValueError(f"unknown sweep scheme {scheme!r}")


def _e_expansion(spec: SweepSpec):
    """Yield (e_override, label_suffix) pairs for the sweep's error levels.

    A plain sweep yields one unsuffixed entry.  With e_values set, every
    value becomes its own row group tagged "@e=<v>"; the dynamic-e axis
    keeps its delay-driven rows unsuffixed and adds the constant-e rows
    for comparison.
    """
    if spec.e_values is None:
        yield None, ""
        return
    if spec.axis == "K_dynamic_e":
        yield None, ""
        for v in spec.e_values:
            yield v, f"@e={v:g}"
    elif len(spec.e_values) == 1:
        yield spec.e_values[0], ""
    else:
        for v in spec.e_values:
            yield v, f"@e={v:g}"


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Execute a sweep and return its result rows in specification order.

    A failed cell records an ERROR marker and never aborts the sweep.
    Rows are deterministic given the master seed; workers only parallelize
    the Monte-Carlo trials inside each cell.
    """
    rows: list[SweepRow] = []
    lam_cache: dict[tuple[int, int], np.ndarray] = {}
    cutset_cache: dict[tuple, float] = {}

    def eig_for(cfg: NetworkConfig, alpha: float):
        key = (cfg.M, cfg.N)
        if key not in lam_cache:
            lam_cache[key] = eigenvalue_samples(
                cfg.M, cfg.N, spec.eig_samples, spec.master_seed
            )
        return moments_from_eigenvalues(lam_cache[key], alpha, spec.eig_samples)

    def cutset_for(cfg: NetworkConfig) -> float:
        key = (cfg.M, cfg.N, cfg.K, round(cfg.P, 12), round(cfg.sigma1_sq, 12))
        if key not in cutset_cache:
            est = cutset_upper_bound(cfg, spec.trials, spec.master_seed, workers=workers)
            cutset_cache[key] = est.mean
        return cutset_cache[key]

    for axis_value in spec.axis_values:
        for e_override, suffix in _e_expansion(spec):
            cfg = _config_at(spec, axis_value, e_override)
            for scheme in spec.schemes:
                label = scheme + suffix
                try:
                    bound = cutset_for(cfg)
                except Exception as exc:  # noqa: BLE001 - per-cell isolation
                    rows.append(
                        SweepRow(axis_value, label, error=f"cutset: {exc}")
                    )
                    continue
                if scheme == "AF-cutset":
                    rows.append(
                        SweepRow(
                            axis_value,
                            label,
                            ergodic=bound,
                            ci=None,
                            asymptotic=None,
                            cutset=bound,
                            alpha=None,
                            flagged=0,
                        )
                    )
                    continue
                try:
                    kind, alpha = _scheme_setup(scheme, cfg)
                    run_cfg = cfg if alpha is None else cfg.with_(alpha=alpha)
                    est = ergodic_capacity(
                        kind,
                        run_cfg,
                        spec.trials,
                        spec.master_seed,
                        workers=workers,
                        oracle_symbols=spec.oracle_symbols if spec.emit_oracle else None,
                    )
                    asym = None
                    if spec.emit_asymptotic:
                        if kind == MF_ZF and cfg.N == cfg.M:
                            asym = None  # closed form undefined at N = M
                        elif kind == MF_RZF:
                            asym = asymptotic_capacity(
                                kind, run_cfg, eig_for(run_cfg, run_cfg.alpha)
                            )
                        else:
                            asym = asymptotic_capacity(kind, run_cfg)
                    rows.append(
                        SweepRow(
                            axis_value,
                            label,
                            ergodic=est.mean,
                            ci=est.half_width,
                            asymptotic=asym,
                            cutset=bound,
                            alpha=alpha,
                            flagged=est.flagged_trials,
                        )
                    )
                except Exception as exc:  # noqa: BLE001 - per-cell isolation
                    rows.append(SweepRow(axis_value, label, error=str(exc)))
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.12g}"


def format_csv(rows: list[SweepRow]) -> str:
    """Render result rows to CSV text (fixed header, 12 significant digits)."""
    if not rows:
        raise ValueError("refusing to emit an empty result table")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for row in rows:
        if row.error is not None:
            writer.writerow(
                [_cell(row.axis_value), row.scheme, "ERROR", "ERROR", "", "", "", ""]
            )
        else:
            writer.writerow(
                [
                    _cell(row.axis_value),
                    row.scheme,
                    _cell(row.ergodic),
                    _cell(row.ci),
                    _cell(row.asymptotic),
                    _cell(row.cutset),
                    _cell(row.alpha),
                    _cell(row.flagged),
                ]
            )
    return buf.getvalue()


def emit_csv(rows: list[SweepRow], path) -> None:
    """Write the result table to disk; empty tables fail before any I/O."""
    text = format_csv(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
