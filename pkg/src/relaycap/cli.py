"""Command-line interface.

    relaycap sweep CONFIG.json [--out results.csv] [--seed N] [--trials N]
    relaycap preset fig2 ... fig8 [same flags]
    relaycap verify [--seed N]

Sweeps write the fixed-schema CSV and, unless --no-plot is given, a PNG
figure next to it.  Exit codes: 0 success, 2 configuration error, 3 when
every cell failed (or a verify check failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .sweep import ConfigError, SweepSpec, emit_csv, parse_config, parse_config_data, run_sweep

PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")


def load_preset(name: str) -> SweepSpec:
    """Load one of the packaged figure presets."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    text = resources.files("relaycap.presets").joinpath(f"{name}.json").read_text()
    return parse_config_data(json.loads(text), source=f"preset:{name}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="output CSV path")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--trials", type=int, default=None, help="override trial count")
    parser.add_argument(
        "--workers", type=int, default=1, help="worker threads (results identical)"
    )
    parser.add_argument(
        "--no-plot", action="store_true", help="skip rendering the PNG figure"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaycap",
        description="capacity sweeps for dual-hop MIMO multi-relay beamforming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a JSON config file")
    p_sweep.add_argument("config", type=Path)
    _add_common(p_sweep)

    p_preset = sub.add_parser("preset", help="run a packaged figure preset")
    p_preset.add_argument("name", choices=PRESETS)
    _add_common(p_preset)

    p_verify = sub.add_parser("verify", help="run the statistical self-checks")
    p_verify.add_argument("--seed", type=int, default=1)

    return parser


def _run_spec(spec: SweepSpec, args, default_stem: str) -> int:
    if args.seed is not None:
        spec = spec.with_(master_seed=args.seed)
    if args.trials is not None:
        if args.trials < 100:
            print("error: --trials must be at least 100", file=sys.stderr)
            return 2
        spec = spec.with_(trials=args.trials)

    out = args.out if args.out is not None else Path(f"{default_stem}.csv")
    rows = run_sweep(spec, workers=args.workers)
    if all(r.error is not None for r in rows):
        for r in rows[:5]:
            print(f"error: {r.scheme} @ {r.axis_value}: {r.error}", file=sys.stderr)
        print("error: every sweep cell failed", file=sys.stderr)
        return 3

    emit_csv(rows, out)
    print(f"wrote {out} ({len(rows)} rows)")
    failed = sum(1 for r in rows if r.error is not None)
    if failed:
        print(f"warning: {failed} cell(s) recorded an ERROR marker", file=sys.stderr)

    if not args.no_plot:
        from .plotting import render_plot

        png = out.with_suffix(".png")
        render_plot(rows, spec, png, title=default_stem)
        print(f"wrote {png}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            spec = parse_config(args.config)
            return _run_spec(spec, args, Path(args.config).stem)
        if args.command == "preset":
            spec = load_preset(args.name)
            return _run_spec(spec, args, args.name)
        if args.command == "verify":
            from .verify import run_all

            return 0 if run_all(master_seed=args.seed) else 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
