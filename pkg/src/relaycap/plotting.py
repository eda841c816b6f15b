"""Render sweep result tables to capacity-curve figures.

Companion to the CSV output: solid lines with confidence whiskers for the
Monte-Carlo means, dashed lines for the closed-form asymptotics, and a
dotted grey line for the cut-set bound.  Uses matplotlib's object API so
no GUI backend is ever touched.
"""

from __future__ import annotations

from matplotlib.figure import Figure

_AXIS_LABELS = {
    "K": "number of relays K",
    "e_sq": "CSI error power e^2",
    "PNR": "PNR (dB)",
    "QNR": "QNR (dB)",
    "PNR_eq_QNR": "PNR = QNR (dB)",
    "K_dynamic_e": "number of relays K (delay-driven error)",
}


def render_plot(rows, spec, path, title: str | None = None) -> None:
    """Draw capacity curves for a finished sweep and save them to `path`."""
    fig = Figure(figsize=(7.0, 5.0))
    ax = fig.add_subplot(1, 1, 1)

    by_scheme: dict[str, list] = {}
    cutset_pts: dict[float, float] = {}
    for row in rows:
        if row.error is not None:
            continue
        by_scheme.setdefault(row.scheme, []).append(row)
        if row.cutset is not None:
            cutset_pts[row.axis_value] = row.cutset

    for scheme, cells in by_scheme.items():
        if scheme.startswith("AF-cutset"):
            continue
        cells = sorted(cells, key=lambda r: r.axis_value)
        x = [r.axis_value for r in cells]
        y = [r.ergodic for r in cells]
        err = [r.ci if r.ci is not None else 0.0 for r in cells]
        line = ax.errorbar(x, y, yerr=err, marker="o", markersize=3.5, label=scheme)
        asym = [(r.axis_value, r.asymptotic) for r in cells if r.asymptotic is not None]
        if asym:
            ax.plot(
                [a for a, _ in asym],
                [b for _, b in asym],
                linestyle="--",
                color=line.lines[0].get_color(),
                alpha=0.8,
            )

    if cutset_pts:
        xs = sorted(cutset_pts)
        ax.plot(
            xs,
            [cutset_pts[x] for x in xs],
            linestyle=":",
            color="0.4",
            label="cut-set bound",
        )

    if spec.axis in ("K", "K_dynamic_e") and min(r.axis_value for r in rows) > 0:
        ax.set_xscale("log", base=2)
    ax.set_xlabel(_AXIS_LABELS.get(spec.axis, spec.axis))
    ax.set_ylabel("capacity (bits per channel use)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
