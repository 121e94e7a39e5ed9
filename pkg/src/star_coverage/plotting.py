"""Figure rendering for sweep reports (headless, file output only)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .coverage import SweepAxis, SweepRow

_AXIS_LABELS = {
    SweepAxis.N_ELEMENTS: "number of surface elements N",
    SweepAxis.SNR_DB: "transmit SNR (dB)",
    SweepAxis.BETA_SQ: "squared amplitude coefficient of the served user",
}

_STYLES = {
    ("noma", "reflect"): dict(color="tab:blue", linestyle="-", marker="o"),
    ("noma", "transmit"): dict(color="tab:red", linestyle="-", marker="s"),
    ("oma", "reflect"): dict(color="tab:blue", linestyle="--", marker="^"),
    ("oma", "transmit"): dict(color="tab:red", linestyle="--", marker="v"),
}


def render_sweep_figure(rows: list[SweepRow], axis: SweepAxis, path: str) -> None:
    """Plot max coverage distance vs. the swept parameter, one line per series.

    Rows with an error status (NaN distance) are dropped from their series.
    """
    series: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for row in rows:
        if math.isnan(row.max_distance_m):
            continue
        series.setdefault((row.protocol.value, row.side.value), []).append(
            (row.axis_value, row.max_distance_m)
        )

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for key in sorted(series):
        points = sorted(series[key])
        style = _STYLES.get(key, {})
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            label=f"{key[0].upper()} {key[1]}",
            markersize=4,
            linewidth=1.5,
            **style,
        )
    ax.set_xlabel(_AXIS_LABELS[axis])
    ax.set_ylabel("max coverage distance (m)")
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
