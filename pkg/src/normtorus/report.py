"""
Figure rendering and plot-data series for classification runs.

Figures are rendered headless (Agg) next to the delimited output; the
plot-data path emits a (log10 X, cumulative count) CSV for external tools.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_histogram(tally: dict, out_path) -> None:
    """Bar chart of epimorphism counts per discriminant decade."""
    hist = tally.get("histogram_by_disc_decade", {})
    decades = sorted(int(k) for k in hist)
    counts = [hist[str(d)] for d in decades]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(decades, counts, color="#34618c")
    ax.set_xlabel("log10 |disc| (decade)")
    ax.set_ylabel("surjective tuples")
    ax.set_title(f"{tally.get('group', '?')} up to X = {tally.get('X', '?')}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_data_series(records, X: int, checkpoints: int = 10) -> str:
    """CSV of cumulative (fields-scale) counts at geometric checkpoints.

    records: iterable of (disc, serialized tuple, Verdict), any order.
    """
    discs = sorted((d, v.wa, not v.hnp) for d, _s, v in records)
    lines = ["log10_X,tuples,wa_tuples,hnp_fail_tuples"]
    if X < 2:
        return "\n".join(lines) + "\n"
    i = total = wa = hf = 0
    for k in range(1, checkpoints + 1):
        cut = X ** (k / checkpoints)
        while i < len(discs) and discs[i][0] <= cut:
            total += 1
            wa += discs[i][1]
            hf += discs[i][2]
            i += 1
        lines.append(f"{math.log10(cut):.6f},{total},{wa},{hf}")
    return "\n".join(lines) + "\n"
