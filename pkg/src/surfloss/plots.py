"""SVG figures: measured vs predicted Q_TLS, and grouped loss-budget bars."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import Region  # noqa: E402

_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_META, bbox_inches="tight")
    plt.close(fig)


def scatter_svg(path, predicted, measured, label=None):
    """Measured mean Q_TLS (standard-error bars) against predicted Q_TLS
    (bars of twice the Monte-Carlo standard deviation)."""
    by_design = {s.design: s for s in measured}
    pts = [(p, by_design[p.design]) for p in predicted if math.isfinite(p.mean_q_tls)]
    x = np.array([p.mean_q_tls for p, _ in pts])
    y = np.array([s.mean_q_tls for _, s in pts])
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.errorbar(x, y, xerr=[2 * p.std_q_tls for p, _ in pts], yerr=[s.std_err_q_tls for _, s in pts],
                fmt="o", color="k", ecolor="tab:blue", capsize=3, label=label)
    for (p, _), xi, yi in zip(pts, x, y):
        ax.annotate(p.design.label, (xi, yi), textcoords="offset points", xytext=(4, 4), fontsize=7)
    if x.size:
        lo = 0.8 * min(x.min(), y.min())
        hi = 1.2 * max(x.max(), y.max())
        ax.plot([lo, hi], [lo, hi], color="tab:green", lw=1)
        ax.set_xlim(lo, hi)
        ax.set_ylim(lo, hi)
    ax.set_xlabel("Predicted $Q_{TLS}$")
    ax.set_ylabel("Measured $Q_{TLS}$")
    if label:
        ax.legend(fontsize=7)
    _save(fig, path)


def budget_svg(path, budgets_by_set, highlight: Region = Region.SA):
    """Grouped bars: one group per design, one bar per dataset.

    Gray bars are the measured total loss; the inset bar is the predicted
    loss of ``highlight``.
    """
    set_names = list(budgets_by_set)
    designs = []
    for budgets in budgets_by_set.values():
        for b in budgets:
            if b.design.label not in designs:
                designs.append(b.design.label)
    width = 0.8 / max(1, len(set_names))
    fig, ax = plt.subplots(figsize=(1.6 * len(designs) + 2, 3.5))
    for k, name in enumerate(set_names):
        by_label = {b.design.label: b for b in budgets_by_set[name]}
        xs = [i - 0.4 + width * (k + 0.5) for i, d in enumerate(designs) if d in by_label]
        sel = [by_label[d] for d in designs if d in by_label]
        ax.bar(xs, [b.total_loss for b in sel], width * 0.9, color="0.7", edgecolor="k",
               label="measured" if k == 0 else None)
        ax.bar(xs, [b.per_region_loss[highlight] for b in sel], width * 0.45, color="tab:blue",
               label=f"predicted {highlight.value}" if k == 0 else None)
        for xi in xs:
            ax.annotate(name, (xi, 0), textcoords="offset points", xytext=(0, -22), ha="center",
                        fontsize=6, rotation=90, annotation_clip=False)
    ax.set_xticks(range(len(designs)))
    ax.set_xticklabels(designs)
    ax.set_ylabel("Dielectric loss $Q_{TLS}^{-1}$")
    ax.legend(fontsize=7)
    _save(fig, path)
