"""Figures written next to the delimited report files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}

# stable colours per selector, in the order they usually appear
SELECTOR_COLOURS = {
    "frs": "#1b9e77",
    "frs-core": "#66a61e",
    "ig": "#d95f02",
    "cfs": "#7570b3",
    "dw": "#e7298a",
    "universal": "#e6ab02",
    "all-features": "#666666",
}


def fmeasure_figure(cells, path, title=None):
    """Grouped bars of F-measure: one panel per dataset, classifiers on the
    x axis, one bar per selector."""
    datasets = list(dict.fromkeys(c["dataset"] for c in cells))
    with plt.rc_context(RC):
        fig, axes = plt.subplots(len(datasets), 1, figsize=(7.2, 2.4 * len(datasets)),
                                 squeeze=False)
        for ax, ds in zip(axes[:, 0], datasets):
            sub = [c for c in cells if c["dataset"] == ds]
            classifiers = list(dict.fromkeys(c["classifier"] for c in sub))
            selectors = list(dict.fromkeys(c["selector"] for c in sub))
            width = 0.8 / max(1, len(selectors))
            x = np.arange(len(classifiers))
            for i, sel in enumerate(selectors):
                vals = []
                for clf in classifiers:
                    hit = [c["f_measure"] for c in sub if c["classifier"] == clf and c["selector"] == sel]
                    vals.append(hit[0] if hit else np.nan)
                ax.bar(x + (i - (len(selectors) - 1) / 2) * width, vals, width,
                       label=sel, color=SELECTOR_COLOURS.get(sel))
            ax.set_xticks(x)
            ax.set_xticklabels(classifiers)
            ax.set_ylim(0, 1)
            ax.set_ylabel("F-measure")
            ax.set_title(ds)
            ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150, metadata={"Software": None})
        plt.close(fig)
    return path


def trace_figure(reduct_doc, path):
    """Dependency degree after each greedy step of a reduct search."""
    trace = reduct_doc.get("trace", [])
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 2.8))
        if trace:
            ys = [t["gamma"] for t in trace]
            ax.plot(range(1, len(ys) + 1), ys, marker="o", ms=3, color=SELECTOR_COLOURS["frs"])
            ax.axhline(reduct_doc.get("gamma_full", ys[-1]), ls="--", lw=0.8, color="#444444")
            ax.set_xticks(range(1, len(ys) + 1))
            ax.set_xticklabels([t["feature"] for t in trace], rotation=70, ha="right")
        ax.set_ylabel("dependency degree")
        ax.set_title(reduct_doc.get("dataset") or "reduct search")
        fig.tight_layout()
        fig.savefig(path, dpi=150, metadata={"Software": None})
        plt.close(fig)
    return path
