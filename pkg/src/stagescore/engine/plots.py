"""Static figures from a saved metrics report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ..errors import DataFormatError
from ..metrics import MetricsReport


def plot_report(report: MetricsReport, out_dir) -> list[str]:
    """Write a true-vs-predicted score scatter and a per-video IoU bar chart."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    per_video = report.metadata.get("per_video")
    if not per_video:
        raise DataFormatError("report carries no per-video records to plot")

    written = []
    true_scores = per_video["true_scores"]
    pred_scores = per_video["predicted_scores"]

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(true_scores, pred_scores, s=18, alpha=0.8)
    lo = min(min(true_scores), min(pred_scores))
    hi = max(max(true_scores), max(pred_scores))
    ax.plot([lo, hi], [lo, hi], ls="--", c="gray", lw=1)
    srcc_txt = "n/a" if report.srcc is None else f"{report.srcc:.4f}"
    ax.set_xlabel("true score")
    ax.set_ylabel("predicted score")
    ax.set_title(f"score prediction (SRCC {srcc_txt}, R-l2x100 {report.r_l2_x100:.4f})")
    fig.tight_layout()
    scatter_path = out / "score_scatter.png"
    fig.savefig(scatter_path, dpi=120)
    plt.close(fig)
    written.append(str(scatter_path))

    fig, ax = plt.subplots(figsize=(max(5, 0.12 * report.n), 3.5))
    ax.bar(range(report.n), report.per_video_iou, width=0.8)
    for d, frac in sorted(report.aiou.items()):
        ax.axhline(d, ls=":", lw=1, c="red")
        ax.text(report.n, d, f" @{d}: {frac:.2f}", va="center", fontsize=8, c="red")
    ax.set_xlabel("test video")
    ax.set_ylabel("stage IoU")
    ax.set_ylim(0, 1.05)
    ax.set_title("per-video stage interval IoU")
    fig.tight_layout()
    bars_path = out / "iou_bars.png"
    fig.savefig(bars_path, dpi=120)
    plt.close(fig)
    written.append(str(bars_path))
    return written
