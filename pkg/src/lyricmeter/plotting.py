"""Figure rendering for the report paths (PNG files next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import AblationRow, ConfusionMatrix, RocCurve


def save_roc_figure(roc: RocCurve, path: str, label: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    xs = [p[0] for p in roc.points]
    ys = [p[1] for p in roc.points]
    name = f"{label} (AUC = {roc.auc:.3f})" if label else f"AUC = {roc.auc:.3f}"
    ax.plot(xs, ys, lw=1.5, label=name)
    ax.plot([0, 1], [0, 1], ls="--", color="gray", lw=0.8)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title("ROC curve")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_confusion_figure(cm: ConfusionMatrix, path: str, labels=("3/4", "4/4")) -> None:
    counts = np.array([[cm.tn, cm.fp], [cm.fn, cm.tp]], dtype=float)
    fig, ax = plt.subplots(figsize=(4, 3.5))
    ax.imshow(counts, cmap="Blues")
    for i in range(2):
        for j in range(2):
            color = "white" if counts[i, j] > counts.max() / 2 else "black"
            ax.text(j, i, f"{int(counts[i, j])}", ha="center", va="center", color=color)
    ax.set_xticks([0, 1], [f"pred {labels[0]}", f"pred {labels[1]}"])
    ax.set_yticks([0, 1], [f"true {labels[0]}", f"true {labels[1]}"])
    ax.set_title("Confusion matrix (pooled test folds)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_figure(R: np.ndarray, names: list[str], path: str) -> None:
    fig, ax = plt.subplots(figsize=(0.45 * len(names) + 2, 0.45 * len(names) + 1.5))
    im = ax.imshow(R, vmin=-1.0, vmax=1.0, cmap="coolwarm")
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(names)), names, fontsize=7)
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title("Feature correlation matrix")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_histogram_figure(per_class_counts: dict, pattern: str, path: str) -> None:
    """Overlaid per-class histograms of per-song pattern counts."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, counts in sorted(per_class_counts.items()):
        if not counts:
            continue
        bins = np.arange(0, max(counts) + 2) - 0.5
        ax.hist(counts, bins=bins, alpha=0.55, label=label, density=True)
    ax.set_xlabel(f'per-song "{pattern}" pattern count')
    ax.set_ylabel("fraction of songs")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_ablation_figure(rows: list[AblationRow], path: str) -> None:
    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(rows)), 3.5))
    aucs = [row.metrics["auc"] for row in rows]
    ax.bar(range(len(rows)), aucs, color="steelblue")
    ax.set_xlabel("grid row")
    ax.set_ylabel("ROC AUC")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Ablation study: AUC per feature combination")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
