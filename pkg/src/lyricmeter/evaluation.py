"""Metrics, cross-validation, the ablation grid runner, and correlations.

The positive class is 4/4 (the majority class) throughout.  Cross-validation
resamples the training partition of each fold only, so synthetic rows never
leak into a test partition; ``resample_scope="whole"`` balances the full
dataset up front instead, for comparison runs.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import models
from .errors import FormatError, InputOutputError, UsageError
from .features import (
    FOUR_FOUR,
    PATTERN_NAMES,
    STATISTICS,
    STRUCTURAL_TYPES,
    FeatureSpec,
    LabeledDataset,
    build_matrix,
)
from .resampling import ResamplingReport, SmoteParams, resample

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "auc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, y_true: np.ndarray, y_pred: np.ndarray) -> "ConfusionMatrix":
        y_true = np.asarray(y_true, dtype=int)
        y_pred = np.asarray(y_pred, dtype=int)
        return cls(
            tp=int(np.sum((y_true == 1) & (y_pred == 1))),
            fp=int(np.sum((y_true == 0) & (y_pred == 1))),
            fn=int(np.sum((y_true == 1) & (y_pred == 0))),
            tn=int(np.sum((y_true == 0) & (y_pred == 0))),
        )

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def prf_metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """(accuracy, precision, recall, f1); zero-denominator cases yield 0."""
    if cm.total == 0:
        raise UsageError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if (cm.tp + cm.fp) else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if (cm.tp + cm.fn) else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if (precision + recall)
        else 0.0
    )
    return accuracy, precision, recall, f1


@dataclass(frozen=True)
class RocCurve:
    points: tuple  # ordered (fpr, tpr) pairs from (0,0) to (1,1)
    auc: float


def roc_auc(scores, labels) -> RocCurve:
    """ROC by sweeping thresholds over distinct scores (ties grouped).

    The trapezoidal area equals the pairwise concordance probability with
    tied scores counted one half.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise UsageError("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_y = y[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(y)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        tp += int(np.sum(sorted_y[i:j] == 1))
        fp += int(np.sum(sorted_y[i:j] == 0))
        points.append((fp / n_neg, tp / n_pos))
        i = j
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=tuple(points), auc=float(auc))


def stratified_kfold(labels, k: int = 5, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint folds with per-fold class proportions within one sample.

    Indices are shuffled within each class by the seeded generator, then
    dealt round-robin to folds.
    """
    labels = list(labels)
    if k < 2:
        raise UsageError("k must be >= 2")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, lb in enumerate(labels):
        by_class.setdefault(lb, []).append(i)
    fold_members: list[list[int]] = [[] for _ in range(k)]
    for lb in sorted(by_class):
        idx = np.array(by_class[lb])
        if len(idx) < k:
            raise UsageError(f"class {lb!r} has fewer than {k} samples")
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            fold_members[pos % k].append(int(i))
    all_idx = np.arange(len(labels))
    folds = []
    for members in fold_members:
        test = np.array(sorted(members))
        train = np.setdiff1d(all_idx, test)
        folds.append((train, test))
    return folds


@dataclass
class FoldResult:
    metrics: dict
    confusion: ConfusionMatrix
    resampling: ResamplingReport | None = None


@dataclass
class EvalReport:
    folds: list
    aggregate: dict
    roc: RocCurve
    pooled_confusion: ConfusionMatrix
    config: dict = field(default_factory=dict)
    whole_resampling: ResamplingReport | None = None

    def to_dict(self) -> dict:
        doc = {
            "config": self.config,
            "aggregate": self.aggregate,
            "folds": [
                {
                    "metrics": f.metrics,
                    "confusion": f.confusion.as_dict(),
                    "resampling": _report_dict(f.resampling),
                }
                for f in self.folds
            ],
            "pooled_confusion": self.pooled_confusion.as_dict(),
            "pooled_auc": self.roc.auc,
        }
        if self.whole_resampling is not None:
            doc["whole_resampling"] = _report_dict(self.whole_resampling)
        return doc


def _report_dict(report: ResamplingReport | None):
    if report is None:
        return None
    return {
        "pre_counts": report.pre_counts,
        "post_counts": report.post_counts,
        "synthetic_count": report.synthetic_count,
        "tomek_removals": report.tomek_removals,
    }


def _subset(dataset: LabeledDataset, idx: np.ndarray) -> LabeledDataset:
    return LabeledDataset(
        X=dataset.X[idx],
        labels=[dataset.labels[i] for i in idx],
        ids=[dataset.ids[i] for i in idx],
        feature_names=dataset.feature_names,
    )


def cross_validate(
    dataset: LabeledDataset,
    model_kind: str = "gbdt",
    model_cfg=None,
    resample_kind: str = "none",
    smote_params: SmoteParams | None = None,
    k: int = 5,
    seed: int = 0,
    resample_scope: str = "folds",
    threshold: float = 0.5,
) -> EvalReport:
    """Stratified k-fold evaluation with per-fold training-set resampling."""
    if resample_scope not in ("folds", "whole"):
        raise UsageError(f"bad resample_scope: {resample_scope!r}")
    smote_params = smote_params or SmoteParams(seed=seed)

    whole_report = None
    if resample_scope == "whole" and resample_kind != "none":
        dataset, whole_report = resample(dataset, resample_kind, smote_params)

    folds = stratified_kfold(dataset.labels, k=k, seed=seed)
    fold_results: list[FoldResult] = []
    pooled_scores = np.empty(len(dataset))
    pooled_truth = np.empty(len(dataset), dtype=int)
    pooled_pred = np.empty(len(dataset), dtype=int)
    for train_idx, test_idx in folds:
        train = _subset(dataset, train_idx)
        fold_report = None
        if resample_scope == "folds" and resample_kind != "none":
            train, fold_report = resample(train, resample_kind, smote_params)
        model = models.train(model_kind, train.X, train.y(), model_cfg)
        test = _subset(dataset, test_idx)
        scores = models.predict_proba(model, test.X)
        y_true = test.y()
        y_pred = (scores >= threshold).astype(int)
        cm = ConfusionMatrix.from_predictions(y_true, y_pred)
        accuracy, precision, recall, f1 = prf_metrics(cm)
        auc = roc_auc(scores, y_true).auc
        fold_results.append(
            FoldResult(
                metrics={
                    "accuracy": accuracy,
                    "precision": precision,
                    "recall": recall,
                    "f1": f1,
                    "auc": auc,
                },
                confusion=cm,
                resampling=fold_report,
            )
        )
        pooled_scores[test_idx] = scores
        pooled_truth[test_idx] = y_true
        pooled_pred[test_idx] = y_pred

    aggregate = {
        name: float(np.mean([f.metrics[name] for f in fold_results]))
        for name in METRIC_NAMES
    }
    return EvalReport(
        folds=fold_results,
        aggregate=aggregate,
        roc=roc_auc(pooled_scores, pooled_truth),
        pooled_confusion=ConfusionMatrix.from_predictions(pooled_truth, pooled_pred),
        config={
            "model": model_kind,
            "resample": resample_kind,
            "resample_scope": resample_scope,
            "folds": k,
            "seed": seed,
            "positive_class": FOUR_FOUR,
        },
        whole_resampling=whole_report,
    )


# --- ablation ---------------------------------------------------------------

GRID_COLUMNS = ("Overall", "Repeat", "Count", "Mean", "Mode", "10", "100", "1000")

_FLAG_TO_SPEC = {
    "Overall": ("structural_types", "overall"),
    "Repeat": ("structural_types", "repeat"),
    "Count": ("statistics", "count"),
    "Mean": ("statistics", "mean"),
    "Mode": ("statistics", "mode"),
    "10": ("patterns", "10"),
    "100": ("patterns", "100"),
    "1000": ("patterns", "1000"),
}


@dataclass(frozen=True)
class AblationRow:
    flags: dict
    metrics: dict

    def spec(self) -> FeatureSpec:
        chosen = {"structural_types": [], "patterns": [], "statistics": []}
        for col in GRID_COLUMNS:
            if self.flags[col]:
                group, value = _FLAG_TO_SPEC[col]
                chosen[group].append(value)
        return FeatureSpec(
            structural_types=tuple(
                s for s in STRUCTURAL_TYPES if s in chosen["structural_types"]
            ),
            patterns=tuple(p for p in PATTERN_NAMES if p in chosen["patterns"]),
            statistics=tuple(t for t in STATISTICS if t in chosen["statistics"]),
        )


def load_ablation_grid(path: str | None = None) -> list[dict]:
    """Grid rows as {column: bool}; None loads the bundled default grid."""
    if path is None:
        from importlib import resources

        text = resources.files("lyricmeter.data").joinpath("ablation_grid.csv").read_text("utf-8")
        lines = text.splitlines()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise InputOutputError(f"cannot read grid file: {exc}") from exc
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty ablation grid") from None
    if tuple(header) != GRID_COLUMNS:
        raise FormatError(
            f"grid header must be {','.join(GRID_COLUMNS)}", line_number=1
        )
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(GRID_COLUMNS):
            raise FormatError("wrong column count", line_number=lineno)
        rows.append({col: cell.strip() == "*" for col, cell in zip(GRID_COLUMNS, row)})
    if not rows:
        raise FormatError("ablation grid has no rows")
    return rows


def run_ablation(
    pattern_sets: list,
    grid: list[dict],
    model_kind: str = "gbdt",
    model_cfg=None,
    resample_kind: str = "smotetomek",
    smote_params: SmoteParams | None = None,
    k: int = 5,
    seed: int = 0,
    noise_removal: bool = False,
) -> list[AblationRow]:
    """Re-featurize and cross-validate once per grid row, in grid order."""
    if not grid:
        raise UsageError("ablation grid is empty")
    out = []
    for flags in grid:
        row = AblationRow(flags=dict(flags), metrics={})
        spec = row.spec()
        dataset, _ = build_matrix(pattern_sets, spec, noise_removal=noise_removal)
        report = cross_validate(
            dataset,
            model_kind=model_kind,
            model_cfg=model_cfg,
            resample_kind=resample_kind,
            smote_params=smote_params,
            k=k,
            seed=seed,
        )
        out.append(AblationRow(flags=dict(flags), metrics=dict(report.aggregate)))
    return out


def write_ablation_csv(rows: list[AblationRow], path: str) -> None:
    """Flag columns then metric columns, mirroring the grid layout."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            list(GRID_COLUMNS) + ["Accuracy", "Precision", "Recall", "F1", "ROC_AUC"]
        )
        for row in rows:
            writer.writerow(
                ["*" if row.flags[c] else "" for c in GRID_COLUMNS]
                + [
                    repr(row.metrics[m])
                    for m in ("accuracy", "precision", "recall", "f1", "auc")
                ]
            )


def pearson_correlation_matrix(matrix: np.ndarray) -> np.ndarray:
    """Pearson r per column pair; constant columns correlate 0 off-diagonal."""
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise UsageError("correlation needs a matrix with at least 2 rows")
    centered = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(centered * centered, axis=0))
    constant = norms == 0.0
    if np.any(constant):
        warnings.warn(
            "constant feature columns produce zero correlations", stacklevel=2
        )
    safe = np.where(constant, 1.0, norms)
    R = (centered / safe).T @ (centered / safe)
    R[constant, :] = 0.0
    R[:, constant] = 0.0
    np.fill_diagonal(R, 1.0)
    np.clip(R, -1.0, 1.0, out=R)
    return R
