"""Class rebalancing: SMOTE oversampling, Tomek-link cleaning, and both.

SMOTE synthesizes minority samples on the segment between a minority point
and one of its k nearest minority neighbors: ``x_new = x_i + lam * (x_nn -
x_i)`` with ``lam`` uniform in [0, 1].  Tomek links are mutual-1-NN pairs of
opposite classes; cleaning removes the majority member of each link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, UsageError
from .features import LabeledDataset


@dataclass(frozen=True)
class SmoteParams:
    k: int = 5
    ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise UsageError("SMOTE k must be >= 1")
        if not (0.0 < self.ratio <= 1.0):
            raise UsageError("SMOTE ratio must be in (0, 1]")


@dataclass(frozen=True)
class SyntheticSample:
    values: np.ndarray
    parent: int
    neighbor: int
    lam: float


@dataclass(frozen=True)
class TomekLink:
    minority_index: int
    majority_index: int


@dataclass(frozen=True)
class ResamplingReport:
    pre_counts: dict
    post_counts: dict
    synthetic_count: int = 0
    tomek_removals: int = 0


def knn(
    rows: np.ndarray,
    query: int,
    k: int,
    candidates: np.ndarray | None = None,
) -> list[int]:
    """Indices of the k nearest rows to ``rows[query]`` by Euclidean distance.

    ``candidates`` optionally restricts the searched row indices.  The query
    row is excluded; ties break by ascending row index.
    """
    rows = np.asarray(rows, dtype=float)
    if candidates is None:
        candidates = np.arange(rows.shape[0])
    candidates = np.asarray(candidates)
    candidates = candidates[candidates != query]
    if k >= len(candidates) + 1:
        raise UsageError(f"k={k} must be smaller than the candidate count")
    dists = np.linalg.norm(rows[candidates] - rows[query], axis=1)
    order = np.lexsort((candidates, dists))
    return [int(candidates[i]) for i in order[:k]]


def _minority_majority(dataset: LabeledDataset) -> tuple[str, str]:
    counts = dataset.class_counts()
    present = [label for label, n in counts.items() if n > 0]
    if len(present) < 2:
        raise UsageError("resampling requires samples of both classes")
    minority = min(counts, key=lambda lb: (counts[lb], lb))
    majority = max(counts, key=lambda lb: (counts[lb], lb))
    return minority, majority


def smote(
    dataset: LabeledDataset, params: SmoteParams
) -> tuple[LabeledDataset, list[SyntheticSample]]:
    """Append synthetic minority rows until minority = ceil(ratio * majority).

    Parent points cycle through the minority rows in index order; the
    neighbor and interpolation scalar come from the seeded generator, so
    output is fully deterministic.  Original rows are never modified.
    """
    minority, majority = _minority_majority(dataset)
    counts = dataset.class_counts()
    n_min, n_maj = counts[minority], counts[majority]
    if n_min < 2:
        raise DegenerateInputError("SMOTE needs at least 2 minority samples")

    target = math.ceil(params.ratio * n_maj)
    n_new = max(target - n_min, 0)
    minority_idx = np.array(
        [i for i, lb in enumerate(dataset.labels) if lb == minority]
    )
    k = min(params.k, n_min - 1)
    neighbor_table = {
        int(i): knn(dataset.X, int(i), k, candidates=minority_idx)
        for i in minority_idx
    }

    rng = np.random.default_rng(params.seed)
    samples: list[SyntheticSample] = []
    new_rows = []
    for j in range(n_new):
        parent = int(minority_idx[j % len(minority_idx)])
        neighbor = neighbor_table[parent][int(rng.integers(k))]
        lam = float(rng.random())
        x_new = dataset.X[parent] + lam * (dataset.X[neighbor] - dataset.X[parent])
        new_rows.append(x_new)
        samples.append(
            SyntheticSample(values=x_new, parent=parent, neighbor=neighbor, lam=lam)
        )

    if not new_rows:
        return dataset, samples
    X = np.vstack([dataset.X, np.array(new_rows)])
    labels = dataset.labels + [minority] * n_new
    ids = dataset.ids + [f"synthetic_{i}" for i in range(n_new)]
    out = LabeledDataset(
        X=X, labels=labels, ids=ids, feature_names=dataset.feature_names
    )
    return out, samples


def _nearest_neighbor_indices(X: np.ndarray, chunk: int = 512) -> np.ndarray:
    """1-NN index for every row (ties by ascending index), chunked in memory."""
    n = X.shape[0]
    out = np.empty(n, dtype=int)
    sq = np.einsum("ij,ij->i", X, X)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = X[start:stop]
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * block @ X.T
        np.maximum(d2, 0.0, out=d2)
        rows = np.arange(start, stop)
        d2[rows - start, rows] = np.inf
        out[start:stop] = np.argmin(d2, axis=1)
    return out


def tomek_links(
    dataset: LabeledDataset,
) -> tuple[list[TomekLink], LabeledDataset]:
    """All mutual-1-NN opposite-class pairs; majority members removed."""
    minority, majority = _minority_majority(dataset)
    X = np.asarray(dataset.X, dtype=float)
    nn = _nearest_neighbor_indices(X)
    links: list[TomekLink] = []
    removed: set[int] = set()
    for i in range(len(dataset)):
        j = int(nn[i])
        if i < j and nn[j] == i and dataset.labels[i] != dataset.labels[j]:
            if dataset.labels[i] == minority:
                mn, mj = i, j
            else:
                mn, mj = j, i
            links.append(TomekLink(minority_index=mn, majority_index=mj))
            removed.add(mj)
    if not removed:
        return links, dataset
    keep = [i for i in range(len(dataset)) if i not in removed]
    cleaned = LabeledDataset(
        X=X[keep],
        labels=[dataset.labels[i] for i in keep],
        ids=[dataset.ids[i] for i in keep],
        feature_names=dataset.feature_names,
    )
    return links, cleaned


def smote_tomek(
    dataset: LabeledDataset, params: SmoteParams
) -> tuple[LabeledDataset, ResamplingReport]:
    """SMOTE to the target proportion, then Tomek-link cleaning."""
    pre = dataset.class_counts()
    oversampled, samples = smote(dataset, params)
    links, cleaned = tomek_links(oversampled)
    report = ResamplingReport(
        pre_counts=pre,
        post_counts=cleaned.class_counts(),
        synthetic_count=len(samples),
        tomek_removals=len(links),
    )
    return cleaned, report


def resample(
    dataset: LabeledDataset, kind: str, params: SmoteParams
) -> tuple[LabeledDataset, ResamplingReport]:
    """Dispatch on resampling kind: none | smote | tomek | smotetomek."""
    if kind == "none":
        counts = dataset.class_counts()
        return dataset, ResamplingReport(pre_counts=counts, post_counts=counts)
    if kind == "smote":
        out, samples = smote(dataset, params)
        return out, ResamplingReport(
            pre_counts=dataset.class_counts(),
            post_counts=out.class_counts(),
            synthetic_count=len(samples),
        )
    if kind == "tomek":
        links, cleaned = tomek_links(dataset)
        return cleaned, ResamplingReport(
            pre_counts=dataset.class_counts(),
            post_counts=cleaned.class_counts(),
            tomek_removals=len(links),
        )
    if kind == "smotetomek":
        return smote_tomek(dataset, params)
    raise UsageError(f"unknown resampling kind: {kind!r}")
