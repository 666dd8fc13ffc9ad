"""Numeric song features over the structural x pattern x statistic grid.

Each feature is one cell of the grid ``structural type`` ({overall, repeat})
x ``stress beat pattern`` ({"10", "100", "1000"}) x ``statistic`` ({count,
mean, mode}), computed from the per-phrase occurrence counts of the pattern.
The "repeat" structural type restricts to phrases whose vector duplicates
another phrase's vector in the same song.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, FormatError, UsageError
from .patterning import (
    PhraseVector,
    SongPatternSet,
    StressBeatPattern,
    count_pattern,
    find_repetitive_vectors,
)

STRUCTURAL_TYPES = ("overall", "repeat")
PATTERN_NAMES = ("10", "100", "1000")
STATISTICS = ("count", "mean", "mode")

LABELS = ("3/4", "4/4")
THREE_FOUR, FOUR_FOUR = LABELS


@dataclass(frozen=True)
class FeatureSpec:
    """Which grid cells to realize; dimensionality is the product of sizes."""

    structural_types: tuple[str, ...] = STRUCTURAL_TYPES
    patterns: tuple[str, ...] = PATTERN_NAMES
    statistics: tuple[str, ...] = STATISTICS
    # count pattern occurrences in repeat phrases, or count the phrases that
    # contain the pattern at least once
    repeat_counting: str = "occurrences"

    def __post_init__(self):
        for got, allowed, label in (
            (self.structural_types, STRUCTURAL_TYPES, "structural type"),
            (self.patterns, PATTERN_NAMES, "pattern"),
            (self.statistics, STATISTICS, "statistic"),
        ):
            if not got:
                raise UsageError(f"feature spec has no {label}s")
            for item in got:
                if item not in allowed:
                    raise UsageError(f"unknown {label}: {item!r}")
        if self.repeat_counting not in ("occurrences", "phrases"):
            raise UsageError(f"bad repeat_counting: {self.repeat_counting!r}")

    @property
    def dimensionality(self) -> int:
        return len(self.structural_types) * len(self.patterns) * len(self.statistics)

    @property
    def names(self) -> list[str]:
        return [
            f"{s}_{p}_{t}"
            for s in self.structural_types
            for p in self.patterns
            for t in self.statistics
        ]


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    names: tuple[str, ...]


@dataclass
class LabeledDataset:
    """Feature matrix with aligned labels and song ids."""

    X: np.ndarray
    labels: list[str]
    ids: list[str]
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise UsageError("feature matrix must be 2-D")
        if not (len(self.labels) == len(self.ids) == self.X.shape[0]):
            raise UsageError("rows, labels and ids must have equal length")
        for label in self.labels:
            if label not in LABELS:
                raise UsageError(f"unknown class label: {label!r}")

    def __len__(self) -> int:
        return self.X.shape[0]

    def class_counts(self) -> dict:
        counts = Counter(self.labels)
        return {label: counts.get(label, 0) for label in LABELS}

    def y(self, positive: str = FOUR_FOUR) -> np.ndarray:
        """0/1 label vector with ``positive`` mapped to 1."""
        return np.array([1 if lb == positive else 0 for lb in self.labels])


def remove_noisy_vectors(pattern_set: SongPatternSet) -> SongPatternSet:
    """Drop vectors that are too short (< 2 marks) or carry no stress."""
    keep = [
        (p, v, r)
        for p, v, r in zip(
            pattern_set.phrases or [None] * len(pattern_set.vectors),
            pattern_set.vectors,
            pattern_set.raw_vectors or [None] * len(pattern_set.vectors),
        )
        if len(v.marks) >= 2 and 1 in v.marks
    ]
    vectors = tuple(v for _, v, _ in keep)
    return SongPatternSet(
        vectors=vectors,
        duplicate_groups=find_repetitive_vectors(list(vectors)),
        raw_vectors=tuple(r for _, _, r in keep if r is not None),
        phrases=tuple(p for p, _, _ in keep if p is not None),
    )


def _selected_vectors(
    pattern_set: SongPatternSet, structural: str
) -> list[PhraseVector]:
    if structural == "overall":
        return list(pattern_set.vectors)
    if structural == "repeat":
        return [
            v for v in pattern_set.vectors if v.marks in pattern_set.duplicate_groups
        ]
    raise UsageError(f"unknown structural type: {structural!r}")


def phrase_statistics(
    pattern_set: SongPatternSet,
    structural: str,
    pattern: StressBeatPattern,
    repeat_counting: str = "occurrences",
) -> tuple[float, float, float]:
    """(count, mean, mode) of per-phrase pattern occurrences.

    Over the selected phrases, count is the total number of occurrences,
    mean the per-phrase average, mode the most frequent per-phrase count
    (smallest value on a tie).  An empty selection yields (0, 0, 0).
    """
    selected = _selected_vectors(pattern_set, structural)
    if not selected:
        return (0.0, 0.0, 0.0)
    per_phrase = [count_pattern(v, pattern) for v in selected]
    if structural == "repeat" and repeat_counting == "phrases":
        per_phrase = [1 if c > 0 else 0 for c in per_phrase]
    total = float(sum(per_phrase))
    mean = total / len(per_phrase)
    freq = Counter(per_phrase)
    best = max(freq.values())
    mode = float(min(c for c, n in freq.items() if n == best))
    return (total, mean, mode)


def generate_features(
    pattern_set: SongPatternSet, spec: FeatureSpec | None = None
) -> FeatureVector:
    """Realize the feature grid for one song (structural, pattern, statistic)."""
    spec = spec or FeatureSpec()
    if not pattern_set.vectors:
        raise DegenerateInputError("song has no phrase vectors")
    stat_index = {"count": 0, "mean": 1, "mode": 2}
    values = []
    for structural in spec.structural_types:
        for name in spec.patterns:
            stats = phrase_statistics(
                pattern_set,
                structural,
                StressBeatPattern.named(name),
                repeat_counting=spec.repeat_counting,
            )
            for stat in spec.statistics:
                values.append(stats[stat_index[stat]])
    return FeatureVector(values=tuple(values), names=tuple(spec.names))


def build_matrix(
    pattern_sets: list[tuple[str, SongPatternSet, str]],
    spec: FeatureSpec | None = None,
    noise_removal: bool = True,
) -> tuple[LabeledDataset, list[str]]:
    """Assemble (song_id, pattern_set, label) triples into a labeled matrix.

    Songs that end up with no usable phrase vectors are skipped; their ids are
    returned alongside the dataset.
    """
    if not pattern_sets:
        raise UsageError("empty corpus")
    spec = spec or FeatureSpec()
    rows, labels, ids, skipped = [], [], [], []
    for song_id, pattern_set, label in pattern_sets:
        if noise_removal:
            pattern_set = remove_noisy_vectors(pattern_set)
        try:
            fv = generate_features(pattern_set, spec)
        except DegenerateInputError:
            skipped.append(song_id)
            continue
        rows.append(fv.values)
        labels.append(label)
        ids.append(song_id)
    if not rows:
        raise DegenerateInputError("all songs were skipped as degenerate")
    X = np.array(rows, dtype=float)
    return LabeledDataset(X=X, labels=labels, ids=ids, feature_names=spec.names), skipped


def write_features_csv(dataset: LabeledDataset, path: str) -> None:
    """features.csv: feature columns, then trailing `label` and `id`."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_features(dataset, fh)


def features_csv_text(dataset: LabeledDataset) -> str:
    buf = io.StringIO()
    _write_features(dataset, buf)
    return buf.getvalue()


def _write_features(dataset: LabeledDataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(dataset.feature_names) + ["label", "id"])
    for row, label, song_id in zip(dataset.X, dataset.labels, dataset.ids):
        writer.writerow([repr(float(v)) for v in row] + [label, song_id])


def read_features_csv(path: str) -> LabeledDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("empty features file") from None
        if len(header) < 3 or header[-2:] != ["label", "id"]:
            raise FormatError("features header must end with label,id columns")
        names = header[:-2]
        rows, labels, ids = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise FormatError("wrong column count", line_number=lineno)
            try:
                rows.append([float(v) for v in row[:-2]])
            except ValueError:
                raise FormatError("non-numeric feature value", line_number=lineno)
            labels.append(row[-2])
            ids.append(row[-1])
    if not rows:
        raise FormatError("features file has no data rows")
    try:
        return LabeledDataset(
            X=np.array(rows), labels=labels, ids=ids, feature_names=names
        )
    except UsageError as exc:
        raise FormatError(str(exc)) from exc
