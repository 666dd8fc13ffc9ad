import numpy as np
import pytest

from lyricmeter.errors import FormatError, UsageError
from lyricmeter.evaluation import (
    GRID_COLUMNS,
    AblationRow,
    ConfusionMatrix,
    cross_validate,
    load_ablation_grid,
    pearson_correlation_matrix,
    prf_metrics,
    roc_auc,
    run_ablation,
    stratified_kfold,
    write_ablation_csv,
)
from lyricmeter.features import FeatureSpec, LabeledDataset
from lyricmeter.models import GbdtConfig, TreeConfig
from lyricmeter.resampling import SmoteParams


def concordance_auc(scores, labels):
    """Independent AUC oracle: pairwise concordance with ties at one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        total += np.sum(p > neg) + 0.5 * np.sum(p == neg)
    return total / (len(pos) * len(neg))


def make_dataset(rng, n=60, d=4, minority=0.3, gap=1.5):
    n_min = max(2, int(n * minority))
    X = rng.normal(size=(n, d))
    X[n_min:] += gap
    labels = ["3/4"] * n_min + ["4/4"] * (n - n_min)
    return LabeledDataset(
        X=X,
        labels=labels,
        ids=[f"s{i}" for i in range(n)],
        feature_names=[f"f{j}" for j in range(d)],
    )


class TestConfusionMatrix:
    def test_from_predictions(self):
        cm = ConfusionMatrix.from_predictions(
            np.array([1, 1, 0, 0, 1]), np.array([1, 0, 0, 1, 1])
        )
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (2, 1, 1, 1)
        assert cm.total == 5

    def test_metrics(self):
        cm = ConfusionMatrix(tp=2, fp=1, fn=1, tn=1)
        accuracy, precision, recall, f1 = prf_metrics(cm)
        assert accuracy == pytest.approx(0.6)
        assert precision == pytest.approx(2 / 3)
        assert recall == pytest.approx(2 / 3)
        assert f1 == pytest.approx(2 / 3)

    def test_zero_denominator_conventions(self):
        cm = ConfusionMatrix(tp=0, fp=0, fn=2, tn=3)
        accuracy, precision, recall, f1 = prf_metrics(cm)
        assert (precision, recall, f1) == (0.0, 0.0, 0.0)

    def test_empty_rejected(self):
        with pytest.raises(UsageError):
            prf_metrics(ConfusionMatrix())


class TestRocAuc:
    def test_perfect_ranking(self):
        roc = roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        assert roc.auc == 1.0
        assert roc.points[0] == (0.0, 0.0)
        assert roc.points[-1] == (1.0, 1.0)

    def test_inverted_ranking(self):
        assert roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]).auc == 0.0

    def test_all_tied_scores(self):
        assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]).auc == pytest.approx(0.5)

    def test_matches_concordance_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(4, 60))
            scores = rng.choice([0.1, 0.3, 0.5, 0.7, 0.9], size=n)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            got = roc_auc(scores, labels).auc
            assert got == pytest.approx(concordance_auc(scores, labels), abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(UsageError):
            roc_auc([0.1, 0.9], [1, 1])


class TestStratifiedKfold:
    def test_partition_properties(self):
        labels = ["3/4"] * 10 + ["4/4"] * 30
        folds = stratified_kfold(labels, k=5, seed=0)
        assert len(folds) == 5
        all_test = np.concatenate([test for _, test in folds])
        assert sorted(all_test.tolist()) == list(range(40))
        for train, test in folds:
            assert len(np.intersect1d(train, test)) == 0
            n_min = sum(1 for i in test if labels[i] == "3/4")
            assert n_min == 2  # 10 minority / 5 folds exactly

    def test_seed_changes_assignment(self):
        labels = ["3/4"] * 10 + ["4/4"] * 10
        a = stratified_kfold(labels, k=2, seed=0)
        b = stratified_kfold(labels, k=2, seed=1)
        assert any(
            not np.array_equal(ta[1], tb[1]) for ta, tb in zip(a, b)
        )

    def test_deterministic(self):
        labels = ["3/4"] * 8 + ["4/4"] * 12
        a = stratified_kfold(labels, k=4, seed=7)
        b = stratified_kfold(labels, k=4, seed=7)
        for (tr_a, te_a), (tr_b, te_b) in zip(a, b):
            assert np.array_equal(te_a, te_b)

    def test_small_class_rejected(self):
        with pytest.raises(UsageError):
            stratified_kfold(["3/4"] * 2 + ["4/4"] * 10, k=5)

    def test_bad_k(self):
        with pytest.raises(UsageError):
            stratified_kfold(["3/4"] * 5 + ["4/4"] * 5, k=1)


class TestCrossValidate:
    def test_report_structure(self):
        rng = np.random.default_rng(1)
        ds = make_dataset(rng)
        report = cross_validate(
            ds, model_kind="tree", model_cfg=TreeConfig(max_depth=3), k=3
        )
        assert len(report.folds) == 3
        assert set(report.aggregate) == {"accuracy", "precision", "recall", "f1", "auc"}
        assert report.pooled_confusion.total == len(ds)
        doc = report.to_dict()
        assert doc["config"]["positive_class"] == "4/4"
        assert len(doc["folds"]) == 3

    def test_fold_resampling_recorded(self):
        rng = np.random.default_rng(2)
        ds = make_dataset(rng)
        report = cross_validate(
            ds,
            model_kind="tree",
            model_cfg=TreeConfig(max_depth=3),
            resample_kind="smotetomek",
            smote_params=SmoteParams(seed=0),
            k=3,
        )
        for fold in report.folds:
            assert fold.resampling is not None
            assert fold.resampling.synthetic_count > 0
        assert report.whole_resampling is None

    def test_whole_scope_resamples_upfront(self):
        rng = np.random.default_rng(3)
        ds = make_dataset(rng)
        report = cross_validate(
            ds,
            model_kind="tree",
            model_cfg=TreeConfig(max_depth=3),
            resample_kind="smote",
            smote_params=SmoteParams(seed=0),
            k=3,
            resample_scope="whole",
        )
        assert report.whole_resampling is not None
        assert all(f.resampling is None for f in report.folds)
        assert report.pooled_confusion.total > len(ds)

    def test_separable_data_scores_high(self):
        rng = np.random.default_rng(4)
        ds = make_dataset(rng, gap=6.0)
        report = cross_validate(
            ds, model_kind="gbdt", model_cfg=GbdtConfig(rounds=20), k=3
        )
        assert report.aggregate["auc"] > 0.95

    def test_chance_level_predictor(self):
        rng = np.random.default_rng(5)
        ds = make_dataset(rng, gap=0.0)
        # a depth-0 tree is a constant scorer: pooled AUC must be exactly 0.5
        report = cross_validate(
            ds, model_kind="tree", model_cfg=TreeConfig(max_depth=0), k=3
        )
        for fold in report.folds:
            assert fold.metrics["auc"] == pytest.approx(0.5)

    def test_bad_scope_rejected(self):
        rng = np.random.default_rng(6)
        ds = make_dataset(rng)
        with pytest.raises(UsageError):
            cross_validate(ds, resample_scope="fold")


class TestAblationGrid:
    def test_bundled_grid_has_24_rows(self):
        grid = load_ablation_grid()
        assert len(grid) == 24
        for row in grid:
            assert set(row) == set(GRID_COLUMNS)

    def test_every_row_yields_valid_spec(self):
        for flags in load_ablation_grid():
            spec = AblationRow(flags=flags, metrics={}).spec()
            assert spec.dimensionality >= 1

    def test_spec_respects_flags(self):
        flags = dict.fromkeys(GRID_COLUMNS, False)
        flags.update({"Overall": True, "Count": True, "Mean": True, "100": True})
        spec = AblationRow(flags=flags, metrics={}).spec()
        assert spec.structural_types == ("overall",)
        assert spec.patterns == ("100",)
        assert spec.statistics == ("count", "mean")

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text("A,B\n*,\n")
        with pytest.raises(FormatError):
            load_ablation_grid(str(path))

    def test_empty_grid_rejected(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text(",".join(GRID_COLUMNS) + "\n")
        with pytest.raises(FormatError):
            load_ablation_grid(str(path))

    def test_write_csv_layout(self, tmp_path):
        flags = dict.fromkeys(GRID_COLUMNS, True)
        row = AblationRow(
            flags=flags,
            metrics={"accuracy": 0.9, "precision": 0.8, "recall": 0.7, "f1": 0.75, "auc": 0.85},
        )
        path = str(tmp_path / "ablation.csv")
        write_ablation_csv([row], path)
        lines = open(path).read().splitlines()
        assert lines[0].endswith("Accuracy,Precision,Recall,F1,ROC_AUC")
        assert lines[1].startswith("*,*,*,*,*,*,*,*")


class TestRunAblation:
    def test_rows_match_grid_order(self):
        from lyricmeter.patterning import PhraseVector, SongPatternSet, find_repetitive_vectors

        rng = np.random.default_rng(9)

        def song(kind):
            if kind == "3/4":
                base = [(1, 0, 0)] * int(rng.integers(4, 8)) + [(1, 0)]
            else:
                base = [(1, 0)] * int(rng.integers(4, 8)) + [(1, 0, 0)]
            base = base + [base[0]]  # guarantee one duplicate group
            vectors = tuple(PhraseVector(marks=m) for m in base)
            return SongPatternSet(
                vectors=vectors,
                duplicate_groups=find_repetitive_vectors(list(vectors)),
            )

        pattern_sets = [(f"a{i}", song("3/4"), "3/4") for i in range(6)] + [
            (f"b{i}", song("4/4"), "4/4") for i in range(6)
        ]
        grid = [
            dict.fromkeys(GRID_COLUMNS, True),
            {**dict.fromkeys(GRID_COLUMNS, False), "Overall": True, "Count": True, "10": True},
        ]
        rows = run_ablation(
            pattern_sets,
            grid,
            model_kind="tree",
            model_cfg=TreeConfig(max_depth=3, min_leaf=1),
            resample_kind="none",
            k=2,
        )
        assert len(rows) == 2
        assert rows[0].flags == grid[0]
        assert rows[1].flags == grid[1]
        for row in rows:
            assert set(row.metrics) == {"accuracy", "precision", "recall", "f1", "auc"}

    def test_empty_grid_rejected(self):
        with pytest.raises(UsageError):
            run_ablation([], [])


class TestPearsonCorrelation:
    def test_matches_numpy(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(50, 5))
        R = pearson_correlation_matrix(X)
        assert np.allclose(R, np.corrcoef(X, rowvar=False), atol=1e-12)

    def test_constant_column_warns_and_zeroes(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(20, 3))
        X[:, 1] = 4.0
        with pytest.warns(UserWarning):
            R = pearson_correlation_matrix(X)
        assert R[1, 1] == 1.0
        assert np.all(R[1, [0, 2]] == 0.0)
        assert np.all(R[[0, 2], 1] == 0.0)

    def test_too_few_rows(self):
        with pytest.raises(UsageError):
            pearson_correlation_matrix(np.zeros((1, 3)))
