"""Acceptance gate: one test per shipping criterion.

Each test prints a single PASS line when its criterion holds at the stated
tolerance; a failing assertion marks the criterion failed.  The tests use
independent oracles (brute-force neighbor search, pairwise concordance,
exhaustive split enumeration, finite differences) rather than re-deriving
values from the implementation under test.
"""

import itertools
import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from lyricmeter import cli
from lyricmeter.corpus import write_corpus
from lyricmeter.errors import DegenerateInputError
from lyricmeter.evaluation import (
    GRID_COLUMNS,
    cross_validate,
    load_ablation_grid,
    roc_auc,
    run_ablation,
)
from lyricmeter.features import (
    PATTERN_NAMES,
    STATISTICS,
    STRUCTURAL_TYPES,
    FeatureSpec,
    LabeledDataset,
    build_matrix,
)
from lyricmeter.lexicon import default_remnants, default_stopword_policy, load_lexicon
from lyricmeter.models import (
    ForestConfig,
    GbdtConfig,
    best_gini_split,
    gbdt_gradients,
    gini,
    logistic_gradient,
    logistic_loss,
    sigmoid,
    train_forest,
    train_tree,
)
from lyricmeter.patterning import LyricsText, lyrics_patterning
from lyricmeter.resampling import SmoteParams, smote, smote_tomek, tomek_links
from lyricmeter.synthetic import generate_benchmark_corpus

from conftest import FIG2_LYRICS  # noqa: E402  (pytest puts tests/ on sys.path)


def report(name: str) -> None:
    print(f"\nacceptance {name}: PASS", flush=True)


def gaussian_dataset(rng, n_min, n_maj, d, gap=1.0):
    X = np.vstack(
        [rng.normal(size=(n_min, d)), rng.normal(size=(n_maj, d)) + gap]
    )
    labels = ["3/4"] * n_min + ["4/4"] * n_maj
    return LabeledDataset(
        X=X,
        labels=labels,
        ids=[f"s{i}" for i in range(n_min + n_maj)],
        feature_names=[f"f{j}" for j in range(d)],
    )


def test_01_reference_patterning():
    """Published per-phrase mark rows are reproduced exactly, in < 1 s."""
    lexicon = load_lexicon()
    policy = default_stopword_policy()
    remnants = default_remnants()
    start = time.perf_counter()
    result = lyrics_patterning(
        LyricsText(raw=FIG2_LYRICS, song_id="reference"), lexicon, policy, remnants
    )
    elapsed = time.perf_counter() - start
    golden = {
        1: (0, 1, 0, 0, 1, 0, 1, 0, 1),
        2: (0, 1, 1, 0, 0, 1),
        3: (0, 1, 0, 1, 0),
        4: (0, 1, 0, 1, 0),
        6: (0, 0, 1),
    }
    for idx, expected in golden.items():
        assert result.vectors[idx].marks == expected, f"phrase {idx + 1}"
    assert result.duplicate_groups == {(0, 1, 0, 1, 0): 2}
    assert elapsed < 1.0, f"patterning took {elapsed:.3f}s"
    report("01 reference_patterning")


def test_02_feature_grid_arithmetic():
    """Dimensionality is the product of group sizes; the 12-feature case holds."""
    rng = np.random.default_rng(0)
    for _ in range(50):
        structural = tuple(
            s for s in STRUCTURAL_TYPES if rng.random() < 0.5
        ) or ("overall",)
        patterns = tuple(p for p in PATTERN_NAMES if rng.random() < 0.5) or ("10",)
        statistics = tuple(t for t in STATISTICS if rng.random() < 0.5) or ("count",)
        spec = FeatureSpec(
            structural_types=structural, patterns=patterns, statistics=statistics
        )
        assert spec.dimensionality == len(structural) * len(patterns) * len(statistics)
        assert len(spec.names) == spec.dimensionality
        assert len(set(spec.names)) == spec.dimensionality
    twelve = FeatureSpec(patterns=("10", "100"))
    assert twelve.dimensionality == 12
    report("02 feature_grid_arithmetic")


def test_03_smote_geometry():
    """10 000 synthetic samples satisfy the interpolation identity, in < 5 s."""
    rng = np.random.default_rng(1)
    ds = gaussian_dataset(rng, n_min=500, n_maj=10500, d=6)
    start = time.perf_counter()
    out, samples = smote(ds, SmoteParams(seed=2))
    elapsed = time.perf_counter() - start
    assert len(samples) == 10000
    minority_idx = set(range(500))
    for s in samples:
        expected = ds.X[s.parent] + s.lam * (ds.X[s.neighbor] - ds.X[s.parent])
        assert np.max(np.abs(s.values - expected)) <= 1e-12
        assert 0.0 <= s.lam <= 1.0
        assert s.parent in minority_idx and s.neighbor in minority_idx
    counts = out.class_counts()
    assert counts["3/4"] == counts["4/4"]  # ratio 1.0 gives exact equality
    assert elapsed < 5.0, f"SMOTE took {elapsed:.3f}s"
    report("03 smote_geometry")


def test_04_tomek_oracle_equivalence():
    """Links equal the brute-force mutual-1-NN oracle on 200 random datasets."""
    rng = np.random.default_rng(3)
    for trial in range(200):
        n = int(rng.integers(6, 201))
        d = int(rng.integers(2, 9))
        n_min = max(2, int(n * float(rng.uniform(0.15, 0.45))))
        ds = gaussian_dataset(rng, n_min, n - n_min, d, gap=float(rng.uniform(0, 2)))

        X = ds.X
        d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2)
        np.fill_diagonal(d2, np.inf)
        nn = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties
        expected = {
            (min(i, int(nn[i])), max(i, int(nn[i])))
            for i in range(n)
            if nn[int(nn[i])] == i and ds.labels[i] != ds.labels[int(nn[i])]
        }

        links, cleaned = tomek_links(ds)
        got = {
            (min(l.minority_index, l.majority_index),
             max(l.minority_index, l.majority_index))
            for l in links
        }
        assert got == expected, f"trial {trial}"
        removed = {l.majority_index for l in links}
        assert len(cleaned) == n - len(removed)
    report("04 tomek_oracle_equivalence")


def test_05_resampling_balance_at_scale():
    """179/4249 Gaussian classes end within 0.5% of balance, in < 30 s."""
    rng = np.random.default_rng(4)
    ds = gaussian_dataset(rng, n_min=179, n_maj=4249, d=8, gap=1.5)
    start = time.perf_counter()
    cleaned, rep = smote_tomek(ds, SmoteParams(seed=5))
    elapsed = time.perf_counter() - start
    counts = cleaned.class_counts()
    diff = abs(counts["3/4"] - counts["4/4"])
    assert diff <= 0.005 * len(cleaned), f"counts {counts}"
    assert rep.synthetic_count == 4249 - 179
    assert elapsed < 30.0, f"smote_tomek took {elapsed:.3f}s"
    report("05 resampling_balance_at_scale")


def test_06_auc_dual_computation():
    """Trapezoidal AUC equals concordance AUC within 1e-9 on 500 sets."""
    rng = np.random.default_rng(6)
    for trial in range(500):
        n = int(rng.integers(4, 80))
        if trial % 2 == 0:
            scores = rng.choice(np.round(np.linspace(0, 1, 5), 2), size=n)
        else:
            scores = rng.random(size=n)
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        pos = scores[labels == 1]
        neg = scores[labels == 0]
        concordance = (
            sum(float(np.sum(p > neg) + 0.5 * np.sum(p == neg)) for p in pos)
            / (len(pos) * len(neg))
        )
        trapezoid = roc_auc(scores, labels).auc
        assert abs(trapezoid - concordance) <= 1e-9, f"trial {trial}"
    report("06 auc_dual_computation")


def test_07_gradient_checks():
    """Analytic gradients match central finite differences at 100 points."""
    rng = np.random.default_rng(7)
    eps = 1e-6
    for _ in range(100):
        n, d = int(rng.integers(5, 30)), int(rng.integers(1, 6))
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 2, size=n).astype(float)
        w = rng.normal(size=d)
        b = float(rng.normal())
        l2 = float(rng.uniform(0, 0.1))
        grad_w, grad_b = logistic_gradient(w, b, X, y, l2)
        num_w = np.empty(d)
        for j in range(d):
            wp, wm = w.copy(), w.copy()
            wp[j] += eps
            wm[j] -= eps
            num_w[j] = (
                logistic_loss(wp, b, X, y, l2) - logistic_loss(wm, b, X, y, l2)
            ) / (2 * eps)
        num_b = (
            logistic_loss(w, b + eps, X, y, l2) - logistic_loss(w, b - eps, X, y, l2)
        ) / (2 * eps)
        assert np.allclose(grad_w, num_w, rtol=1e-5, atol=1e-8)
        assert abs(grad_b - num_b) <= 1e-5 * max(1.0, abs(num_b))

    # boosting gradients/hessians, per sample: h is the derivative of g
    for _ in range(100):
        raw = float(np.random.default_rng(int(rng.integers(1 << 30))).normal() * 3)
        y1 = float(rng.integers(0, 2))
        loss = lambda r: float(np.logaddexp(0.0, r) - y1 * r)
        g_of = lambda r: float(sigmoid(np.array([r]))[0] - y1)
        g, h = gbdt_gradients(sigmoid(np.array([raw])), np.array([y1]))
        num_g = (loss(raw + eps) - loss(raw - eps)) / (2 * eps)
        num_h = (g_of(raw + eps) - g_of(raw - eps)) / (2 * eps)
        assert abs(float(g[0]) - num_g) <= 1e-5 * max(1.0, abs(num_g))
        assert abs(float(h[0]) - num_h) <= 1e-5 * max(1.0, abs(num_h))
    report("07 gradient_checks")


def test_08_small_instance_model_oracles():
    """Split search equals exhaustive enumeration; a 1-tree forest is a tree."""
    rng = np.random.default_rng(8)
    for trial in range(100):
        n = int(rng.integers(6, 51))
        X = rng.normal(size=(n, 4)).round(1)
        y = rng.integers(0, 2, size=n)
        min_leaf = int(rng.integers(1, 5))

        parent = gini(y)
        best = None
        for f in range(4):
            for a, b in itertools.pairwise(np.unique(X[:, f])):
                thr = (a + b) / 2.0
                mask = X[:, f] <= thr
                nl, nr = int(mask.sum()), int((~mask).sum())
                if nl < min_leaf or nr < min_leaf:
                    continue
                gain = parent - (nl / n) * gini(y[mask]) - (nr / n) * gini(y[~mask])
                cand = (gain, f, thr)
                if best is None or cand[0] > best[0] or (
                    cand[0] == best[0] and (cand[1], cand[2]) < (best[1], best[2])
                ):
                    best = cand
        if best is not None and best[0] <= 0.0:
            best = None

        got = best_gini_split(X, y, min_leaf)
        if best is None:
            assert got is None, f"trial {trial}"
        else:
            assert got is not None, f"trial {trial}"
            assert abs(got[2] - best[0]) <= 1e-9, f"trial {trial}"

    X = np.random.default_rng(9).normal(size=(60, 4))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    forest = train_forest(
        X, y, ForestConfig(n_trees=1, bootstrap=False, features_per_split=4)
    )
    tree = train_tree(X, y)
    assert np.array_equal(forest.predict_proba(X), tree.predict_proba(X))
    report("08 small_instance_model_oracles")


def _benchmark_pattern_sets(n_songs, minority_fraction, seed):
    lexicon = load_lexicon()
    policy = default_stopword_policy()
    remnants = default_remnants()
    records = generate_benchmark_corpus(
        n_songs=n_songs, minority_fraction=minority_fraction, seed=seed
    )
    return [
        (
            r.id,
            lyrics_patterning(
                LyricsText(raw=r.lyrics, song_id=r.id), lexicon, policy, remnants
            ),
            r.time_signature,
        )
        for r in records
    ]


def test_09_synthetic_end_to_end_benchmark():
    """Tree ensembles beat logistic regression on the 1000-song benchmark."""
    start = time.perf_counter()
    pattern_sets = _benchmark_pattern_sets(1000, 0.10, seed=42)
    dataset, skipped = build_matrix(pattern_sets, FeatureSpec(), noise_removal=True)
    assert skipped == []

    results = {}
    for kind in ("logistic", "forest", "gbdt"):
        rep = cross_validate(
            dataset,
            model_kind=kind,
            resample_kind="smotetomek",
            smote_params=SmoteParams(seed=7),
            k=5,
            seed=7,
        )
        results[kind] = rep.aggregate
    elapsed = time.perf_counter() - start

    for kind in ("forest", "gbdt"):
        assert results[kind]["f1"] >= 0.95, f"{kind} f1 {results[kind]['f1']:.4f}"
        assert results[kind]["auc"] >= 0.97, f"{kind} auc {results[kind]['auc']:.4f}"
        assert results[kind]["f1"] > results["logistic"]["f1"], (
            f"{kind} {results[kind]['f1']:.4f} vs "
            f"logistic {results['logistic']['f1']:.4f}"
        )
    assert elapsed < 120.0, f"benchmark took {elapsed:.1f}s"
    report(
        "09 synthetic_end_to_end_benchmark "
        + " ".join(f"{k}_f1={v['f1']:.4f}" for k, v in results.items())
    )


def test_10_ablation_shape():
    """24-row default grid; the all-subcategory row tops single-pattern rows."""
    grid = load_ablation_grid()
    assert len(grid) == 24
    for row in grid:
        assert tuple(row) == GRID_COLUMNS

    pattern_sets = _benchmark_pattern_sets(240, 0.30, seed=11)
    rows = run_ablation(
        pattern_sets,
        grid,
        model_kind="forest",
        model_cfg=ForestConfig(n_trees=30, seed=11),
        resample_kind="none",
        k=5,
        seed=11,
        noise_removal=False,
    )
    assert len(rows) == 24

    full_rows = [r for r in rows if all(r.flags.values())]
    assert len(full_rows) == 1
    full_auc = full_rows[0].metrics["auc"]

    def is_single_pattern(r):
        pattern_flags = [r.flags[p] for p in ("10", "100", "1000")]
        stat_flags = [r.flags[s] for s in ("Count", "Mean", "Mode")]
        return sum(pattern_flags) == 1 and all(stat_flags)

    single_rows = [r for r in rows if is_single_pattern(r)]
    assert len(single_rows) == 9
    violations = sum(1 for r in single_rows if r.metrics["auc"] > full_auc)
    assert violations <= 1, (
        f"full-grid auc {full_auc:.4f} beaten by {violations} single-pattern rows"
    )
    report(f"10 ablation_shape full_auc={full_auc:.4f} violations={violations}")


def test_11_determinism(tmp_path):
    """Seeded commands produce byte-identical outputs across runs and threads."""
    records = generate_benchmark_corpus(n_songs=40, minority_fraction=0.3, seed=13)
    corpus = str(tmp_path / "corpus.jsonl")
    write_corpus(records, corpus)

    def run_all(workdir):
        os.makedirs(workdir, exist_ok=True)
        paths = {
            "synth": os.path.join(workdir, "bench.jsonl"),
            "features": os.path.join(workdir, "features.csv"),
            "model": os.path.join(workdir, "model.json"),
            "report": os.path.join(workdir, "report.json"),
            "roc": os.path.join(workdir, "roc.csv"),
            "roc_png": os.path.join(workdir, "report_roc.png"),
            "confusion_png": os.path.join(workdir, "report_confusion.png"),
            "stats": os.path.join(workdir, "stats.csv"),
            "corr": os.path.join(workdir, "stats_correlation.csv"),
        }
        assert cli.main(["synth", "-o", paths["synth"], "--songs", "25", "--seed", "3"]) == 0
        assert cli.main(["featurize", corpus, "-o", paths["features"], "--seed", "3"]) == 0
        assert cli.main(
            [
                "train", paths["features"], "-o", paths["model"],
                "--model", "forest", "--model-param", "n_trees=10",
                "--resample", "smotetomek", "--seed", "3",
            ]
        ) == 0
        assert cli.main(
            [
                "evaluate", paths["features"], "-o", paths["report"],
                "--roc", paths["roc"], "--model", "tree",
                "--resample", "smote", "--folds", "3", "--seed", "3",
            ]
        ) == 0
        assert cli.main(["stats", corpus, "-o", paths["stats"], "--no-plots"]) == 0
        return paths

    first = run_all(str(tmp_path / "run1"))
    second = run_all(str(tmp_path / "run2"))
    for name in first:
        a = open(first[name], "rb").read()
        b = open(second[name], "rb").read()
        assert a == b, f"{name} differs between identical runs"
        assert len(a) > 0

    # thread-count independence: rerun one command under different BLAS/OpenMP
    # thread limits in subprocesses and compare bytes
    outputs = []
    for threads, sub in (("1", "t1"), ("4", "t4")):
        workdir = tmp_path / sub
        workdir.mkdir()
        env = dict(os.environ)
        env.update(
            OMP_NUM_THREADS=threads,
            OPENBLAS_NUM_THREADS=threads,
            MKL_NUM_THREADS=threads,
        )
        out = str(workdir / "features.csv")
        subprocess.run(
            [sys.executable, "-m", "lyricmeter.cli", "featurize", corpus,
             "-o", out, "--seed", "3"],
            check=True,
            env=env,
            capture_output=True,
        )
        outputs.append(open(out, "rb").read())
    assert outputs[0] == outputs[1], "output depends on thread count"
    report("11 determinism")
