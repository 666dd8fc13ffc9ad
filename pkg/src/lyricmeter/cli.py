"""Command-line surface: ingest | featurize | train | evaluate | ablate |
predict | stats (plus synth, which writes a synthetic benchmark corpus)."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter

import numpy as np

from . import config as cfgmod
from . import corpus as corpusmod
from . import evaluation, models, synthetic
from .errors import (
    DegenerateInputError,
    FormatError,
    InputOutputError,
    LyricmeterError,
    UsageError,
)
from .features import (
    FeatureSpec,
    LabeledDataset,
    build_matrix,
    read_features_csv,
    remove_noisy_vectors,
    write_features_csv,
)
from .lexicon import (
    RemnantList,
    StopwordPolicy,
    default_remnants,
    default_stopword_policy,
    load_lexicon,
    load_wordlist,
)
from .patterning import (
    LyricsText,
    PatterningConfig,
    StressBeatPattern,
    count_pattern,
    lyrics_patterning,
)
from .resampling import SmoteParams, resample

IMBALANCE_WARNING_SHARE = 0.25


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--lexicon", help="CMU-format dictionary file (default: bundled)")
    parser.add_argument("--stopwords", help="stopword override file, one word per line")
    parser.add_argument("--remnants", help="contraction remnant override file")
    parser.add_argument("--seed", type=int, help="seed for all stochastic stages")
    parser.add_argument(
        "--features",
        help='feature spec "<structural>:<patterns>:<stats>", e.g. '
        "overall,repeat:10,100:count,mean,mode",
    )
    parser.add_argument("--model", choices=models.MODEL_KINDS)
    parser.add_argument(
        "--model-param",
        action="append",
        default=None,
        metavar="NAME=VALUE",
        help="model hyperparameter override (repeatable)",
    )
    parser.add_argument(
        "--resample", choices=("none", "smote", "tomek", "smotetomek")
    )
    parser.add_argument("--resample-scope", choices=("folds", "whole"))
    parser.add_argument("--smote-k", type=int)
    parser.add_argument("--smote-ratio", type=float)
    parser.add_argument("--folds", type=int)
    parser.add_argument("--noise-removal", choices=("on", "off"))
    parser.add_argument(
        "--no-plots", action="store_true", help="skip PNG figure rendering"
    )


def _config_from_args(args) -> cfgmod.PipelineConfig:
    file_values = cfgmod.load_config_file(args.config) if args.config else {}
    cli_values = {
        "lexicon": args.lexicon,
        "stopwords": args.stopwords,
        "remnants": args.remnants,
        "seed": args.seed,
        "features": args.features,
        "model": args.model,
        "resample": args.resample,
        "resample_scope": args.resample_scope,
        "smote_k": args.smote_k,
        "smote_ratio": args.smote_ratio,
        "folds": args.folds,
    }
    if args.noise_removal is not None:
        cli_values["noise_removal"] = args.noise_removal == "on"
    if args.model_param:
        params = {}
        for item in args.model_param:
            if "=" not in item:
                raise UsageError(f"--model-param expects NAME=VALUE, got {item!r}")
            name, value = item.split("=", 1)
            params[name.strip().replace("-", "_")] = cfgmod._parse_param_value(value)
        cli_values["model_params"] = params
    return cfgmod.build_config(file_values, cli_values)


def _language_resources(cfg: cfgmod.PipelineConfig):
    lexicon = load_lexicon(cfg.lexicon)
    if cfg.stopwords:
        policy = StopwordPolicy(base_list=load_wordlist(cfg.stopwords))
    else:
        policy = default_stopword_policy()
    if cfg.remnants:
        remnants = RemnantList(remnants=load_wordlist(cfg.remnants))
    else:
        remnants = default_remnants()
    return lexicon, policy, remnants


def _pattern_sets(records, cfg: cfgmod.PipelineConfig):
    lexicon, policy, remnants = _language_resources(cfg)
    pat_cfg = PatterningConfig()
    out = []
    for record in records:
        pattern_set = lyrics_patterning(
            LyricsText(raw=record.lyrics, song_id=record.id),
            lexicon,
            policy,
            remnants,
            pat_cfg,
        )
        out.append((record.id, pattern_set, record.time_signature))
    return out


def _smote_params(cfg: cfgmod.PipelineConfig) -> SmoteParams:
    return SmoteParams(k=cfg.smote_k, ratio=cfg.smote_ratio, seed=cfg.seed)


def _model_cfg(cfg: cfgmod.PipelineConfig):
    return models.model_config(cfg.model, seed=cfg.seed, **cfg.model_params)


def _spec_doc(spec: FeatureSpec, cfg: cfgmod.PipelineConfig) -> dict:
    return {
        "structural_types": list(spec.structural_types),
        "patterns": list(spec.patterns),
        "statistics": list(spec.statistics),
        "repeat_counting": spec.repeat_counting,
        "noise_removal": cfg.noise_removal,
    }


# --- subcommands ------------------------------------------------------------


def cmd_ingest(args) -> int:
    try:
        with open(args.corpus, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read corpus: {exc}") from exc
    records, problems = corpusmod.parse_corpus_lines(lines)
    for lineno, reason in problems:
        print(f"line {lineno}: {reason}", file=sys.stderr)
    counts = corpusmod.class_counts(records)
    total = sum(counts.values())
    parts = ", ".join(f"{label}: {n}" for label, n in counts.items())
    print(f"{total} records ({parts})")
    if total:
        minority_share = min(counts.values()) / total
        print(f"minority class share: {minority_share:.2%}")
        if minority_share < IMBALANCE_WARNING_SHARE:
            print(
                "warning: classes are imbalanced; consider --resample smotetomek"
            )
    if problems:
        raise FormatError(f"{len(problems)} malformed corpus line(s)")
    return 0


def cmd_featurize(args) -> int:
    cfg = _config_from_args(args)
    records = corpusmod.read_corpus(args.corpus)
    spec = cfg.feature_spec()
    pattern_sets = _pattern_sets(records, cfg)
    dataset, skipped = build_matrix(
        pattern_sets, spec, noise_removal=cfg.noise_removal
    )
    write_features_csv(dataset, args.out)
    print(
        f"wrote {args.out}: {len(dataset)} songs x {spec.dimensionality} features "
        f"(seed {cfg.seed}, {len(skipped)} skipped)"
    )
    for song_id in skipped:
        print(f"skipped degenerate song: {song_id}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    dataset = read_features_csv(args.features_csv)
    spec = cfg.feature_spec()
    if dataset.feature_names != spec.names:
        raise FormatError(
            "feature columns do not match the configured feature spec; "
            "pass the --features used at featurize time"
        )
    if len(set(dataset.labels)) < 2:
        raise DegenerateInputError("training needs both classes present")
    pre_counts = dataset.class_counts()
    resampled, report = resample(dataset, cfg.resample, _smote_params(cfg))
    model = models.train(cfg.model, resampled.X, resampled.y(), _model_cfg(cfg))
    train_acc = float(
        np.mean(models.predict(model, resampled.X) == resampled.y())
    )
    models.save_model(
        model,
        args.out,
        feature_spec=_spec_doc(spec, cfg),
        extra={"seed": cfg.seed, "resample": cfg.resample},
    )
    print(f"wrote {args.out} (model {cfg.model}, seed {cfg.seed})")
    print(f"class counts pre-resampling: {pre_counts}")
    print(f"class counts post-resampling: {report.post_counts}")
    print(f"training accuracy: {train_acc:.4f}")
    history = getattr(model, "loss_history", None) or getattr(
        model, "objective_history", None
    )
    if history:
        print(f"final training loss: {history[-1]:.6f}")
    return 0


def _evaluation_dataset(path: str, cfg: cfgmod.PipelineConfig) -> LabeledDataset:
    if path.endswith(".csv"):
        return read_features_csv(path)
    records = corpusmod.read_corpus(path)
    pattern_sets = _pattern_sets(records, cfg)
    dataset, skipped = build_matrix(
        pattern_sets, cfg.feature_spec(), noise_removal=cfg.noise_removal
    )
    for song_id in skipped:
        print(f"skipped degenerate song: {song_id}", file=sys.stderr)
    return dataset


def cmd_evaluate(args) -> int:
    cfg = _config_from_args(args)
    dataset = _evaluation_dataset(args.input, cfg)
    report = evaluation.cross_validate(
        dataset,
        model_kind=cfg.model,
        model_cfg=_model_cfg(cfg),
        resample_kind=cfg.resample,
        smote_params=_smote_params(cfg),
        k=cfg.folds,
        seed=cfg.seed,
        resample_scope=cfg.resample_scope,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(args.roc, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in report.roc.points:
            writer.writerow([repr(fpr), repr(tpr)])
    if not args.no_plots:
        from . import plotting

        base = args.out.rsplit(".", 1)[0]
        plotting.save_roc_figure(report.roc, base + "_roc.png", label=cfg.model)
        plotting.save_confusion_figure(
            report.pooled_confusion, base + "_confusion.png"
        )
    agg = report.aggregate
    print(
        f"model={cfg.model} accuracy={agg['accuracy']:.4f} "
        f"precision={agg['precision']:.4f} recall={agg['recall']:.4f} "
        f"f1={agg['f1']:.4f} auc={agg['auc']:.4f}"
    )
    return 0


def cmd_ablate(args) -> int:
    cfg = _config_from_args(args)
    records = corpusmod.read_corpus(args.corpus)
    pattern_sets = _pattern_sets(records, cfg)
    grid = evaluation.load_ablation_grid(args.grid)
    # the reference ablation protocol keeps noisy vectors unless asked not to
    noise = args.noise_removal == "on"
    rows = evaluation.run_ablation(
        pattern_sets,
        grid,
        model_kind=cfg.model,
        model_cfg=_model_cfg(cfg),
        resample_kind=cfg.resample,
        smote_params=_smote_params(cfg),
        k=cfg.folds,
        seed=cfg.seed,
        noise_removal=noise,
    )
    evaluation.write_ablation_csv(rows, args.out)
    if not args.no_plots:
        from . import plotting

        plotting.save_ablation_figure(rows, args.out.rsplit(".", 1)[0] + ".png")
    print(f"wrote {args.out}: {len(rows)} rows (seed {cfg.seed})")
    return 0


def cmd_predict(args) -> int:
    cfg = _config_from_args(args)
    model, doc = models.load_model(args.model_file)
    stored = doc.get("feature_spec")
    if stored is None:
        raise FormatError("model file does not embed a feature spec")
    spec = FeatureSpec(
        structural_types=tuple(stored["structural_types"]),
        patterns=tuple(stored["patterns"]),
        statistics=tuple(stored["statistics"]),
        repeat_counting=stored.get("repeat_counting", "occurrences"),
    )
    if args.features is not None and cfg.feature_spec() != spec:
        raise FormatError(
            "requested --features disagree with the spec stored in the model file"
        )
    try:
        with open(args.lyrics_file, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read lyrics file: {exc}") from exc
    if not raw.strip():
        raise DegenerateInputError("lyrics file is empty")
    lexicon, policy, remnants = _language_resources(cfg)
    pattern_set = lyrics_patterning(
        LyricsText(raw=raw, song_id=args.lyrics_file), lexicon, policy, remnants
    )
    if stored.get("noise_removal", True):
        pattern_set = remove_noisy_vectors(pattern_set)
    from .features import generate_features

    fv = generate_features(pattern_set, spec)
    prob = float(models.predict_proba(model, np.array([fv.values]))[0])
    label = "4/4" if prob >= args.threshold else "3/4"
    print(f"{label}\tp={prob!r}")
    return 0


def cmd_stats(args) -> int:
    cfg = _config_from_args(args)
    records = corpusmod.read_corpus(args.corpus)
    pattern_sets = _pattern_sets(records, cfg)
    if cfg.noise_removal:
        pattern_sets = [
            (song_id, remove_noisy_vectors(ps), label)
            for song_id, ps, label in pattern_sets
        ]
    spec = cfg.feature_spec()

    per_song_counts: dict[tuple[str, str], list[int]] = {}
    for _, pattern_set, label in pattern_sets:
        for name in spec.patterns:
            pattern = StressBeatPattern.named(name)
            total = sum(count_pattern(v, pattern) for v in pattern_set.vectors)
            per_song_counts.setdefault((label, name), []).append(total)

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["record_type", "label", "pattern", "x", "value"])
        for (label, name), counts in sorted(per_song_counts.items()):
            writer.writerow(
                ["summary", label, name, "mean_count", repr(sum(counts) / len(counts))]
            )
            writer.writerow(["summary", label, name, "total_count", repr(float(sum(counts)))])
            writer.writerow(["summary", label, name, "songs", repr(float(len(counts)))])
        for (label, name), counts in sorted(per_song_counts.items()):
            for value, n in sorted(Counter(counts).items()):
                writer.writerow(["histogram", label, name, value, n])

    dataset, _ = build_matrix(pattern_sets, spec, noise_removal=False)
    R = evaluation.pearson_correlation_matrix(dataset.X)
    base = args.out.rsplit(".", 1)[0]
    corr_path = base + "_correlation.csv"
    with open(corr_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature"] + dataset.feature_names)
        for name, row in zip(dataset.feature_names, R):
            writer.writerow([name] + [repr(float(v)) for v in row])
    if not args.no_plots:
        from . import plotting

        plotting.save_correlation_figure(R, dataset.feature_names, base + "_correlation.png")
        for name in spec.patterns:
            per_class = {
                label: per_song_counts.get((label, name), [])
                for label in ("3/4", "4/4")
            }
            plotting.save_histogram_figure(
                per_class, name, base + f"_hist_{name}.png"
            )
    print(f"wrote {args.out} and {corr_path} (seed {cfg.seed})")
    return 0


def cmd_synth(args) -> int:
    records = synthetic.generate_benchmark_corpus(
        n_songs=args.songs,
        minority_fraction=args.minority_fraction,
        seed=args.seed if args.seed is not None else 0,
    )
    corpusmod.write_corpus(records, args.out)
    counts = corpusmod.class_counts(records)
    print(f"wrote {args.out}: {len(records)} songs {counts}")
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyricmeter",
        description="Time signature determination (3/4 vs 4/4) from lyrics text",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus file and report class counts")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("featurize", help="write the feature matrix CSV for a corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--out", default="features.csv")
    _add_common_options(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="resample, train, and save one model")
    p.add_argument("features_csv")
    p.add_argument("-o", "--out", default="model.json")
    _add_common_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "evaluate", help="cross-validated evaluation of a corpus or features CSV"
    )
    p.add_argument("input", help="corpus JSONL or features .csv")
    p.add_argument("-o", "--out", default="report.json")
    p.add_argument("--roc", default="roc.csv")
    _add_common_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run the feature-selection ablation grid")
    p.add_argument("corpus")
    p.add_argument("--grid", help="grid CSV (default: bundled 24-row grid)")
    p.add_argument("-o", "--out", default="ablation.csv")
    _add_common_options(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("predict", help="predict the time signature of one lyrics file")
    p.add_argument("model_file")
    p.add_argument("lyrics_file")
    p.add_argument("--threshold", type=float, default=0.5)
    _add_common_options(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("stats", help="per-class pattern statistics and correlations")
    p.add_argument("corpus")
    p.add_argument("-o", "--out", default="stats.csv")
    _add_common_options(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a synthetic benchmark corpus")
    p.add_argument("-o", "--out", default="corpus.jsonl")
    p.add_argument("--songs", type=int, default=1000)
    p.add_argument("--minority-fraction", type=float, default=0.10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LyricmeterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
