"""Pipeline configuration: defaults < config file < command-line flags.

The config file is flat ``key = value`` text; keys use the same names as the
long command-line flags (without the leading dashes).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import FormatError, InputOutputError, UsageError
from .features import FeatureSpec

_SPEC_ALIASES = {
    "overall": "overall",
    "repeat": "repeat",
    "10": "10",
    "100": "100",
    "1000": "1000",
    "count": "count",
    "mean": "mean",
    "mode": "mode",
}


def parse_feature_spec(text: str) -> FeatureSpec:
    """Parse "<structural list>:<pattern list>:<stat list>".

    Example: ``overall,repeat:10,100,1000:count,mean,mode``.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(
            "feature spec must have three colon-separated groups, e.g. "
            "overall,repeat:10,100:count,mean,mode"
        )
    groups = []
    for part in parts:
        items = []
        for item in part.split(","):
            item = item.strip().lower()
            if item not in _SPEC_ALIASES:
                raise UsageError(f"unknown feature spec item: {item!r}")
            items.append(_SPEC_ALIASES[item])
        groups.append(tuple(items))
    return FeatureSpec(
        structural_types=groups[0], patterns=groups[1], statistics=groups[2]
    )


def format_feature_spec(spec: FeatureSpec) -> str:
    return ":".join(
        ",".join(group)
        for group in (spec.structural_types, spec.patterns, spec.statistics)
    )


@dataclass(frozen=True)
class PipelineConfig:
    lexicon: str | None = None
    stopwords: str | None = None
    remnants: str | None = None
    features: str = "overall,repeat:10,100,1000:count,mean,mode"
    noise_removal: bool = True
    resample: str = "smotetomek"
    resample_scope: str = "folds"
    smote_k: int = 5
    smote_ratio: float = 1.0
    model: str = "gbdt"
    model_params: dict = field(default_factory=dict)
    folds: int = 5
    seed: int = 0

    def feature_spec(self) -> FeatureSpec:
        return parse_feature_spec(self.features)


_BOOL_VALUES = {"on": True, "true": True, "1": True, "off": False, "false": False, "0": False}

_INT_KEYS = {"smote_k", "folds", "seed"}
_FLOAT_KEYS = {"smote_ratio"}
_BOOL_KEYS = {"noise_removal"}
_STR_KEYS = {
    "lexicon", "stopwords", "remnants", "features", "resample",
    "resample_scope", "model",
}


def _coerce(key: str, value: str):
    if key in _BOOL_KEYS:
        try:
            return _BOOL_VALUES[value.strip().lower()]
        except KeyError:
            raise UsageError(f"{key}: expected on/off, got {value!r}") from None
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise UsageError(f"{key}: bad numeric value {value!r}") from None
    return value


def load_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read config file: {exc}") from exc
    values: dict = {}
    model_params: dict = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError("expected key = value", line_number=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key.startswith("model_param."):
            model_params[key.split(".", 1)[1]] = _parse_param_value(value)
            continue
        if key not in _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS:
            raise FormatError(f"unknown config key: {key}", line_number=lineno)
        values[key] = _coerce(key, value)
    if model_params:
        values["model_params"] = model_params
    return values


def _parse_param_value(value: str):
    value = value.strip()
    for convert in (int, float):
        try:
            return convert(value)
        except ValueError:
            continue
    if value.lower() in _BOOL_VALUES:
        return _BOOL_VALUES[value.lower()]
    return value


def build_config(file_values: dict | None = None, cli_values: dict | None = None) -> PipelineConfig:
    cfg = PipelineConfig()
    for layer in (file_values or {}, cli_values or {}):
        layer = {k: v for k, v in layer.items() if v is not None}
        params = {**cfg.model_params, **layer.pop("model_params", {})}
        cfg = replace(cfg, **layer, model_params=params)
    # validate eagerly so bad values fail before any work happens
    cfg.feature_spec()
    if cfg.resample not in ("none", "smote", "tomek", "smotetomek"):
        raise UsageError(f"unknown resampling kind: {cfg.resample!r}")
    if cfg.resample_scope not in ("folds", "whole"):
        raise UsageError(f"unknown resample scope: {cfg.resample_scope!r}")
    if cfg.model not in ("logistic", "tree", "forest", "gbdt"):
        raise UsageError(f"unknown model kind: {cfg.model!r}")
    if cfg.folds < 2:
        raise UsageError("folds must be >= 2")
    return cfg
