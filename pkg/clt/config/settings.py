"""
Validated run configuration.

Precedence, highest first: explicit overrides (command-line flags), environment
variables `CLT_<KEY>`, a JSON config file, field defaults. Unknown keys in the
file or the overrides are errors.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from clt.config.config import (
    ATTENTION_DIM,
    DEV_FRACTION,
    EMBEDDING_DIM,
    ENV_PREFIX,
    FEATURE_MAPS,
    FILTER_WIDTHS,
    LAMBDA_GRID,
    LAMBDA_TUNING_FOLDS,
    MIN_COUNT,
    NUM_FOLDS,
    NUM_LENGTH_BUCKETS,
)
from clt.errors import ConfigError
from clt.training.config import TrainConfig

MECHANISMS = ("jt", "pr", "sp")
_TRAIN_FIELDS = tuple(TrainConfig.model_fields)


def _split_list(v):
    if isinstance(v, str):
        return [part.strip() for part in v.split(',') if part.strip()]
    return v


class RunConfig(BaseModel):
    """Flat key/value configuration shared by every subcommand."""

    model_config = ConfigDict(extra="forbid", frozen=True, protected_namespaces=())

    # Inputs and outputs
    model: Literal["cnn", "baggedcnn", "letranets"] = "letranets"
    source: Optional[str] = None
    target: Optional[str] = None
    unlabeled: Optional[str] = None
    embeddings: Optional[str] = None
    checkpoint: Optional[str] = None
    vocab: Optional[str] = None
    output_dir: str = "runs/latest"
    num_classes: Literal[2, 5] = 2
    label_base: Literal[0, 1] = 0

    # Architecture
    embedding_dim: int = Field(default=EMBEDDING_DIM, ge=1)
    widths: Tuple[int, ...] = FILTER_WIDTHS
    maps: int = Field(default=FEATURE_MAPS, ge=1)
    attention_dim: int = Field(default=ATTENTION_DIM, ge=1)
    min_count: int = Field(default=MIN_COUNT, ge=1)

    # Training (mirrors TrainConfig)
    direction: Literal["long2short", "short2long"] = "long2short"
    lambda_: float = Field(default=0.1, ge=0.0)
    batch_size: int = Field(default=TrainConfig.model_fields['batch_size'].default, ge=1)
    max_epochs: int = Field(default=TrainConfig.model_fields['max_epochs'].default, ge=1)
    patience: int = Field(default=TrainConfig.model_fields['patience'].default, ge=1)
    pretrain_epochs: int = Field(default=TrainConfig.model_fields['pretrain_epochs'].default, ge=0)
    dropout: float = Field(default=TrainConfig.model_fields['dropout'].default, ge=0.0, lt=1.0)
    max_norm: float = Field(default=TrainConfig.model_fields['max_norm'].default, gt=0.0)
    seed: int = TrainConfig.model_fields['seed'].default
    joint_training: bool = True
    prediction_regularization: bool = True
    stepwise_pretraining: bool = True
    pooling: Literal["attention", "mean"] = "attention"
    train_embeddings: bool = True
    pseudo_long_k: Tuple[int, int] = TrainConfig.model_fields['pseudo_long_k'].default
    pseudo_longs_per_batch: int = Field(default=1, ge=1)
    segment_mode: Literal["sentence", "chunk"] = "sentence"
    chunk_size: int = Field(default=TrainConfig.model_fields['chunk_size'].default, ge=1)
    max_segments: int = Field(default=TrainConfig.model_fields['max_segments'].default, ge=1)

    # Protocol
    lambda_grid: Optional[List[float]] = list(LAMBDA_GRID)
    folds: int = Field(default=NUM_FOLDS, ge=2)
    dev_fraction: float = Field(default=DEV_FRACTION, ge=0.0, lt=1.0)
    tuning_folds: int = Field(default=LAMBDA_TUNING_FOLDS, ge=1)
    bucket_edges: Optional[List[int]] = None
    num_buckets: int = Field(default=NUM_LENGTH_BUCKETS, ge=1)
    ablate: List[str] = Field(default_factory=list)
    workers: int = Field(default=1, ge=1)
    report_formats: List[Literal["json", "text"]] = Field(default_factory=lambda: ["json", "text"])

    @field_validator("widths", "pseudo_long_k", "lambda_grid", "bucket_edges", "ablate", "report_formats",
                     mode="before")
    @classmethod
    def _comma_lists(cls, v):
        return _split_list(v)

    @field_validator("widths")
    @classmethod
    def _positive_widths(cls, v):
        if not v or any(w < 1 for w in v):
            raise ValueError("widths must be a non-empty list of positive integers")
        return v

    @field_validator("pseudo_long_k")
    @classmethod
    def _k_range(cls, v):
        if not 1 <= v[0] <= v[1]:
            raise ValueError(f"pseudo_long_k must satisfy 1 <= low <= high, got {v}")
        return v

    @field_validator("lambda_grid")
    @classmethod
    def _grid(cls, v):
        if v is not None and (not v or any(x < 0 for x in v)):
            raise ValueError("lambda_grid must be a non-empty list of non-negative values")
        return v

    @field_validator("ablate")
    @classmethod
    def _mechanisms(cls, v):
        v = [m.lower() for m in v]
        unknown = [m for m in v if m not in MECHANISMS]
        if unknown:
            raise ValueError(f"unknown mechanism(s) {unknown}; expected a subset of {list(MECHANISMS)}")
        return sorted(set(v), key=MECHANISMS.index)

    def train_config(self) -> TrainConfig:
        return TrainConfig(**{k: getattr(self, k) for k in _TRAIN_FIELDS})

    def ablation_variants(self) -> List[str]:
        """Rows for `--ablate`: no mechanism, each listed one alone, then all three."""
        if not self.ablate:
            return []
        return ["-"] + [m.upper() for m in self.ablate] + ["All"]

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _read_config_file(path: str) -> Dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        payload = json.loads(p.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})")
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: expected a JSON object of key/value pairs")
    return payload


def _parse_env_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def environment_overrides(environ: Mapping[str, str]) -> Dict[str, Any]:
    """`CLT_<KEY>` variables naming RunConfig fields (other CLT_ variables are ignored)."""
    values = {}
    for name in RunConfig.model_fields:
        env_name = f"{ENV_PREFIX}{name.upper().rstrip('_')}"
        if env_name in environ:
            values[name] = _parse_env_value(environ[env_name])
    return values


def _reject_unknown(values: Mapping[str, Any], origin: str) -> None:
    for key in values:
        if key not in RunConfig.model_fields:
            raise ConfigError(f"unknown configuration key {key!r} in {origin}")


def load_run_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Merge defaults, a JSON file, environment variables and overrides into a RunConfig.

    Override values of None mean "not given" and are skipped.

    Raises:
        ConfigError: on an unreadable file, an unknown key or a value failing validation
    """
    merged: Dict[str, Any] = {}
    if path:
        file_values = _read_config_file(path)
        _reject_unknown(file_values, path)
        merged.update(file_values)
    merged.update(environment_overrides(os.environ if environ is None else environ))
    if overrides:
        given = {k: v for k, v in overrides.items() if v is not None}
        _reject_unknown(given, "overrides")
        merged.update(given)
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}")
