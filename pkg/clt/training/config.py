from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from clt.config import (
    BATCH_SIZE,
    CHUNK_SIZE,
    DROPOUT_RATE,
    EARLY_STOPPING_PATIENCE,
    MAX_EPOCHS,
    MAX_NORM,
    MAX_SEGMENTS,
    PRETRAIN_EPOCHS,
    PSEUDO_LONG_K_MAX,
    PSEUDO_LONG_K_MIN,
    PSEUDO_LONGS_PER_BATCH,
    ROOT_SEED,
)
from clt.textproc import PseudoLongConfig, Segmenter

LONG_TO_SHORT = "long2short"
SHORT_TO_LONG = "short2long"
DIRECTIONS = (LONG_TO_SHORT, SHORT_TO_LONG)

# Ablation rows: which mechanisms each variant enables
ABLATION_VARIANTS = {
    "-": (False, False, False),
    "JT": (True, False, False),
    "PR": (False, True, False),
    "SP": (False, False, True),
    "All": (True, True, True),
}


def source_channel(direction: str) -> str:
    return "long" if direction == LONG_TO_SHORT else "short"


def target_channel(direction: str) -> str:
    return "short" if direction == LONG_TO_SHORT else "long"


class TrainConfig(BaseModel):
    """Hyperparameters and mechanism switches for one training run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    direction: Literal["long2short", "short2long"] = LONG_TO_SHORT
    lambda_: float = Field(default=0.1, ge=0.0)
    batch_size: int = Field(default=BATCH_SIZE, ge=1)
    max_epochs: int = Field(default=MAX_EPOCHS, ge=1)
    patience: int = Field(default=EARLY_STOPPING_PATIENCE, ge=1)
    pretrain_epochs: int = Field(default=PRETRAIN_EPOCHS, ge=0)
    dropout: float = Field(default=DROPOUT_RATE, ge=0.0, lt=1.0)
    max_norm: float = Field(default=MAX_NORM, gt=0.0)
    seed: int = ROOT_SEED

    joint_training: bool = True
    prediction_regularization: bool = True
    stepwise_pretraining: bool = True

    pooling: Literal["attention", "mean"] = "attention"
    train_embeddings: bool = True
    pseudo_long_k: Tuple[int, int] = (PSEUDO_LONG_K_MIN, PSEUDO_LONG_K_MAX)
    pseudo_longs_per_batch: int = Field(default=PSEUDO_LONGS_PER_BATCH, ge=1)

    segment_mode: Literal["sentence", "chunk"] = "sentence"
    chunk_size: int = Field(default=CHUNK_SIZE, ge=1)
    max_segments: int = Field(default=MAX_SEGMENTS, ge=1)

    @field_validator("pseudo_long_k")
    @classmethod
    def _valid_k_range(cls, v):
        lo, hi = v
        if not 1 <= lo <= hi:
            raise ValueError(f"pseudo_long_k must satisfy 1 <= low <= high, got {v}")
        return v

    @property
    def segmenter(self) -> Segmenter:
        return Segmenter(mode=self.segment_mode, chunk_size=self.chunk_size, max_segments=self.max_segments)

    def pseudo_long_config(self, seed: int = 0) -> PseudoLongConfig:
        return PseudoLongConfig(k_min=self.pseudo_long_k[0], k_max=self.pseudo_long_k[1], seed=seed)

    def ablation(self, variant: str) -> 'TrainConfig':
        """Copy with the mechanism switches of an ablation row ("-", "JT", "PR", "SP", "All")."""
        if variant not in ABLATION_VARIANTS:
            raise ValueError(f"Unknown ablation variant {variant!r}; expected one of {list(ABLATION_VARIANTS)}")
        jt, pr, sp = ABLATION_VARIANTS[variant]
        return self.model_copy(update={
            'joint_training': jt,
            'prediction_regularization': pr,
            'stepwise_pretraining': sp,
        })

    @property
    def mechanisms(self) -> str:
        names = [name for name, on in (("JT", self.joint_training),
                                       ("PR", self.prediction_regularization),
                                       ("SP", self.stepwise_pretraining)) if on]
        return "+".join(names) or "-"
