"""
Serializable evaluation results.

MetricsReport JSON keys (stable):
    model_kind, direction, mechanisms, num_classes, lambda_, seed,
    accuracy, error, rmse, in_channel_accuracy, in_channel_error,
    transfer_loss, transfer_ratio, folds[], length_buckets[], lambda_scores{}
"""

import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from clt.errors import ContractViolation
from clt.evaluation.metrics import accuracy


class LengthBucket(BaseModel):
    model_config = ConfigDict(extra="forbid")

    low: int
    high: int
    count: int = Field(ge=0)
    accuracy: Optional[float] = None


class FoldResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fold: int
    lambda_: float
    accuracy: float = Field(ge=0.0, le=1.0)
    error: float = Field(ge=0.0, le=1.0)
    rmse: Optional[float] = None
    in_channel_accuracy: float = Field(ge=0.0, le=1.0)
    in_channel_error: float = Field(ge=0.0, le=1.0)
    transfer_loss: float
    selected_epoch: int = -1


class MetricsReport(BaseModel):
    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    model_kind: str
    direction: str
    mechanisms: str = "-"
    num_classes: int
    lambda_: float
    seed: int
    accuracy: float
    error: float
    rmse: Optional[float] = None
    in_channel_accuracy: float
    in_channel_error: float
    transfer_loss: float
    transfer_ratio: Optional[float] = None
    folds: List[FoldResult] = Field(default_factory=list)
    length_buckets: List[LengthBucket] = Field(default_factory=list)
    lambda_scores: Dict[str, float] = Field(default_factory=dict)

    def to_json(self) -> str:
        # No timestamps or timings: identical runs give identical bytes
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding='utf-8')
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'MetricsReport':
        return cls.model_validate_json(Path(path).read_text(encoding='utf-8'))


def decile_edges(lengths: Sequence[int], num_buckets: int = 10) -> List[int]:
    """Bucket boundaries at the quantiles of `lengths`, deduplicated."""
    lengths = np.asarray(lengths)
    if lengths.size == 0:
        raise ContractViolation("cannot bucket an empty set")
    qs = np.quantile(lengths, np.linspace(0.0, 1.0, num_buckets + 1))
    return sorted(set(int(round(q)) for q in qs))


def length_buckets(
    predictions: Sequence[int],
    golds: Sequence[int],
    lengths: Sequence[int],
    edges: Sequence[int] = None,
) -> List[LengthBucket]:
    """
    Accuracy per token-length bucket.

    Buckets are [e_0, e_1), [e_1, e_2), ..., [e_{m-1}, e_m] with the last one
    closed; lengths outside [e_0, e_m] join the nearest end bucket, so counts
    always sum to the number of predictions. A single edge gives one bucket.
    """
    preds, golds, lengths = np.asarray(predictions), np.asarray(golds), np.asarray(lengths)
    if not (preds.shape == golds.shape == lengths.shape):
        raise ContractViolation("predictions, golds and lengths must have equal length")
    edges = sorted(set(int(e) for e in (edges if edges is not None else decile_edges(lengths))))
    if not edges:
        raise ContractViolation("need at least one bucket edge")
    if len(edges) == 1:
        bounds = [(edges[0], edges[0])]
        which = np.zeros(lengths.size, dtype=np.int64)
    else:
        bounds = list(zip(edges[:-1], edges[1:]))
        which = np.clip(np.searchsorted(edges, lengths, side='right') - 1, 0, len(bounds) - 1)

    buckets = []
    for i, (low, high) in enumerate(bounds):
        members = which == i
        count = int(members.sum())
        acc = accuracy(preds[members], golds[members]) if count else None
        buckets.append(LengthBucket(low=low, high=high, count=count, accuracy=acc))
    return buckets
