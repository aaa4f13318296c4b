"""
Building blocks shared by the three architectures: the embedding table, the
multi-width CNN sentence encoder, attention pooling and softmax classifier heads.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from clt.config import (
    ATTENTION_DIM,
    DROPOUT_RATE,
    EMBEDDING_DIM,
    FEATURE_MAPS,
    FILTER_WIDTHS,
    PAD_ID,
)
from clt.errors import ContractViolation
from clt.numcore import (
    Parameter,
    Tensor,
    conv1d_maxpool,
    embedding_lookup,
    linear,
    matvec,
    maxnorm_constrain,
    softmax,
    stack,
    tanh,
    weighted_sum,
)

ATTENTION_POOLING = "attention"
MEAN_POOLING = "mean"


@dataclass(frozen=True)
class ModelDims:
    vocab_size: int
    num_classes: int
    embedding_dim: int = EMBEDDING_DIM
    widths: Tuple[int, ...] = FILTER_WIDTHS
    maps: int = FEATURE_MAPS
    attention_dim: int = ATTENTION_DIM
    dropout: float = DROPOUT_RATE
    pooling: str = ATTENTION_POOLING

    def __post_init__(self):
        if self.vocab_size < 3:
            raise ContractViolation(f"vocab_size must cover PAD, UNK and at least one token, got {self.vocab_size}")
        if self.num_classes < 2:
            raise ContractViolation(f"num_classes must be at least 2, got {self.num_classes}")
        if self.pooling not in (ATTENTION_POOLING, MEAN_POOLING):
            raise ContractViolation(f"Unknown pooling {self.pooling!r}")

    @property
    def encoder_dim(self) -> int:
        return self.maps * len(self.widths)

    def to_dict(self) -> dict:
        return {
            'vocab_size': self.vocab_size,
            'num_classes': self.num_classes,
            'embedding_dim': self.embedding_dim,
            'widths': list(self.widths),
            'maps': self.maps,
            'attention_dim': self.attention_dim,
            'dropout': self.dropout,
            'pooling': self.pooling,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> 'ModelDims':
        payload = dict(payload)
        payload['widths'] = tuple(payload['widths'])
        return cls(**payload)


def glorot(rng: np.random.Generator, shape: Sequence[int], fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=tuple(shape))


class Embedding:
    def __init__(self, table: np.ndarray, trainable: bool = True):
        table = np.array(table, copy=True)
        table[PAD_ID] = 0.0
        self.table = Parameter(table, name="embedding", trainable=trainable)

    @property
    def dim(self) -> int:
        return self.table.shape[1]

    def __call__(self, ids: np.ndarray) -> Tensor:
        return embedding_lookup(self.table, ids)

    def parameters(self) -> List[Parameter]:
        return [self.table]


class CnnEncoder:
    """Filters of several widths over word embeddings, ReLU, max-over-time pooling."""

    def __init__(self, prefix: str, dims: ModelDims, rng: np.random.Generator):
        E, m = dims.embedding_dim, dims.maps
        self.widths = tuple(dims.widths)
        self.filters = [
            Parameter(glorot(rng, (m, h, E), fan_in=h * E, fan_out=m), name=f"{prefix}.filter{h}")
            for h in self.widths
        ]
        self.biases = [Parameter(np.zeros(m), name=f"{prefix}.bias{h}") for h in self.widths]
        self.output_dim = m * len(self.widths)

    def __call__(self, embedded: Tensor) -> Tensor:
        return conv1d_maxpool(embedded, self.filters, self.biases)

    def parameters(self) -> List[Parameter]:
        params = []
        for w, b in zip(self.filters, self.biases):
            params.extend([w, b])
        return params


class ClassifierHead:
    """softmax(W x + b)."""

    def __init__(self, prefix: str, in_dim: int, num_classes: int, rng: np.random.Generator):
        self.W = Parameter(glorot(rng, (num_classes, in_dim), fan_in=in_dim, fan_out=num_classes), name=f"{prefix}.W")
        self.b = Parameter(np.zeros(num_classes), name=f"{prefix}.b")

    @property
    def in_dim(self) -> int:
        return self.W.shape[1]

    def __call__(self, x: Tensor) -> Tensor:
        return softmax(linear(x, self.W, self.b))

    def constrain(self, max_norm: float) -> None:
        maxnorm_constrain(self.W, max_norm)

    def parameters(self) -> List[Parameter]:
        return [self.W, self.b]


class Attention:
    """a_i = softmax_i(v . tanh(W_a s_i + b_a))."""

    def __init__(self, prefix: str, in_dim: int, hidden: int, rng: np.random.Generator):
        self.W_a = Parameter(glorot(rng, (hidden, in_dim), fan_in=in_dim, fan_out=hidden), name=f"{prefix}.W_a")
        self.b_a = Parameter(np.zeros(hidden), name=f"{prefix}.b_a")
        self.v = Parameter(glorot(rng, (hidden,), fan_in=hidden, fan_out=1), name=f"{prefix}.v")

    def weights(self, segments: Tensor) -> Tensor:
        hidden = tanh(linear(segments, self.W_a, self.b_a))
        return softmax(matvec(hidden, self.v))

    def parameters(self) -> List[Parameter]:
        return [self.W_a, self.b_a, self.v]


def attention_pool(segment_vectors: Sequence[Tensor], attn: Attention = None) -> Tuple[Tensor, Tensor]:
    """
    Pool segment vectors into one document vector.

    Returns:
        (d, weights) where d = sum_i weights[i] * s_i. With `attn=None` the
        weights are uniform (mean pooling).
    """
    if not segment_vectors:
        raise ContractViolation("attention_pool needs at least one segment vector")
    segments = stack(segment_vectors)
    if attn is None:
        n = len(segment_vectors)
        weights = Tensor(np.full(n, 1.0 / n), dtype=segments.data.dtype)
    else:
        weights = attn.weights(segments)
    return weighted_sum(weights, segments), weights
