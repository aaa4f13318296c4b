from dataclasses import dataclass
from typing import List

import numpy as np

from clt.models.base import SentimentModel
from clt.models.layers import (
    ATTENTION_POOLING,
    Attention,
    ClassifierHead,
    CnnEncoder,
    ModelDims,
    attention_pool,
)
from clt.numcore import Parameter, Tensor
from clt.textproc import Bag


@dataclass
class BaggedOutput:
    document: Tensor
    segments: List[Tensor]
    weights: Tensor


def encode_segments(model, encoder: CnnEncoder, bag: Bag) -> List[Tensor]:
    return [encoder(model.embedding(ids)) for ids in bag.segment_ids()]


def baggedcnn_forward(bag: Bag, model: 'BaggedCnn', train: bool = False,
                      rng: np.random.Generator = None) -> BaggedOutput:
    """
    Document and per-segment class distributions through the shared head.

    Segment vectors are encoded once; the document vector is their attention
    (or mean) pool. Each vector gets its own dropout mask in train mode.
    """
    vectors = encode_segments(model, model.encoder, bag)
    doc_vec, weights = attention_pool(vectors, model.attention)
    y_doc = model.head(model._drop(doc_vec, train, rng))
    y_segments = [model.head(model._drop(v, train, rng)) for v in vectors]
    return BaggedOutput(document=y_doc, segments=y_segments, weights=weights)


class BaggedCnn(SentimentModel):
    """CNN sentence encoder, attention pooling over segments, one shared softmax head."""

    kind = "baggedcnn"

    def __init__(self, dims: ModelDims, embeddings: np.ndarray, rng: np.random.Generator,
                 train_embeddings: bool = True):
        super().__init__(dims, embeddings, train_embeddings)
        self.encoder = CnnEncoder("bag", dims, rng)
        self._attention = Attention("attention", self.encoder.output_dim, dims.attention_dim, rng)
        self.head = ClassifierHead("head", self.encoder.output_dim, dims.num_classes, rng)

    @property
    def attention(self):
        return self._attention if self.dims.pooling == ATTENTION_POOLING else None

    def parameters(self) -> List[Parameter]:
        params = self.embedding.parameters() + self.encoder.parameters()
        if self.attention is not None:
            params += self.attention.parameters()
        return params + self.head.parameters()

    def heads(self) -> List[ClassifierHead]:
        return [self.head]

    def forward(self, bag: Bag, train: bool = False, rng: np.random.Generator = None) -> BaggedOutput:
        return baggedcnn_forward(bag, self, train, rng)

    def predict_proba(self, item) -> np.ndarray:
        return self.forward(self.as_bag(item)).document.data
