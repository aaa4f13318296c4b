from typing import List

import numpy as np

from clt.models.base import SentimentModel
from clt.models.layers import ClassifierHead, CnnEncoder, ModelDims
from clt.numcore import Parameter, Tensor


def cnn_classify(ids: np.ndarray, model: 'CnnClassifier', train: bool = False,
                 rng: np.random.Generator = None) -> Tensor:
    """Class distribution for one token-id sequence: embed, encode, dropout, softmax head."""
    encoded = model.encoder(model.embedding(ids))
    return model.head(model._drop(encoded, train, rng))


class CnnClassifier(SentimentModel):
    """Single-channel CNN over the whole text, regardless of its length."""

    kind = "cnn"

    def __init__(self, dims: ModelDims, embeddings: np.ndarray, rng: np.random.Generator,
                 train_embeddings: bool = True):
        super().__init__(dims, embeddings, train_embeddings)
        self.encoder = CnnEncoder("cnn", dims, rng)
        self.head = ClassifierHead("head", self.encoder.output_dim, dims.num_classes, rng)

    def parameters(self) -> List[Parameter]:
        return self.embedding.parameters() + self.encoder.parameters() + self.head.parameters()

    def heads(self) -> List[ClassifierHead]:
        return [self.head]

    def forward(self, ids: np.ndarray, train: bool = False, rng: np.random.Generator = None) -> Tensor:
        return cnn_classify(ids, self, train, rng)

    def predict_proba(self, item) -> np.ndarray:
        return self.forward(self.as_bag(item).document_ids()).data
