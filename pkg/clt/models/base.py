from typing import Dict, List, Sequence

import numpy as np

from clt.errors import ContractViolation
from clt.numcore import Parameter, Tensor, argmax, dropout
from clt.textproc import Bag, Instance
from clt.models.layers import ClassifierHead, Embedding, ModelDims


class SentimentModel:
    """
    Common surface of the three classifiers.

    Subclasses build their parameters in `__init__`, list them in declared
    order from `parameters()`, and implement `predict_proba` with the head the
    architecture uses at test time.
    """

    kind: str = "base"

    def __init__(self, dims: ModelDims, embeddings: np.ndarray, train_embeddings: bool = True):
        if embeddings.shape != (dims.vocab_size, dims.embedding_dim):
            raise ContractViolation(
                f"embedding matrix {embeddings.shape} does not match "
                f"({dims.vocab_size}, {dims.embedding_dim})"
            )
        self.dims = dims
        self.train_embeddings = train_embeddings
        self.embedding = Embedding(embeddings, trainable=train_embeddings)

    # -- parameters -----------------------------------------------------------

    def parameters(self) -> List[Parameter]:
        raise NotImplementedError

    def heads(self) -> List[ClassifierHead]:
        raise NotImplementedError

    def named_parameters(self) -> Dict[str, Parameter]:
        return {p.name: p for p in self.parameters()}

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {p.name: p.data.copy() for p in self.parameters()}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for p in self.parameters():
            if snapshot[p.name].shape != p.shape:
                raise ContractViolation(f"snapshot shape {snapshot[p.name].shape} for {p.name}, expected {p.shape}")
            p.data[...] = snapshot[p.name]

    def set_trainable(self, params: Sequence[Parameter]) -> None:
        """Make exactly `params` trainable."""
        live = {id(p) for p in params}
        for p in self.parameters():
            p.trainable = id(p) in live

    def reset_trainable(self) -> None:
        """Everything trainable except a frozen embedding table."""
        for p in self.parameters():
            p.trainable = True
        self.embedding.table.trainable = self.train_embeddings

    def constrain(self, max_norm: float) -> None:
        for head in self.heads():
            if head.W.trainable:
                head.constrain(max_norm)

    # -- forward helpers ------------------------------------------------------

    def _drop(self, x: Tensor, train: bool, rng: np.random.Generator) -> Tensor:
        return dropout(x, self.dims.dropout, train, rng)

    @staticmethod
    def as_bag(item) -> Bag:
        if isinstance(item, Bag):
            return item
        if isinstance(item, Instance):
            return Bag.from_instance(item)
        raise ContractViolation(f"expected a Bag or an Instance, got {type(item).__name__}")

    # -- prediction -----------------------------------------------------------

    def predict_proba(self, item) -> np.ndarray:
        raise NotImplementedError

    def predict(self, item) -> int:
        return argmax(self.predict_proba(item))

    def config(self) -> dict:
        """Everything besides parameter values needed to rebuild the model."""
        return {'kind': self.kind, 'dims': self.dims.to_dict(),
                'train_embeddings': self.train_embeddings}
