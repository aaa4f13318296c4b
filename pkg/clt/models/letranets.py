"""
Two-channel classifier: a lone CNN reading the text as one sequence, a bagged
CNN reading it as segments, and a joint head over both document vectors.

The joint head input is `[lone ; bag]` in that order (see JOINT_ORDER).
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from clt.config import JOINT_ORDER
from clt.models.bagged import encode_segments
from clt.models.base import SentimentModel
from clt.models.layers import (
    ATTENTION_POOLING,
    Attention,
    ClassifierHead,
    CnnEncoder,
    ModelDims,
    attention_pool,
)
from clt.numcore import Parameter, Tensor, concat
from clt.textproc import Bag


@dataclass
class LeTraNetsOutput:
    doc_lone: Tensor
    doc_bag: Tensor
    doc_joint: Tensor
    seg_lone: List[Tensor]
    seg_bag: List[Tensor]
    seg_joint: List[Tensor]
    weights: Tensor


def letranets_forward(bag: Bag, model: 'LeTraNets', train: bool = False,
                      rng: np.random.Generator = None) -> LeTraNetsOutput:
    lone_segments = encode_segments(model, model.lone, bag)
    if bag.num_segments == 1:
        # The document is the single segment; same ids, same encoding
        lone_doc = lone_segments[0]
    else:
        lone_doc = model.lone(model.embedding(bag.document_ids()))
    bag_segments = encode_segments(model, model.bag, bag)
    bag_doc, weights = attention_pool(bag_segments, model.attention)

    def heads_for(lone_vec: Tensor, bag_vec: Tensor):
        # One dropout mask per vector, shared by its own head and the joint head
        lone_vec = model._drop(lone_vec, train, rng)
        bag_vec = model._drop(bag_vec, train, rng)
        parts = {'lone': lone_vec, 'bag': bag_vec}
        joint_in = concat([parts[name] for name in JOINT_ORDER])
        return model.head_lone(lone_vec), model.head_bag(bag_vec), model.head_joint(joint_in)

    y_l, y_b, y_j = heads_for(lone_doc, bag_doc)
    seg_l, seg_b, seg_j = [], [], []
    for lv, bv in zip(lone_segments, bag_segments):
        sl, sb, sj = heads_for(lv, bv)
        seg_l.append(sl)
        seg_b.append(sb)
        seg_j.append(sj)
    return LeTraNetsOutput(doc_lone=y_l, doc_bag=y_b, doc_joint=y_j,
                           seg_lone=seg_l, seg_bag=seg_b, seg_joint=seg_j, weights=weights)


class LeTraNets(SentimentModel):
    kind = "letranets"

    def __init__(self, dims: ModelDims, embeddings: np.ndarray, rng: np.random.Generator,
                 train_embeddings: bool = True, use_joint: bool = True):
        super().__init__(dims, embeddings, train_embeddings)
        D = dims.encoder_dim
        self.lone = CnnEncoder("lone", dims, rng)
        self.bag = CnnEncoder("bag", dims, rng)
        self._attention = Attention("attention", D, dims.attention_dim, rng)
        self.head_lone = ClassifierHead("head_l", D, dims.num_classes, rng)
        self.head_bag = ClassifierHead("head_b", D, dims.num_classes, rng)
        self.head_joint = ClassifierHead("head_j", 2 * D, dims.num_classes, rng)
        # Without joint training the joint head is never fit, so prediction
        # averages the lone and bag heads instead
        self.use_joint = use_joint

    @property
    def attention(self):
        return self._attention if self.dims.pooling == ATTENTION_POOLING else None

    def lone_path(self) -> List[Parameter]:
        return self.lone.parameters() + self.head_lone.parameters()

    def bag_path(self) -> List[Parameter]:
        params = self.bag.parameters()
        if self.attention is not None:
            params += self.attention.parameters()
        return params + self.head_bag.parameters()

    def joint_path(self) -> List[Parameter]:
        return self.head_joint.parameters()

    def parameters(self) -> List[Parameter]:
        params = self.embedding.parameters() + self.lone.parameters() + self.bag.parameters()
        if self.attention is not None:
            params += self.attention.parameters()
        for head in self.heads():
            params += head.parameters()
        return params

    def heads(self) -> List[ClassifierHead]:
        return [self.head_lone, self.head_bag, self.head_joint]

    def forward(self, bag: Bag, train: bool = False, rng: np.random.Generator = None) -> LeTraNetsOutput:
        return letranets_forward(bag, self, train, rng)

    def predict_proba(self, item) -> np.ndarray:
        out = self.forward(self.as_bag(item))
        if self.use_joint:
            return out.doc_joint.data
        return 0.5 * (out.doc_lone.data + out.doc_bag.data)

    def config(self) -> dict:
        payload = super().config()
        payload['use_joint'] = self.use_joint
        return payload
