from typing import Dict, Type

import numpy as np

from clt.errors import ContractViolation
from clt.models.bagged import BaggedCnn
from clt.models.base import SentimentModel
from clt.models.cnn import CnnClassifier
from clt.models.layers import ModelDims
from clt.models.letranets import LeTraNets

MODEL_KINDS: Dict[str, Type[SentimentModel]] = {
    CnnClassifier.kind: CnnClassifier,
    BaggedCnn.kind: BaggedCnn,
    LeTraNets.kind: LeTraNets,
}


def build_model(
    kind: str,
    dims: ModelDims,
    embeddings: np.ndarray,
    seed: int = 0,
    train_embeddings: bool = True,
    **options,
) -> SentimentModel:
    """Instantiate `kind` with seeded parameter initialization."""
    if kind not in MODEL_KINDS:
        raise ContractViolation(f"Unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}")
    rng = np.random.default_rng(seed)
    return MODEL_KINDS[kind](dims, embeddings, rng, train_embeddings=train_embeddings, **options)


def model_from_config(config: dict) -> SentimentModel:
    """Empty (zero-valued) model shaped by a `SentimentModel.config()` payload."""
    dims = ModelDims.from_dict(config['dims'])
    options = {}
    if config['kind'] == LeTraNets.kind:
        options['use_joint'] = config.get('use_joint', True)
    model = build_model(config['kind'], dims, np.zeros((dims.vocab_size, dims.embedding_dim)),
                        train_embeddings=config.get('train_embeddings', True), **options)
    return model
