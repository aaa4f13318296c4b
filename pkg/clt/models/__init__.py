from clt.models.layers import (
    ATTENTION_POOLING,
    MEAN_POOLING,
    Attention,
    ClassifierHead,
    CnnEncoder,
    Embedding,
    ModelDims,
    attention_pool,
)
from clt.models.base import SentimentModel
from clt.models.cnn import CnnClassifier, cnn_classify
from clt.models.bagged import BaggedCnn, BaggedOutput, baggedcnn_forward
from clt.models.letranets import LeTraNets, LeTraNetsOutput, letranets_forward
from clt.models.registry import MODEL_KINDS, build_model, model_from_config
from clt.models.checkpoint import load_checkpoint, read_header, save_checkpoint

__all__ = [
    "ATTENTION_POOLING", "MEAN_POOLING", "Attention", "ClassifierHead", "CnnEncoder", "Embedding",
    "ModelDims", "attention_pool", "SentimentModel", "CnnClassifier", "cnn_classify",
    "BaggedCnn", "BaggedOutput", "baggedcnn_forward", "LeTraNets", "LeTraNetsOutput",
    "letranets_forward", "MODEL_KINDS", "build_model", "model_from_config",
    "load_checkpoint", "read_header", "save_checkpoint",
]
