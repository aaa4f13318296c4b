from clt.training.config import (
    ABLATION_VARIANTS,
    DIRECTIONS,
    LONG_TO_SHORT,
    SHORT_TO_LONG,
    TrainConfig,
    source_channel,
    target_channel,
)
from clt.training.data import gold_labels, minibatches, prepare_bags
from clt.training.losses import (
    ALL_TERMS,
    BAG,
    JOINT,
    LONE,
    LossBreakdown,
    baggedcnn_loss,
    batch_loss,
    cnn_loss,
    loss_long,
    loss_short,
    pr_detach_direction,
)
from clt.training.trainer import (
    EpochRecord,
    Phase,
    TrainHistory,
    TrainResult,
    dev_accuracy,
    full_phase,
    pretrain_phases,
    run_epoch,
    stepwise_pretrain,
    train,
    training_dims,
)
from clt.training.tuning import LambdaSearch, select_lambda, tune_lambda
from clt.training.gradcheck_suite import LossCheck, check_all_losses, check_loss_gradients

__all__ = [
    "ABLATION_VARIANTS", "DIRECTIONS", "LONG_TO_SHORT", "SHORT_TO_LONG", "TrainConfig",
    "source_channel", "target_channel", "gold_labels", "minibatches", "prepare_bags",
    "ALL_TERMS", "BAG", "JOINT", "LONE", "LossBreakdown", "baggedcnn_loss", "batch_loss", "cnn_loss",
    "loss_long", "loss_short", "pr_detach_direction", "EpochRecord", "Phase", "TrainHistory",
    "TrainResult", "dev_accuracy", "full_phase", "pretrain_phases", "run_epoch", "stepwise_pretrain",
    "train", "training_dims", "LambdaSearch", "select_lambda", "tune_lambda",
    "LossCheck", "check_all_losses", "check_loss_gradients",
]
