"""
Training loop: seeded minibatch Adadelta with max-norm heads, optional
stepwise pretraining, and early stopping on development accuracy.
"""

import time
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from clt.config.seeding import derive_rng, derive_seed
from clt.datasets import Corpus
from clt.errors import ContractViolation, NonFiniteError, TrainingDivergedError
from clt.models import MEAN_POOLING, BaggedCnn, LeTraNets, ModelDims, SentimentModel, build_model
from clt.numcore import Adadelta, Parameter
from clt.textproc import Bag, Vocabulary, make_pseudo_long
from clt.training.config import SHORT_TO_LONG, TrainConfig, source_channel
from clt.training.data import gold_labels, minibatches, prepare_bags
from clt.training.losses import ALL_TERMS, BAG, JOINT, LONE, batch_loss, pr_detach_direction
from clt.utils.logging.component_loggers import (
    get_training_logger,
    log_epoch_metrics,
    log_performance_event,
    log_training_event,
)

logger = get_training_logger(__name__)

FULL_STAGE = "full"


@dataclass
class EpochRecord:
    stage: str
    epoch: int
    losses: Dict[str, float]
    dev_accuracy: Optional[float] = None
    seconds: float = 0.0


@dataclass
class TrainHistory:
    model_kind: str
    direction: str
    lambda_: float
    mechanisms: str
    epochs: List[EpochRecord] = field(default_factory=list)
    selected_epoch: int = -1
    best_dev_accuracy: Optional[float] = None
    wall_time: float = 0.0

    def full_epochs(self) -> List[EpochRecord]:
        return [e for e in self.epochs if e.stage == FULL_STAGE]

    def to_dict(self, include_timing: bool = False) -> dict:
        payload = asdict(self)
        if not include_timing:
            payload.pop('wall_time')
            for record in payload['epochs']:
                record.pop('seconds')
        return payload


@dataclass
class TrainResult:
    model: SentimentModel
    history: TrainHistory


@dataclass(frozen=True)
class Phase:
    """One optimisation phase: which parameters move and which loss terms apply."""
    name: str
    params: Tuple[Parameter, ...]
    terms: FrozenSet[str]
    regularize: bool


def dev_accuracy(model: SentimentModel, bags: Sequence[Bag]) -> float:
    preds = np.asarray([model.predict(b) for b in bags], dtype=np.int64)
    return float(np.mean(preds == gold_labels(list(bags))))


def pretrain_phases(model: LeTraNets, cfg: TrainConfig) -> List[Phase]:
    """
    Stepwise pretraining stages: the stronger path (with the embedding), then the
    weaker path with the regularizer against the now fixed stronger one, then the
    joint head alone.
    """
    strong, weak = pr_detach_direction(cfg.direction)
    paths = {LONE: model.lone_path(), BAG: model.bag_path()}
    embedding = model.embedding.parameters() if model.train_embeddings else []
    phases = [
        Phase("stage1", tuple(embedding + paths[strong]), frozenset({strong}), False),
        Phase("stage2", tuple(paths[weak]), frozenset({weak}), cfg.prediction_regularization),
    ]
    if cfg.joint_training:
        phases.append(Phase("stage3", tuple(model.joint_path()), frozenset({JOINT}), False))
    return phases


def full_phase(model: SentimentModel, cfg: TrainConfig) -> Phase:
    terms = ALL_TERMS if cfg.joint_training else frozenset({LONE, BAG})
    regularize = isinstance(model, LeTraNets) and cfg.prediction_regularization
    return Phase(FULL_STAGE, (), terms, regularize)


def _needs_pseudo_longs(model: SentimentModel, cfg: TrainConfig, phase: Phase) -> bool:
    return isinstance(model, LeTraNets) and cfg.direction == SHORT_TO_LONG and phase.regularize


def run_epoch(
    model: SentimentModel,
    examples: Sequence[Bag],
    cfg: TrainConfig,
    phase: Phase,
    optimizer: Adadelta,
    epoch: int,
) -> Dict[str, float]:
    """One pass over `examples`; returns example-weighted mean loss components."""
    shuffle_rng = derive_rng(cfg.seed, "shuffle", phase.name, epoch)
    dropout_rng = derive_rng(cfg.seed, "dropout", phase.name, epoch)
    pseudo_rng = derive_rng(cfg.seed, "pseudo_long", phase.name, epoch)
    pl_cfg = cfg.pseudo_long_config()

    sums: Dict[str, float] = {}
    for idx in minibatches(len(examples), cfg.batch_size, shuffle_rng):
        batch = [examples[int(i)] for i in idx]
        pseudo_longs = []
        if _needs_pseudo_longs(model, cfg, phase):
            pool = [b.segments[0] for b in batch]
            pseudo_longs = [make_pseudo_long(pool, pl_cfg, pseudo_rng) for _ in range(cfg.pseudo_longs_per_batch)]

        optimizer.zero_grad()
        loss = batch_loss(model, batch, cfg.direction, cfg.lambda_, phase.terms, phase.regularize,
                          pseudo_longs, train=True, rng=dropout_rng)
        loss.total.backward()
        optimizer.step()
        model.constrain(cfg.max_norm)

        for k, v in loss.components.items():
            sums[k] = sums.get(k, 0.0) + v * len(batch)
    return {k: v / len(examples) for k, v in sums.items()}


def _emit(history: TrainHistory, record: EpochRecord, log, run_id, fold):
    history.epochs.append(record)
    log_epoch_metrics(
        run_id=run_id, fold=fold, lambda_=history.lambda_, model_kind=history.model_kind,
        direction=history.direction, mechanisms=history.mechanisms, stage=record.stage,
        epoch=record.epoch, dev_accuracy=record.dev_accuracy, **record.losses,
    )
    dev = "n/a" if record.dev_accuracy is None else f"{record.dev_accuracy:.4f}"
    log_training_event(
        log, f"{record.stage} epoch {record.epoch}: loss {record.losses.get('total', float('nan')):.4f}, dev acc {dev}",
        level="DEBUG" if record.stage != FULL_STAGE else "INFO",
        action="epoch_complete", stage=record.stage, epoch=record.epoch,
    )


def stepwise_pretrain(
    model: SentimentModel,
    examples: Sequence[Bag],
    cfg: TrainConfig,
    history: Optional[TrainHistory] = None,
    run_id: str = None,
    fold: int = None,
) -> SentimentModel:
    """
    Run the pretraining stages in place and return the model.

    A no-op when stepwise pretraining is switched off, when `pretrain_epochs`
    is 0, or for models without separate paths.
    """
    if not cfg.stepwise_pretraining or cfg.pretrain_epochs == 0 or not isinstance(model, LeTraNets):
        return model
    log = logger.bind(run_id=run_id, fold=fold, model_kind=model.kind, direction=cfg.direction)
    try:
        for phase in pretrain_phases(model, cfg):
            model.set_trainable(phase.params)
            optimizer = Adadelta(model.parameters())
            for epoch in range(cfg.pretrain_epochs):
                start = time.perf_counter()
                losses = run_epoch(model, examples, cfg, phase, optimizer, epoch)
                record = EpochRecord(phase.name, epoch, losses, seconds=time.perf_counter() - start)
                if history is not None:
                    _emit(history, record, log, run_id, fold)
    finally:
        model.reset_trainable()
    return model


def training_dims(model_kind: str, direction: str, dims: ModelDims) -> ModelDims:
    """
    Dimensions actually trained for `model_kind` in `direction`.

    A BaggedCNN trained on short texts only ever sees one-segment bags, so its
    attention never receives a gradient; it pools long targets by the mean instead.
    """
    if model_kind == BaggedCnn.kind and direction == SHORT_TO_LONG and dims.pooling != MEAN_POOLING:
        return replace(dims, pooling=MEAN_POOLING)
    return dims


def train(
    model_kind: str,
    train_corpus: Corpus,
    cfg: TrainConfig,
    vocab: Vocabulary,
    embeddings: np.ndarray,
    dev_corpus: Corpus = None,
    dims: ModelDims = None,
    run_id: str = None,
    fold: int = None,
) -> TrainResult:
    """
    Train a fresh model of `model_kind` on the source-channel corpus.

    Returns the parameters of the epoch with the highest development accuracy
    (earliest on ties); without a development corpus the last epoch is kept.

    Raises:
        ContractViolation: when the corpus channel is not the direction's source
        TrainingDivergedError: when a loss or gradient turns non-finite
    """
    if train_corpus.channel != source_channel(cfg.direction):
        raise ContractViolation(
            f"{cfg.direction} trains on {source_channel(cfg.direction)} texts, got a {train_corpus.channel} corpus"
        )
    if len(train_corpus) == 0:
        raise ContractViolation("cannot train on an empty corpus")

    dims = dims or ModelDims(
        vocab_size=len(vocab), num_classes=train_corpus.num_classes,
        embedding_dim=embeddings.shape[1], dropout=cfg.dropout, pooling=cfg.pooling,
    )
    dims = training_dims(model_kind, cfg.direction, dims)
    options = {'use_joint': cfg.joint_training} if model_kind == LeTraNets.kind else {}
    model = build_model(model_kind, dims, embeddings, seed=derive_seed(cfg.seed, "init", model_kind),
                        train_embeddings=cfg.train_embeddings, **options)

    examples = prepare_bags(train_corpus, vocab, cfg.segmenter)
    dev = prepare_bags(dev_corpus, vocab, cfg.segmenter) if dev_corpus is not None and len(dev_corpus) else []
    history = TrainHistory(model_kind=model_kind, direction=cfg.direction, lambda_=cfg.lambda_,
                           mechanisms=cfg.mechanisms)
    log = logger.bind(run_id=run_id, fold=fold, model_kind=model_kind, direction=cfg.direction)
    log_training_event(log, f"Training {model_kind} on {len(examples)} {train_corpus.channel} texts "
                            f"({len(dev)} dev), lambda={cfg.lambda_}, mechanisms={cfg.mechanisms}",
                       action="train_start", lambda_=cfg.lambda_)

    started = time.perf_counter()
    initial_snapshot = model.snapshot()
    best_snapshot = None
    epoch = -1
    try:
        stepwise_pretrain(model, examples, cfg, history, run_id, fold)

        phase = full_phase(model, cfg)
        optimizer = Adadelta(model.parameters())
        since_best = 0
        for epoch in range(cfg.max_epochs):
            start = time.perf_counter()
            losses = run_epoch(model, examples, cfg, phase, optimizer, epoch)
            acc = dev_accuracy(model, dev) if dev else None
            _emit(history, EpochRecord(FULL_STAGE, epoch, losses, acc, time.perf_counter() - start),
                  log, run_id, fold)

            if acc is None:
                history.selected_epoch = epoch
                best_snapshot = model.snapshot()
                continue
            if history.best_dev_accuracy is None or acc > history.best_dev_accuracy:
                history.best_dev_accuracy = acc
                history.selected_epoch = epoch
                best_snapshot = model.snapshot()
                since_best = 0
            else:
                since_best += 1
                if since_best >= cfg.patience:
                    log_training_event(log, f"Early stopping after epoch {epoch}; best epoch {history.selected_epoch}",
                                       action="early_stop", epoch=epoch)
                    break
    except NonFiniteError as e:
        log_training_event(log, f"Training diverged in epoch {epoch}: {e}", level="ERROR",
                           action="diverged", epoch=epoch, parameter=e.name)
        raise TrainingDivergedError(
            f"{model_kind} training diverged in epoch {epoch}: {e}",
            last_good=best_snapshot or initial_snapshot, epoch=epoch,
        ) from e

    model.restore(best_snapshot)
    history.wall_time = time.perf_counter() - started
    log_performance_event(log, f"Trained {model_kind}: selected epoch {history.selected_epoch}, "
                               f"dev acc {history.best_dev_accuracy}",
                          history.wall_time, action="train_complete")
    return TrainResult(model=model, history=history)
