"""
In-channel / out-channel transfer protocol.

For every fold the out-channel model trains on the source channel's training
split (early stopping on the source development split) and predicts the
target channel's test split. The in-channel baseline is a CNN trained on the
target channel's own training split and scored on the same test split.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from clt.config import LAMBDA_TUNING_FOLDS, NUM_LENGTH_BUCKETS
from clt.config.seeding import derive_seed
from clt.datasets import LONG, SHORT, Corpus, FoldPlan, kfold_split
from clt.errors import ContractViolation
from clt.evaluation.metrics import accuracy, error_rate, rmse, transfer_loss, transfer_ratio
from clt.evaluation.report import FoldResult, MetricsReport, decile_edges, length_buckets
from clt.models import CnnClassifier, LeTraNets, ModelDims, SentimentModel
from clt.textproc import Bag, Vocabulary
from clt.training import (
    LONG_TO_SHORT,
    SHORT_TO_LONG,
    TrainConfig,
    gold_labels,
    prepare_bags,
    train,
    tune_lambda,
)
from clt.utils.logging.component_loggers import get_evaluation_logger, log_training_event

logger = get_evaluation_logger(__name__)

BASELINE_KIND = CnnClassifier.kind


@dataclass
class FoldPredictions:
    fold: int
    lambda_: float
    predictions: np.ndarray
    golds: np.ndarray
    lengths: np.ndarray
    baseline_predictions: np.ndarray
    selected_epoch: int = -1


def predict_all(model: SentimentModel, bags: Sequence[Bag]) -> np.ndarray:
    return np.asarray([model.predict(b) for b in bags], dtype=np.int64)


def per_length_report(model: SentimentModel, bags: Sequence[Bag], edges: Sequence[int] = None,
                      num_buckets: int = NUM_LENGTH_BUCKETS):
    """Accuracy of `model` per token-length bucket of `bags` (deciles by default)."""
    lengths = [b.length for b in bags]
    edges = edges if edges is not None else decile_edges(lengths, num_buckets)
    return length_buckets(predict_all(model, bags), gold_labels(list(bags)), lengths, edges)


def _opposite(direction: str) -> str:
    return SHORT_TO_LONG if direction == LONG_TO_SHORT else LONG_TO_SHORT


def _fine_grained_rmse(preds: np.ndarray, golds: np.ndarray, num_classes: int) -> Optional[float]:
    if num_classes != 5:
        return None
    # Scores on the 1..5 scale
    return rmse(preds + 1, golds + 1, num_classes)


def run_transfer_protocol(
    model_kind: str,
    short: Corpus,
    long: Corpus,
    cfg: TrainConfig,
    vocab: Vocabulary,
    embeddings: np.ndarray,
    plan: FoldPlan = FoldPlan(),
    lambda_grid: Sequence[float] = None,
    tuning_folds: int = LAMBDA_TUNING_FOLDS,
    dims: ModelDims = None,
    bucket_edges: Sequence[int] = None,
    workers: int = 1,
    baseline_cache: Dict[int, np.ndarray] = None,
    run_id: str = None,
) -> MetricsReport:
    """
    Cross-validated transfer evaluation of `model_kind` in `cfg.direction`.

    Args:
        lambda_grid: tuned on the first `tuning_folds` source folds when given
            with more than one value and the model is regularized; otherwise
            `cfg.lambda_` is used
        baseline_cache: fold -> in-channel predictions, filled on first use so
            repeated runs (ablation rows) share one baseline
        workers: folds trained concurrently

    Returns:
        MetricsReport with one entry per fold and fold means
    """
    if short.channel != SHORT or long.channel != LONG:
        raise ContractViolation("run_transfer_protocol needs a short corpus and a long corpus")
    if short.num_classes != long.num_classes:
        raise ContractViolation(f"corpora disagree on C: {short.num_classes} vs {long.num_classes}")
    source, target = (long, short) if cfg.direction == LONG_TO_SHORT else (short, long)
    num_classes = source.num_classes
    source_splits = kfold_split(source, plan)
    target_splits = kfold_split(target, plan)
    baseline_cache = {} if baseline_cache is None else baseline_cache

    lam, lambda_scores = cfg.lambda_, {}
    regularized = model_kind == LeTraNets.kind and cfg.prediction_regularization
    if regularized and lambda_grid is not None and len(set(lambda_grid)) > 1:
        search = tune_lambda(model_kind, lambda_grid, source, source_splits[:max(1, tuning_folds)],
                             cfg, vocab, embeddings, dims=dims, run_id=run_id)
        lam, lambda_scores = search.best, {repr(k): v for k, v in search.scores.items()}

    log = logger.bind(run_id=run_id, model_kind=model_kind, direction=cfg.direction)
    log_training_event(log, f"Transfer protocol: {model_kind} {cfg.direction}, {plan.k} folds, lambda={lam}",
                       action="protocol_start", lambda_=lam)

    def run_fold(f: int) -> FoldPredictions:
        src, tgt = source_splits[f], target_splits[f]
        fold_cfg = cfg.model_copy(update={'seed': derive_seed(cfg.seed, "fold", f), 'lambda_': lam})
        oc = train(model_kind, source.subset(src.train), fold_cfg, vocab, embeddings,
                   dev_corpus=source.subset(src.dev), dims=dims, run_id=run_id, fold=f)
        test_bags = prepare_bags(target.subset(tgt.test), vocab, cfg.segmenter)

        if f not in baseline_cache:
            ic_cfg = fold_cfg.model_copy(update={'direction': _opposite(cfg.direction)})
            ic = train(BASELINE_KIND, target.subset(tgt.train), ic_cfg, vocab, embeddings,
                       dev_corpus=target.subset(tgt.dev), dims=dims, run_id=run_id, fold=f)
            baseline_cache[f] = predict_all(ic.model, test_bags)

        return FoldPredictions(
            fold=f, lambda_=lam,
            predictions=predict_all(oc.model, test_bags),
            golds=gold_labels(test_bags),
            lengths=np.asarray([b.length for b in test_bags], dtype=np.int64),
            baseline_predictions=baseline_cache[f],
            selected_epoch=oc.history.selected_epoch,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fold_preds = list(pool.map(run_fold, range(plan.k)))
    else:
        fold_preds = [run_fold(f) for f in range(plan.k)]
    return assemble_report(model_kind, cfg, num_classes, lam, fold_preds, bucket_edges, lambda_scores)


def assemble_report(
    model_kind: str,
    cfg: TrainConfig,
    num_classes: int,
    lam: float,
    fold_preds: List[FoldPredictions],
    bucket_edges: Sequence[int] = None,
    lambda_scores: Dict[str, float] = None,
) -> MetricsReport:
    folds = []
    for fp in sorted(fold_preds, key=lambda p: p.fold):
        e_oc = error_rate(fp.predictions, fp.golds)
        e_ic = error_rate(fp.baseline_predictions, fp.golds)
        folds.append(FoldResult(
            fold=fp.fold, lambda_=fp.lambda_,
            accuracy=accuracy(fp.predictions, fp.golds), error=e_oc,
            rmse=_fine_grained_rmse(fp.predictions, fp.golds, num_classes),
            in_channel_accuracy=accuracy(fp.baseline_predictions, fp.golds), in_channel_error=e_ic,
            transfer_loss=transfer_loss(e_oc, e_ic),
            selected_epoch=fp.selected_epoch,
        ))

    mean_error = float(np.mean([f.error for f in folds]))
    mean_ic_error = float(np.mean([f.in_channel_error for f in folds]))
    try:
        ratio = transfer_ratio([mean_error], [mean_ic_error])
    except ContractViolation:
        logger.warning("In-channel error is zero; transfer ratio undefined", extra={'action': 'ratio_undefined'})
        ratio = None

    preds = np.concatenate([fp.predictions for fp in fold_preds])
    golds = np.concatenate([fp.golds for fp in fold_preds])
    lengths = np.concatenate([fp.lengths for fp in fold_preds])

    report = MetricsReport(
        model_kind=model_kind,
        direction=cfg.direction,
        mechanisms=cfg.mechanisms if model_kind == LeTraNets.kind else "-",
        num_classes=num_classes,
        lambda_=lam,
        seed=cfg.seed,
        accuracy=float(np.mean([f.accuracy for f in folds])),
        error=mean_error,
        rmse=float(np.mean([f.rmse for f in folds])) if num_classes == 5 else None,
        in_channel_accuracy=float(np.mean([f.in_channel_accuracy for f in folds])),
        in_channel_error=mean_ic_error,
        transfer_loss=float(np.mean([f.transfer_loss for f in folds])),
        transfer_ratio=ratio,
        folds=folds,
        length_buckets=length_buckets(preds, golds, lengths, bucket_edges),
        lambda_scores=lambda_scores or {},
    )
    logger.info(
        f"{model_kind} {cfg.direction}: accuracy {report.accuracy:.4f}, in-channel {report.in_channel_accuracy:.4f}, "
        f"TL {report.transfer_loss:.2f}",
        extra={'action': 'protocol_complete', 'model_kind': model_kind, 'direction': cfg.direction},
    )
    return report
