from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from clt.config import LAMBDA_GRID
from clt.datasets import Corpus, FoldSplit
from clt.errors import ContractViolation
from clt.models import ModelDims
from clt.textproc import Vocabulary
from clt.training.config import TrainConfig
from clt.training.trainer import train
from clt.utils.logging.component_loggers import get_training_logger, log_training_event

logger = get_training_logger(__name__)


@dataclass
class LambdaSearch:
    best: float
    scores: Dict[float, float] = field(default_factory=dict)


def select_lambda(scores: Dict[float, float]) -> float:
    """Highest mean dev accuracy; ties go to the smaller lambda."""
    if not scores:
        raise ContractViolation("lambda grid must not be empty")
    best = None
    for lam in sorted(scores):
        if best is None or scores[lam] > scores[best]:
            best = lam
    return best


def tune_lambda(
    model_kind: str,
    grid: Sequence[float],
    source: Corpus,
    folds: Sequence[FoldSplit],
    cfg: TrainConfig,
    vocab: Vocabulary,
    embeddings: np.ndarray,
    dims: ModelDims = None,
    run_id: str = None,
) -> LambdaSearch:
    """
    Pick lambda by mean development accuracy over `folds`.

    Each grid point trains on a fold's training split and is scored on that
    fold's development split; test splits are never touched.
    """
    grid = sorted(set(float(v) for v in (grid if grid is not None else LAMBDA_GRID)))
    if not grid:
        raise ContractViolation("lambda grid must not be empty")
    if len(grid) == 1:
        return LambdaSearch(best=grid[0], scores={})

    scores = {}
    for lam in grid:
        accs = []
        for split in folds:
            result = train(model_kind, source.subset(split.train), cfg.model_copy(update={'lambda_': lam}),
                           vocab, embeddings, dev_corpus=source.subset(split.dev), dims=dims,
                           run_id=run_id, fold=split.fold)
            accs.append(result.history.best_dev_accuracy or 0.0)
        scores[lam] = float(np.mean(accs))
        log_training_event(logger, f"lambda={lam}: mean dev accuracy {scores[lam]:.4f}",
                           action="lambda_scored", run_id=run_id, lambda_=lam)

    best = select_lambda(scores)
    log_training_event(logger, f"Selected lambda={best}", action="lambda_selected", run_id=run_id, lambda_=best)
    return LambdaSearch(best=best, scores=scores)
