from dataclasses import dataclass
from typing import List

import numpy as np

from clt.config import GRADCHECK_PROBES, GRADCHECK_STEP, GRADCHECK_TOLERANCE
from clt.datasets import gradcheck_fixture, random_embeddings
from clt.errors import ContractViolation
from clt.models import MODEL_KINDS, LeTraNets, ModelDims, build_model
from clt.numcore import GradCheckResult, default_dtype, grad_check
from clt.textproc import PseudoLongConfig, make_pseudo_long
from clt.training.config import DIRECTIONS, LONG_TO_SHORT
from clt.training.data import prepare_bags
from clt.training.losses import batch_loss
from clt.training.trainer import training_dims
from clt.utils.logging.component_loggers import get_training_logger, log_training_event

logger = get_training_logger(__name__)

FIXTURE_DIMS = dict(embedding_dim=6, widths=(2, 3), maps=3, attention_dim=4)


@dataclass
class LossCheck:
    model_kind: str
    direction: str
    result: GradCheckResult

    @property
    def label(self) -> str:
        return f"{self.model_kind}/{self.direction}"


def check_loss_gradients(
    model_kind: str,
    direction: str,
    lambda_: float = 0.1,
    dropout: float = 0.0,
    probe_count: int = GRADCHECK_PROBES,
    h: float = GRADCHECK_STEP,
    seed: int = 0,
) -> LossCheck:
    """
    Finite-difference check of one model's training objective on the bundled fixture.

    Raises:
        ContractViolation: when dropout is enabled (the loss would not be deterministic)
    """
    if dropout > 0.0:
        raise ContractViolation("gradient checks need dropout disabled; the loss must be deterministic")
    short, long, vocab = gradcheck_fixture()
    source = long if direction == LONG_TO_SHORT else short
    bags = prepare_bags(source, vocab)

    with default_dtype("float64"):
        dims = ModelDims(vocab_size=len(vocab), num_classes=2, dropout=0.0, **FIXTURE_DIMS)
        dims = training_dims(model_kind, direction, dims)
        embeddings = random_embeddings(len(vocab), dims.embedding_dim, seed=seed, init_range=0.5)
        model = build_model(model_kind, dims, embeddings, seed=seed)
        pseudo_longs = []
        if isinstance(model, LeTraNets) and direction != LONG_TO_SHORT:
            pool = [b.segments[0] for b in bags]
            pseudo_longs = [make_pseudo_long(pool, PseudoLongConfig(k_min=3, k_max=4, seed=seed))]

        def loss_fn():
            return batch_loss(model, bags, direction, lambda_, pseudo_longs=pseudo_longs, train=False).total

        result = grad_check(loss_fn, model.parameters(), probe_count=probe_count, h=h,
                            rng=np.random.default_rng(seed))
    return LossCheck(model_kind=model_kind, direction=direction, result=result)


def check_all_losses(
    lambda_: float = 0.1,
    dropout: float = 0.0,
    probe_count: int = GRADCHECK_PROBES,
    tolerance: float = GRADCHECK_TOLERANCE,
) -> List[LossCheck]:
    """Every model kind in both directions."""
    checks = []
    for kind in MODEL_KINDS:
        for direction in DIRECTIONS:
            check = check_loss_gradients(kind, direction, lambda_, dropout, probe_count)
            status = "ok" if check.result.max_relative_error < tolerance else "FAILED"
            log_training_event(
                logger, f"gradcheck {check.label}: max relative error {check.result.max_relative_error:.3e} ({status})",
                level="INFO" if status == "ok" else "WARNING",
                action="gradcheck", model_kind=kind, direction=direction,
            )
            checks.append(check)
    return checks
