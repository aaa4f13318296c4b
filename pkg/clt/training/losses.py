"""
Training objectives.

LeTraNets:
    long -> short   L_d = CE(y^l_d) + CE(y^b_d) + CE(y^j_d) + lambda * sum_i KL(y^b_si || y^l_si)
    short -> long   L_s = mean_i [CE(y^l_si) + CE(y^b_si) + CE(y^j_si)] + lambda * KL(y^l_d || y^b_d)

The reference side of every KL term is detached. `terms` selects which
cross-entropy terms are present, which is how stepwise pretraining and the
JT switch carve the objective up.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from clt.errors import ContractViolation
from clt.models import BaggedCnn, CnnClassifier, LeTraNets, SentimentModel
from clt.numcore import Tensor, cross_entropy, kl_divergence, mean, scale, total
from clt.textproc import Bag
from clt.training.config import DIRECTIONS, LONG_TO_SHORT

LONE = "lone"
BAG = "bag"
JOINT = "joint"
ALL_TERMS: FrozenSet[str] = frozenset((LONE, BAG, JOINT))


@dataclass
class LossBreakdown:
    """Scalar loss tensor plus its components as floats for logging."""
    total: Tensor
    components: Dict[str, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.total.item()


def pr_detach_direction(direction: str) -> Tuple[str, str]:
    """(reference, regularized) classifier for prediction regularization."""
    if direction not in DIRECTIONS:
        raise ContractViolation(f"Unknown direction {direction!r}")
    if direction == LONG_TO_SHORT:
        return BAG, LONE
    return LONE, BAG


def _require_label(bag: Bag) -> int:
    if bag.label is None:
        raise ContractViolation("loss needs a gold document label")
    return bag.label


def _combine(parts: Dict[str, Tensor], reg: Optional[Tensor], lambda_: float) -> LossBreakdown:
    terms = list(parts.values())
    components = {name: t.item() for name, t in parts.items()}
    if reg is not None:
        components['reg'] = reg.item()
        if lambda_ > 0.0:
            terms.append(scale(reg, lambda_))
    if not terms:
        raise ContractViolation("loss has no terms")
    out = total(terms)
    components['total'] = out.item()
    return LossBreakdown(total=out, components=components)


def loss_long(
    bag: Bag,
    model: LeTraNets,
    lambda_: float,
    terms: FrozenSet[str] = ALL_TERMS,
    regularize: bool = True,
    train: bool = False,
    rng: np.random.Generator = None,
) -> LossBreakdown:
    """LeTraNets document objective on a labelled long text."""
    gold = _require_label(bag)
    out = model.forward(bag, train=train, rng=rng)
    heads = {LONE: out.doc_lone, BAG: out.doc_bag, JOINT: out.doc_joint}
    parts = {name: cross_entropy(heads[name], gold) for name in (LONE, BAG, JOINT) if name in terms}
    reg = None
    if regularize:
        reg = total([kl_divergence(ref.detach(), weak) for ref, weak in zip(out.seg_bag, out.seg_lone)])
    return _combine(parts, reg, lambda_)


def loss_short(
    batch: Sequence[Bag],
    pseudo_long: Optional[Bag],
    model: LeTraNets,
    lambda_: float,
    terms: FrozenSet[str] = ALL_TERMS,
    regularize: bool = True,
    train: bool = False,
    rng: np.random.Generator = None,
) -> LossBreakdown:
    """LeTraNets objective on a batch of labelled short texts plus a pseudo-long built from them."""
    if not batch:
        raise ContractViolation("loss_short needs a non-empty batch")
    per_term: Dict[str, List[Tensor]] = {name: [] for name in (LONE, BAG, JOINT) if name in terms}
    for item in batch:
        gold = _require_label(item)
        out = model.forward(item, train=train, rng=rng)
        heads = {LONE: out.seg_lone[0], BAG: out.seg_bag[0], JOINT: out.seg_joint[0]}
        for name in per_term:
            per_term[name].append(cross_entropy(heads[name], gold))
    parts = {name: mean(values) for name, values in per_term.items()}

    reg = None
    if regularize:
        if pseudo_long is None:
            raise ContractViolation("regularized short loss needs a pseudo-long text")
        pl = model.forward(pseudo_long, train=train, rng=rng)
        reg = kl_divergence(pl.doc_lone.detach(), pl.doc_bag)
    return _combine(parts, reg, lambda_)


def cnn_loss(bag: Bag, model: CnnClassifier, train: bool = False, rng: np.random.Generator = None) -> LossBreakdown:
    """Cross-entropy of the CNN on the text at its native length."""
    gold = _require_label(bag)
    ce = cross_entropy(model.forward(bag.document_ids(), train=train, rng=rng), gold)
    return LossBreakdown(total=ce, components={'cnn': ce.item(), 'total': ce.item()})


def baggedcnn_loss(bag: Bag, model: BaggedCnn, direction: str, train: bool = False,
                   rng: np.random.Generator = None) -> LossBreakdown:
    """
    Document cross-entropy for long sources. A short source is a one-segment bag
    scored through the shared head; such a model is built with mean pooling since
    its attention would never see more than one segment.
    """
    gold = _require_label(bag)
    out = model.forward(bag, train=train, rng=rng)
    pred = out.document if direction == LONG_TO_SHORT else out.segments[0]
    ce = cross_entropy(pred, gold)
    return LossBreakdown(total=ce, components={'bag': ce.item(), 'total': ce.item()})


def mean_breakdown(items: Sequence[LossBreakdown]) -> LossBreakdown:
    """Batch loss: mean of per-example losses, components averaged alike."""
    if not items:
        raise ContractViolation("cannot average an empty batch")
    components: Dict[str, float] = {}
    for item in items:
        for k, v in item.components.items():
            components[k] = components.get(k, 0.0) + v / len(items)
    return LossBreakdown(total=mean([item.total for item in items]), components=components)


def batch_loss(
    model: SentimentModel,
    batch: Sequence[Bag],
    direction: str,
    lambda_: float,
    terms: FrozenSet[str] = ALL_TERMS,
    regularize: bool = True,
    pseudo_longs: Sequence[Bag] = (),
    train: bool = False,
    rng: np.random.Generator = None,
) -> LossBreakdown:
    """Objective of any model kind on one minibatch of source-channel examples."""
    if not batch:
        raise ContractViolation("batch_loss needs a non-empty batch")
    if isinstance(model, CnnClassifier):
        return mean_breakdown([cnn_loss(b, model, train, rng) for b in batch])
    if isinstance(model, BaggedCnn):
        return mean_breakdown([baggedcnn_loss(b, model, direction, train, rng) for b in batch])
    if not isinstance(model, LeTraNets):
        raise ContractViolation(f"no objective for model kind {model.kind!r}")

    if direction == LONG_TO_SHORT:
        return mean_breakdown([loss_long(b, model, lambda_, terms, regularize, train, rng) for b in batch])

    if not regularize or not pseudo_longs:
        return loss_short(batch, None, model, lambda_, terms, regularize=False, train=train, rng=rng)
    if len(pseudo_longs) == 1:
        return loss_short(batch, pseudo_longs[0], model, lambda_, terms, True, train, rng)
    # Several pseudo-longs: supervised part once, regularizer averaged over them
    supervised = loss_short(batch, None, model, lambda_, terms, regularize=False, train=train, rng=rng)
    regs = []
    for pl in pseudo_longs:
        out = model.forward(pl, train=train, rng=rng)
        regs.append(kl_divergence(out.doc_lone.detach(), out.doc_bag))
    reg = mean(regs)
    parts = [supervised.total] + ([scale(reg, lambda_)] if lambda_ > 0.0 else [])
    combined = total(parts)
    components = dict(supervised.components, reg=reg.item(), total=combined.item())
    return LossBreakdown(total=combined, components=components)
