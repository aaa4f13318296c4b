"""
Differentiable operations over `Tensor`.

Each op computes its forward value with numpy and attaches a closure that
maps the upstream gradient to its inputs. Only the operations the sentence
encoders, attention pooling and the training losses need are provided.
"""

from typing import Sequence

import numpy as np

from clt.config import LOG_FLOOR, PAD_ID
from clt.errors import ContractViolation, NonFiniteError
from clt.numcore.tensor import Parameter, Tensor


def _result(data: np.ndarray, parents: Sequence[Tensor], backward_fn, op: str) -> Tensor:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{op} produced non-finite values", name=op)
    needs_grad = any(p.requires_grad for p in parents)
    if not needs_grad:
        return Tensor(data, dtype=data.dtype)
    return Tensor(data, requires_grad=True, parents=parents, backward_fn=backward_fn, dtype=data.dtype)


def _require_finite(t: Tensor, op: str) -> None:
    if not np.all(np.isfinite(t.data)):
        raise NonFiniteError(f"{op} received non-finite input", name=op)


# -----------------------------------------------------------------------------
# Elementwise and structural
# -----------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ContractViolation(f"add: shape mismatch {a.shape} vs {b.shape}")

    def backward(g):
        a.accumulate_grad(g)
        b.accumulate_grad(g)

    return _result(a.data + b.data, (a, b), backward, 'add')


def scale(x: Tensor, factor: float) -> Tensor:
    factor = float(factor)

    def backward(g):
        x.accumulate_grad(g * factor)

    return _result(x.data * factor, (x,), backward, 'scale')


def total(terms: Sequence[Tensor]) -> Tensor:
    """Sum of same-shaped tensors (usually scalar loss terms)."""
    if not terms:
        raise ContractViolation("total: no terms")
    shape = terms[0].shape
    for t in terms:
        if t.shape != shape:
            raise ContractViolation(f"total: shape mismatch {t.shape} vs {shape}")

    def backward(g):
        for t in terms:
            t.accumulate_grad(g)

    data = np.sum([t.data for t in terms], axis=0)
    return _result(np.asarray(data, dtype=terms[0].data.dtype), tuple(terms), backward, 'total')


def mean(terms: Sequence[Tensor]) -> Tensor:
    return scale(total(terms), 1.0 / len(terms))


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)

    def backward(g):
        x.accumulate_grad(g * (1.0 - out * out))

    return _result(out, (x,), backward, 'tanh')


def concat(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate 1-D tensors in the given order."""
    for p in parts:
        if p.data.ndim != 1:
            raise ContractViolation(f"concat: expected 1-D parts, got shape {p.shape}")
    sizes = [p.size for p in parts]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        for p, lo, hi in zip(parts, bounds[:-1], bounds[1:]):
            p.accumulate_grad(g[lo:hi])

    return _result(np.concatenate([p.data for p in parts]), tuple(parts), backward, 'concat')


def stack(rows: Sequence[Tensor]) -> Tensor:
    """Stack equally sized 1-D tensors into an [n x D] matrix."""
    if not rows:
        raise ContractViolation("stack: no rows")

    def backward(g):
        for i, r in enumerate(rows):
            r.accumulate_grad(g[i])

    return _result(np.stack([r.data for r in rows]), tuple(rows), backward, 'stack')


# -----------------------------------------------------------------------------
# Linear algebra
# -----------------------------------------------------------------------------

def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """x @ W.T + b for x of shape [D] or [n x D], W of shape [C x D]."""
    if weight.data.ndim != 2 or x.shape[-1] != weight.shape[1] or bias.shape != (weight.shape[0],):
        raise ContractViolation(
            f"linear: incompatible shapes x={x.shape} W={weight.shape} b={bias.shape}"
        )
    out = x.data @ weight.data.T + bias.data

    def backward(g):
        if x.data.ndim == 1:
            weight.accumulate_grad(np.outer(g, x.data))
            bias.accumulate_grad(g)
        else:
            weight.accumulate_grad(g.T @ x.data)
            bias.accumulate_grad(g.sum(axis=0))
        x.accumulate_grad(g @ weight.data)

    return _result(out, (x, weight, bias), backward, 'linear')


def matvec(m: Tensor, v: Tensor) -> Tensor:
    """[n x A] @ [A] -> [n]."""
    if m.data.ndim != 2 or v.data.ndim != 1 or m.shape[1] != v.shape[0]:
        raise ContractViolation(f"matvec: incompatible shapes {m.shape} and {v.shape}")

    def backward(g):
        m.accumulate_grad(np.outer(g, v.data))
        v.accumulate_grad(g @ m.data)

    return _result(m.data @ v.data, (m, v), backward, 'matvec')


def weighted_sum(weights: Tensor, rows: Tensor) -> Tensor:
    """sum_i weights[i] * rows[i] for weights [n] and rows [n x D]."""
    if weights.data.ndim != 1 or rows.data.ndim != 2 or weights.shape[0] != rows.shape[0]:
        raise ContractViolation(f"weighted_sum: incompatible shapes {weights.shape} and {rows.shape}")

    def backward(g):
        weights.accumulate_grad(rows.data @ g)
        rows.accumulate_grad(np.outer(weights.data, g))

    return _result(weights.data @ rows.data, (weights, rows), backward, 'weighted_sum')


# -----------------------------------------------------------------------------
# Embeddings and convolution
# -----------------------------------------------------------------------------

def embedding_lookup(table: Parameter, ids: np.ndarray, frozen_ids: Sequence[int] = (PAD_ID,)) -> Tensor:
    """Rows of `table` for `ids`; rows listed in `frozen_ids` never receive gradient."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise ContractViolation(f"embedding_lookup: expected non-empty 1-D ids, got shape {ids.shape}")
    if ids.min() < 0 or ids.max() >= table.shape[0]:
        raise ContractViolation(f"embedding_lookup: id out of range for table of {table.shape[0]} rows")

    live = ~np.isin(ids, np.asarray(frozen_ids, dtype=np.int64))

    def backward(g):
        if table.grad is None:
            table.grad = np.zeros_like(table.data)
        np.add.at(table.grad, ids[live], g[live])

    return _result(table.data[ids], (table,), backward, 'embedding_lookup')


def conv1d_maxpool(
    embeddings: Tensor,
    filters: Sequence[Tensor],
    biases: Sequence[Tensor],
    length: int = None,
) -> Tensor:
    """
    Narrow 1-D convolution, ReLU, then max over time, for every filter width.

    Args:
        embeddings: [T x E] token embeddings
        filters: one [maps x width x E] tensor per filter width
        biases: one [maps] tensor per filter width
        length: number of real (non-padding) rows at the top of `embeddings`;
            defaults to T

    Returns:
        [sum of maps] features, concatenated in filter order then map order.
        Inputs shorter than the widest filter are right-padded with zero rows;
        windows that start inside the padding are excluded from the max.
        Max ties resolve to the lowest window index.
    """
    x = embeddings.data
    if x.ndim != 2 or x.shape[0] < 1:
        raise ContractViolation(f"conv1d_maxpool: expected [T x E] with T >= 1, got {x.shape}")
    if len(filters) != len(biases) or not filters:
        raise ContractViolation("conv1d_maxpool: need one bias per filter bank")
    T, E = x.shape
    length = T if length is None else int(length)
    if not 1 <= length <= T:
        raise ContractViolation(f"conv1d_maxpool: length {length} outside 1..{T}")

    widths = []
    for w, b in zip(filters, biases):
        if w.data.ndim != 3 or w.shape[2] != E:
            raise ContractViolation(
                f"conv1d_maxpool: filter shape {w.shape} does not match embedding dim {E}"
            )
        if b.shape != (w.shape[0],):
            raise ContractViolation(f"conv1d_maxpool: bias shape {b.shape} for filter {w.shape}")
        widths.append(w.shape[1])

    padded_len = max(T, max(widths))
    xp = np.zeros((padded_len, E), dtype=x.dtype)
    xp[:T] = x

    outputs, cache = [], []
    for w, b, h in zip(filters, biases, widths):
        maps = w.shape[0]
        n_valid = min(padded_len - h + 1, length)
        windows = np.lib.stride_tricks.sliding_window_view(xp, (h, E))[:n_valid, 0].reshape(n_valid, h * E)
        flat_w = w.data.reshape(maps, h * E)
        scores = windows @ flat_w.T + b.data
        activated = np.maximum(scores, 0.0)
        winners = activated.argmax(axis=0)
        cols = np.arange(maps)
        outputs.append(activated[winners, cols])
        cache.append((windows, flat_w, scores[winners, cols] > 0.0, winners))

    out = np.concatenate(outputs)

    def backward(g):
        grad_xp = np.zeros_like(xp)
        offset = 0
        for (w, b, h), (windows, flat_w, gate, winners) in zip(zip(filters, biases, widths), cache):
            maps = w.shape[0]
            d = g[offset:offset + maps] * gate
            offset += maps
            w.accumulate_grad((d[:, None] * windows[winners]).reshape(w.shape))
            b.accumulate_grad(d)
            if embeddings.requires_grad:
                rows = winners[:, None] + np.arange(h)[None, :]
                np.add.at(grad_xp, rows, (d[:, None] * flat_w).reshape(maps, h, E))
        embeddings.accumulate_grad(grad_xp[:T])

    return _result(out, (embeddings, *filters, *biases), backward, 'conv1d_maxpool')


# -----------------------------------------------------------------------------
# Probabilities and losses
# -----------------------------------------------------------------------------

def softmax(logits: Tensor) -> Tensor:
    """Max-subtracted softmax over a 1-D tensor."""
    if logits.data.ndim != 1 or logits.size < 1:
        raise ContractViolation(f"softmax: expected non-empty 1-D logits, got {logits.shape}")
    _require_finite(logits, 'softmax')
    shifted = logits.data - logits.data.max()
    exps = np.exp(shifted)
    probs = exps / exps.sum()

    def backward(g):
        logits.accumulate_grad(probs * (g - np.dot(g, probs)))

    return _result(probs, (logits,), backward, 'softmax')


def cross_entropy(pred: Tensor, gold: int) -> Tensor:
    """-log(pred[gold] + floor)."""
    if pred.data.ndim != 1:
        raise ContractViolation(f"cross_entropy: expected a 1-D distribution, got {pred.shape}")
    gold = int(gold)
    if not 0 <= gold < pred.size:
        raise ContractViolation(f"cross_entropy: gold class {gold} outside 0..{pred.size - 1}")
    p = pred.data[gold] + LOG_FLOOR

    def backward(g):
        grad = np.zeros_like(pred.data)
        grad[gold] = -g / p
        pred.accumulate_grad(grad)

    return _result(np.asarray(-np.log(p), dtype=pred.data.dtype), (pred,), backward, 'cross_entropy')


def kl_divergence(p: Tensor, q: Tensor) -> Tensor:
    """
    KL(p || q) = sum_c p_c ln(p_c / q_c), with 0 ln 0 = 0 and q clamped at the log floor.

    Gradient flows into whichever side requires it; pass `p.detach()` to make p a
    fixed reference.
    """
    if p.shape != q.shape or p.data.ndim != 1:
        raise ContractViolation(f"kl_divergence: shape mismatch {p.shape} vs {q.shape}")
    support = p.data > 0.0
    q_safe = np.maximum(q.data, LOG_FLOOR)
    p_safe = np.where(support, p.data, 1.0)
    terms = np.where(support, p.data * (np.log(p_safe) - np.log(q_safe)), 0.0)
    # Rounding can push an exact match a hair below zero
    value = max(float(terms.sum()), 0.0)

    def backward(g):
        if q.requires_grad:
            grad_q = np.where(q.data > LOG_FLOOR, -p.data / q_safe, 0.0)
            q.accumulate_grad(g * grad_q)
        if p.requires_grad:
            grad_p = np.where(support, np.log(p_safe) - np.log(q_safe) + 1.0, 0.0)
            p.accumulate_grad(g * grad_p)

    return _result(np.asarray(value, dtype=q.data.dtype), (p, q), backward, 'kl_divergence')


def dropout(x: Tensor, rate: float, train: bool, rng: np.random.Generator = None) -> Tensor:
    """Inverted dropout: survivors scaled by 1/(1-rate) in train mode; identity in eval mode."""
    if not 0.0 <= rate < 1.0:
        raise ContractViolation(f"dropout: rate {rate} outside [0, 1)")
    if not train or rate == 0.0:
        return x
    if rng is None:
        raise ContractViolation("dropout: train mode needs an explicit rng")
    mask = (rng.random(x.shape) >= rate).astype(x.data.dtype) / (1.0 - rate)

    def backward(g):
        x.accumulate_grad(g * mask)

    return _result(x.data * mask, (x,), backward, 'dropout')


def argmax(probs: np.ndarray) -> int:
    """Index of the largest entry; ties go to the lowest index."""
    return int(np.argmax(probs))
