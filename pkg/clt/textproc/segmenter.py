"""
Document segmentation (pseudo-short texts) and pseudo-long construction.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from clt.config import (
    CHUNK_SIZE,
    MAX_SEGMENTS,
    PSEUDO_LONG_K_MAX,
    PSEUDO_LONG_K_MIN,
    SENTENCE_END_TOKENS,
)
from clt.errors import ContractViolation
from clt.textproc.instances import Bag, Instance

SENTENCE_MODE = "sentence"
CHUNK_MODE = "chunk"


@dataclass(frozen=True)
class Segmenter:
    mode: str = SENTENCE_MODE
    chunk_size: int = CHUNK_SIZE
    max_segments: int = MAX_SEGMENTS

    def __post_init__(self):
        if self.mode not in (SENTENCE_MODE, CHUNK_MODE):
            raise ContractViolation(f"Unknown segmentation mode: {self.mode}")
        if self.chunk_size < 1 or self.max_segments < 1:
            raise ContractViolation("chunk_size and max_segments must be positive")


@dataclass(frozen=True)
class PseudoLongConfig:
    k_min: int = PSEUDO_LONG_K_MIN
    k_max: int = PSEUDO_LONG_K_MAX
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k_min <= self.k_max:
            raise ContractViolation(f"Need 1 <= k_min <= k_max, got {self.k_min}..{self.k_max}")


def _chunks(tokens: Sequence[str], size: int) -> List[List[str]]:
    return [list(tokens[i:i + size]) for i in range(0, len(tokens), size)]


def segment(tokens: Sequence[str], seg: Segmenter = Segmenter()) -> List[List[str]]:
    """
    Split a token sequence into segments.

    Sentence mode splits after sentence-final punctuation and re-splits any piece
    longer than twice the chunk size; text without punctuation falls back to fixed
    chunks. Segments beyond `max_segments` are merged into the last one, so
    flattening the result always reproduces the input.
    """
    if not tokens:
        raise ContractViolation("Cannot segment an empty token list")

    if seg.mode == CHUNK_MODE or not any(t in SENTENCE_END_TOKENS for t in tokens):
        pieces = _chunks(tokens, seg.chunk_size)
    else:
        pieces, current = [], []
        for tok in tokens:
            current.append(tok)
            if tok in SENTENCE_END_TOKENS:
                pieces.append(current)
                current = []
        if current:
            pieces.append(current)
        resplit = []
        for piece in pieces:
            if len(piece) > 2 * seg.chunk_size:
                resplit.extend(_chunks(piece, seg.chunk_size))
            else:
                resplit.append(piece)
        pieces = resplit

    if len(pieces) > seg.max_segments:
        head = pieces[:seg.max_segments - 1]
        tail = [tok for piece in pieces[seg.max_segments - 1:] for tok in piece]
        pieces = head + [tail]
    return pieces


def segment_instance(instance: Instance, seg: Segmenter = Segmenter()) -> Bag:
    """Turn a long text into a bag of unlabeled pseudo-short segments carrying the document label."""
    segments = tuple(Instance(tokens=tuple(piece)) for piece in segment(instance.tokens, seg))
    return Bag(segments=segments, label=instance.label)


def make_pseudo_long(
    pool: Sequence[Instance],
    cfg: PseudoLongConfig = PseudoLongConfig(),
    rng: Optional[np.random.Generator] = None,
) -> Bag:
    """
    Concatenate a random number k in [k_min, k_max] of short texts into a pseudo-long bag.

    Texts are drawn without replacement unless the pool is smaller than k. The bag
    has no document label; each segment keeps its own label.
    """
    if not pool:
        raise ContractViolation("Cannot build a pseudo-long text from an empty pool")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    k = int(rng.integers(cfg.k_min, cfg.k_max + 1))
    picks = rng.choice(len(pool), size=k, replace=len(pool) < k)
    return Bag(segments=tuple(pool[int(i)] for i in picks), label=None)
