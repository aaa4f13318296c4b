"""
Deterministic synthetic corpora with a planted sentiment lexicon.

Every short text carries label-polarity sentiment words among neutral filler
and ends with a full stop. Noise is added as balanced pairs of one positive and
one negative word, so the class is always recoverable from net sentiment
density, yet long texts (concatenations of same-label short texts) almost
always contain both polarities. That saturates max-pooled features and plants
the length gap the transfer protocol measures.
"""

import string
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from clt.datasets.corpus import LONG, SHORT, Corpus
from clt.textproc import Instance
from clt.utils.logging.component_loggers import get_data_logger, log_data_event

logger = get_data_logger(__name__)

ALPHABET = string.ascii_lowercase
FULL_STOP = "."


class SyntheticConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    vocab_size: int = Field(default=2000, ge=1, description="neutral filler words")
    num_classes: int = 2
    positive_lexicon_size: int = Field(default=50, ge=1)
    negative_lexicon_size: int = Field(default=50, ge=1)
    injection_rate: float = Field(default=0.15, gt=0.0, le=1.0)
    short_length: Tuple[int, int] = (6, 16)
    segments_per_long: Tuple[int, int] = (4, 12)
    noise_rate: float = Field(default=0.1, ge=0.0, lt=1.0)
    n_short: int = Field(default=2000, ge=1)
    n_long: int = Field(default=2000, ge=1)
    n_unlabeled: int = Field(default=0, ge=0)
    seed: int = 13

    @field_validator("num_classes")
    @classmethod
    def _known_class_count(cls, v):
        if v not in (2, 5):
            raise ValueError("num_classes must be 2 or 5")
        return v

    @field_validator("short_length", "segments_per_long")
    @classmethod
    def _valid_range(cls, v):
        lo, hi = v
        if lo < 1 or lo > hi:
            raise ValueError(f"range must satisfy 1 <= low <= high, got {v}")
        return v


@dataclass(frozen=True)
class Lexicon:
    positive: Tuple[str, ...]
    negative: Tuple[str, ...]
    filler: Tuple[str, ...]


def _class_signature(label: int, num_classes: int) -> Tuple[int, float]:
    """(polarity sign, strength in [0, 1]) for a label."""
    if num_classes == 2:
        return (1 if label == 1 else -1), 1.0
    centred = label - (num_classes - 1) // 2
    return int(np.sign(centred)), abs(centred) / ((num_classes - 1) // 2)


def lexicon_predict(tokens, lexicon: Lexicon, num_classes: int, injection_rate: float = 1.0) -> int:
    """Classify by net sentiment-word density; the Bayes-optimal rule for this generator."""
    pos, neg = set(lexicon.positive), set(lexicon.negative)
    content = [t for t in tokens if t != FULL_STOP]
    net = sum(1 for t in content if t in pos) - sum(1 for t in content if t in neg)
    if num_classes == 2:
        return 1 if net > 0 else 0
    density = net / max(len(content), 1)
    centres = [s * st * injection_rate for s, st in (_class_signature(c, num_classes) for c in range(num_classes))]
    return int(np.argmin([abs(density - c) for c in centres]))


class SyntheticGenerator:
    def __init__(self, cfg: SyntheticConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.lexicon = self._build_lexicon()

    def _fresh_words(self, count: int, taken: set) -> Tuple[str, ...]:
        words = []
        while len(words) < count:
            k = int(self.rng.integers(4, 9))
            word = "".join(self.rng.choice(list(ALPHABET), size=k))
            if word not in taken:
                taken.add(word)
                words.append(word)
        return tuple(words)

    def _build_lexicon(self) -> Lexicon:
        taken = set()
        return Lexicon(
            positive=self._fresh_words(self.cfg.positive_lexicon_size, taken),
            negative=self._fresh_words(self.cfg.negative_lexicon_size, taken),
            filler=self._fresh_words(self.cfg.vocab_size, taken),
        )

    def _pick(self, words: Tuple[str, ...]) -> str:
        return words[int(self.rng.integers(len(words)))]

    def short_tokens(self, label: int) -> List[str]:
        cfg, lex = self.cfg, self.lexicon
        length = int(self.rng.integers(cfg.short_length[0], cfg.short_length[1] + 1))
        sign, strength = _class_signature(label, cfg.num_classes)

        n_sentiment = 0
        if strength > 0:
            n_sentiment = min(length, max(1, int(round(cfg.injection_rate * strength * length))))
        n_pairs = int(self.rng.binomial((length - n_sentiment) // 2, cfg.noise_rate)) if cfg.noise_rate > 0 else 0

        tokens = [self._pick(lex.filler) for _ in range(length)]
        slots = self.rng.permutation(length)
        polarity_words = lex.positive if sign > 0 else lex.negative
        for pos in slots[:n_sentiment]:
            tokens[pos] = self._pick(polarity_words)
        noise_slots = slots[n_sentiment:n_sentiment + 2 * n_pairs]
        for j, pos in enumerate(noise_slots):
            tokens[pos] = self._pick(lex.positive if j % 2 == 0 else lex.negative)
        tokens.append(FULL_STOP)
        return tokens

    def long_tokens(self, label: int) -> List[str]:
        lo, hi = self.cfg.segments_per_long
        count = int(self.rng.integers(lo, hi + 1))
        return [tok for _ in range(count) for tok in self.short_tokens(label)]

    def _balanced_labels(self, n: int) -> np.ndarray:
        return self.rng.permutation(np.arange(n) % self.cfg.num_classes)

    def generate(self) -> Tuple[Corpus, Corpus, List[List[str]]]:
        cfg = self.cfg
        short = [Instance(tokens=tuple(self.short_tokens(int(y))), label=int(y))
                 for y in self._balanced_labels(cfg.n_short)]
        long = [Instance(tokens=tuple(self.long_tokens(int(y))), label=int(y))
                for y in self._balanced_labels(cfg.n_long)]

        unlabeled = []
        for _ in range(cfg.n_unlabeled):
            y = int(self.rng.integers(cfg.num_classes))
            unlabeled.append(self.short_tokens(y) if self.rng.random() < 0.5 else self.long_tokens(y))

        short_corpus = Corpus(instances=short, channel=SHORT, num_classes=cfg.num_classes,
                              name="synthetic_short", unlabeled=unlabeled)
        long_corpus = Corpus(instances=long, channel=LONG, num_classes=cfg.num_classes,
                             name="synthetic_long", unlabeled=unlabeled)
        log_data_event(
            logger,
            f"Generated synthetic corpora: {len(short)} short (mean {short_corpus.mean_length:.1f} tokens), "
            f"{len(long)} long (mean {long_corpus.mean_length:.1f} tokens), {len(unlabeled)} unlabeled",
            action="synthetic_generated",
            seed=cfg.seed,
        )
        return short_corpus, long_corpus, unlabeled


def gen_synthetic(cfg: SyntheticConfig = SyntheticConfig()) -> Tuple[Corpus, Corpus, List[List[str]]]:
    """Short corpus, long corpus and unlabeled token lists, deterministic given `cfg.seed`."""
    return SyntheticGenerator(cfg).generate()
