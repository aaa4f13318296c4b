"""Bundled eight-instance corpora for gradient checks and smoke runs."""

from typing import Tuple

from clt.datasets.corpus import LONG, SHORT, Corpus
from clt.textproc import Instance, Vocabulary, build_vocab

_SHORT_TEXTS = (
    (1, "a truly great film with a warm story ."),
    (0, "dull plot and a weak cast ."),
    (1, "great acting , warm and funny ."),
    (0, "weak script , dull and slow ."),
    (1, "funny and great from start to end ."),
    (0, "slow , dull , a weak ending ."),
    (1, "warm story and great cast ."),
    (0, "a weak film with a slow plot ."),
)

_LONG_TEXTS = (
    (1, "a great film . the cast is warm and funny . the ending is great ."),
    (0, "the plot is dull . a weak cast . slow and dull to the end ."),
    (1, "warm story . great acting . funny from start to end ."),
    (0, "weak script . the acting is slow . a dull ending ."),
    (1, "the story is warm . the plot is great . funny cast ."),
    (0, "dull . weak . slow film with a dull plot ."),
    (1, "great cast and great plot . warm and funny ."),
    (0, "a slow start . a weak end . the film is dull ."),
)


def _corpus(texts, channel: str, name: str) -> Corpus:
    instances = [Instance(tokens=tuple(text.split()), label=label) for label, text in texts]
    return Corpus(instances=instances, channel=channel, num_classes=2, name=name)


def gradcheck_fixture() -> Tuple[Corpus, Corpus, Vocabulary]:
    """(short corpus, long corpus, vocabulary over both), eight labelled texts each."""
    short = _corpus(_SHORT_TEXTS, SHORT, "fixture_short")
    long = _corpus(_LONG_TEXTS, LONG, "fixture_long")
    vocab = build_vocab([inst.tokens for inst in short.instances + long.instances], min_count=1)
    return short, long, vocab
