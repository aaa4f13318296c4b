from clt.textproc.instances import Bag, Instance
from clt.textproc.tokenizer import tokenize
from clt.textproc.vocab import Vocabulary, build_vocab
from clt.textproc.segmenter import (
    CHUNK_MODE,
    SENTENCE_MODE,
    PseudoLongConfig,
    Segmenter,
    make_pseudo_long,
    segment,
    segment_instance,
)

__all__ = [
    "Bag", "Instance", "tokenize", "Vocabulary", "build_vocab",
    "CHUNK_MODE", "SENTENCE_MODE", "PseudoLongConfig", "Segmenter",
    "make_pseudo_long", "segment", "segment_instance",
]
