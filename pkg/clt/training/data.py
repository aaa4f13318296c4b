from typing import List

import numpy as np

from clt.datasets import LONG, Corpus
from clt.textproc import Bag, Segmenter, Vocabulary, segment_instance


def prepare_bags(corpus: Corpus, vocab: Vocabulary, segmenter: Segmenter = Segmenter()) -> List[Bag]:
    """
    Encode a corpus into model inputs.

    Long texts become segmented bags carrying the document label; short texts
    become one-segment bags carrying their own label.
    """
    bags = []
    for inst in corpus.instances:
        if corpus.channel == LONG:
            bags.append(vocab.encode_bag(segment_instance(inst, segmenter)))
        else:
            bags.append(Bag.from_instance(vocab.encode_instance(inst)))
    return bags


def gold_labels(bags: List[Bag]) -> np.ndarray:
    return np.asarray([b.label for b in bags], dtype=np.int64)


def minibatches(n: int, batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Seeded shuffle of range(n) cut into batches; the last batch may be short."""
    order = rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]
