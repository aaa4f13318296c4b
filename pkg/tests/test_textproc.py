import numpy as np
import pytest

from clt.config import PAD_ID, UNK_ID
from clt.errors import ContractViolation
from clt.textproc import (
    CHUNK_MODE,
    Bag,
    Instance,
    PseudoLongConfig,
    Segmenter,
    Vocabulary,
    build_vocab,
    make_pseudo_long,
    segment,
    segment_instance,
    tokenize,
)


@pytest.mark.parametrize("raw, expected", [
    ("Good movie!", ["good", "movie", "!"]),
    ("A  B", ["a", "b"]),
    ("don't stop.", ["don", "'", "t", "stop", "."]),
    ("", []),
    ("   \t ", []),
])
def test_tokenize(raw, expected):
    assert tokenize(raw) == expected


def test_build_vocab_min_count():
    vocab = build_vocab([["a", "a", "b"]], min_count=2)
    assert "a" in vocab and "b" not in vocab
    assert vocab.lookup("b") == UNK_ID
    assert vocab.lookup("never-seen") == UNK_ID
    assert vocab.id_to_token[PAD_ID] == "<pad>"


def test_build_vocab_orders_by_frequency_then_lexicographically():
    vocab = build_vocab([["y", "x"]], min_count=1)
    assert vocab.lookup("x") == 2 and vocab.lookup("y") == 3
    vocab = build_vocab([["b", "c", "c", "a", "b", "c"]], min_count=1)
    assert vocab.id_to_token[2:] == ["c", "b", "a"]


def test_build_vocab_empty_is_an_error():
    with pytest.raises(ContractViolation):
        build_vocab([["a", "b"]], min_count=2)


def test_vocabulary_save_load(tmp_path):
    vocab = build_vocab([["good", "good", "film", "film", "bad"]], min_count=2)
    path = tmp_path / "vocab.json"
    vocab.save(str(path))
    loaded = Vocabulary.load(str(path))
    assert loaded.id_to_token == vocab.id_to_token
    assert loaded.min_count == 2


def test_encode_instance_and_bag():
    vocab = build_vocab([["good", "film", "."]], min_count=1)
    bag = vocab.encode_bag(Bag(segments=(Instance(("good", ".")), Instance(("odd", "film"))), label=1))
    assert [list(ids) for ids in bag.segment_ids()] == [
        [vocab.lookup("good"), vocab.lookup(".")],
        [UNK_ID, vocab.lookup("film")],
    ]
    assert bag.document_ids().tolist() == [vocab.lookup("good"), vocab.lookup("."), UNK_ID, vocab.lookup("film")]
    assert bag.length == 4 and bag.num_segments == 2


def test_empty_bag_is_rejected():
    with pytest.raises(ContractViolation):
        Bag(segments=())


def test_segment_examples():
    assert segment(["good", ".", "bad", "."]) == [["good", "."], ["bad", "."]]
    tokens = [f"w{i}" for i in range(40)]
    assert segment(tokens, Segmenter(chunk_size=20)) == [tokens[:20], tokens[20:]]
    assert segment(["a", "fine", "film", "."]) == [["a", "fine", "film", "."]]


def test_segment_resplits_long_sentences():
    tokens = [f"w{i}" for i in range(45)] + ["."]
    pieces = segment(tokens, Segmenter(chunk_size=20))
    assert [len(p) for p in pieces] == [20, 20, 6]


def test_segment_merges_overflow_into_last():
    tokens = ["a", ".", "b", ".", "c", ".", "d", "."]
    pieces = segment(tokens, Segmenter(max_segments=2))
    assert pieces == [["a", "."], ["b", ".", "c", ".", "d", "."]]


def test_segment_flatten_reproduces_input(rng):
    words = ["good", "bad", "film", ".", "!", "plot", ";", "?"]
    for _ in range(1000):
        n = int(rng.integers(1, 120))
        tokens = [words[i] for i in rng.integers(len(words), size=n)]
        seg = Segmenter(mode=str(rng.choice(["sentence", CHUNK_MODE])),
                        chunk_size=int(rng.integers(1, 25)), max_segments=int(rng.integers(1, 30)))
        pieces = segment(tokens, seg)
        assert [t for p in pieces for t in p] == tokens
        assert 1 <= len(pieces) <= seg.max_segments
        assert all(pieces)


def test_segment_instance_keeps_document_label():
    bag = segment_instance(Instance(tokens=("good", ".", "bad", "."), label=1))
    assert bag.label == 1
    assert bag.segment_labels == (None, None)


def _pool(n):
    return [Instance(tokens=(f"t{i}", "."), label=i % 2) for i in range(n)]


def test_pseudo_long_single_text():
    pool = _pool(5)
    bag = make_pseudo_long(pool, PseudoLongConfig(k_min=1, k_max=1, seed=3))
    assert bag.num_segments == 1
    assert bag.segments[0] in pool
    assert bag.label is None


def test_pseudo_long_uses_whole_pool_without_replacement():
    pool = _pool(3)
    bag = make_pseudo_long(pool, PseudoLongConfig(k_min=3, k_max=3, seed=0))
    assert sorted(s.tokens for s in bag.segments) == sorted(s.tokens for s in pool)
    assert bag.segment_labels == tuple(s.label for s in bag.segments)


def test_pseudo_long_small_pool_samples_with_replacement():
    bag = make_pseudo_long(_pool(2), PseudoLongConfig(k_min=5, k_max=5, seed=0))
    assert bag.num_segments == 5


def test_pseudo_long_is_deterministic():
    cfg = PseudoLongConfig(k_min=2, k_max=6, seed=11)
    assert make_pseudo_long(_pool(20), cfg) == make_pseudo_long(_pool(20), cfg)
    a = make_pseudo_long(_pool(20), cfg, np.random.default_rng(5))
    b = make_pseudo_long(_pool(20), cfg, np.random.default_rng(5))
    assert a == b


def test_pseudo_long_rejects_empty_pool():
    with pytest.raises(ContractViolation):
        make_pseudo_long([], PseudoLongConfig())
    with pytest.raises(ContractViolation):
        PseudoLongConfig(k_min=4, k_max=2)
