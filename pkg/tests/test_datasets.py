import numpy as np
import pytest
from pydantic import ValidationError

from clt.config import PAD_ID, UNK_ID
from clt.datasets import (
    LONG,
    SHORT,
    FoldPlan,
    SyntheticConfig,
    SyntheticGenerator,
    gen_synthetic,
    kfold_split,
    lexicon_predict,
    load_corpus,
    load_embeddings,
    load_unlabeled,
    write_corpus,
)
from clt.errors import ContractViolation, CorpusFormatError, EmbeddingFormatError
from clt.textproc import build_vocab, segment


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# -----------------------------------------------------------------------------
# Corpus files
# -----------------------------------------------------------------------------

def test_load_corpus_basic(tmp_path):
    path = write(tmp_path, "short.tsv", "# header comment\n1\tGood movie!\n\n0\tBad, slow.\n")
    corpus = load_corpus(path, SHORT, num_classes=2)
    assert len(corpus) == 2
    assert corpus.instances[0].tokens == ("good", "movie", "!")
    assert corpus.labels.tolist() == [1, 0]
    assert corpus.name == "short"


def test_load_corpus_line_count(tmp_path):
    lines = "".join(f"{i % 2}\ttext number {i} .\n" for i in range(1600))
    corpus = load_corpus(write(tmp_path, "c.tsv", lines), LONG, num_classes=2)
    assert len(corpus) == 1600
    assert corpus.label_histogram() == [800, 800]


def test_load_corpus_label_out_of_range_names_the_line(tmp_path):
    path = write(tmp_path, "bad.tsv", "1\tfine\n7\tx\n")
    with pytest.raises(CorpusFormatError) as info:
        load_corpus(path, SHORT, num_classes=5)
    assert info.value.line_number == 2
    assert "bad.tsv:2" in str(info.value)


def test_load_corpus_missing_tab(tmp_path):
    with pytest.raises(CorpusFormatError) as info:
        load_corpus(write(tmp_path, "c.tsv", "1 no tab here\n"), SHORT, num_classes=2)
    assert info.value.line_number == 1


def test_load_corpus_skips_empty_texts(tmp_path):
    corpus = load_corpus(write(tmp_path, "c.tsv", "1\t   \n0\tok .\n"), SHORT, num_classes=2)
    assert len(corpus) == 1


def test_load_corpus_label_base(tmp_path):
    path = write(tmp_path, "sst.tsv", "1\tawful\n5\tsuperb\n")
    corpus = load_corpus(path, SHORT, num_classes=5, label_base=1)
    assert corpus.labels.tolist() == [0, 4]
    out = tmp_path / "copy.tsv"
    write_corpus(corpus, str(out))
    assert out.read_text(encoding="utf-8") == "1\tawful\n5\tsuperb\n"


def test_load_unlabeled(tmp_path):
    texts = load_unlabeled(write(tmp_path, "u.txt", "First text.\n\n# note\nsecond\n"))
    assert texts == [["first", "text", "."], ["second"]]


# -----------------------------------------------------------------------------
# Embeddings
# -----------------------------------------------------------------------------

@pytest.fixture
def small_vocab():
    # "bad" -> 2, "good" -> 3
    return build_vocab([["good", "good", "bad", "bad"]], min_count=1)


def test_embeddings_full_coverage(tmp_path, small_vocab):
    path = write(tmp_path, "vec.txt", "good 0.1 0.2 0.3\nbad 1 2 3\nother 0 0 0\n")
    result = load_embeddings(path, small_vocab, dim=3)
    assert result.coverage == 1.0
    assert np.allclose(result.matrix[3], [0.1, 0.2, 0.3])
    assert np.allclose(result.matrix[2], [1.0, 2.0, 3.0])
    assert np.all(result.matrix[PAD_ID] == 0.0)
    assert np.any(result.matrix[UNK_ID] != 0.0)


def test_embeddings_no_coverage(tmp_path, small_vocab):
    result = load_embeddings(write(tmp_path, "vec.txt", "zebra 1 1 1\n"), small_vocab, dim=3, init_range=0.25)
    assert result.coverage == 0.0
    assert result.oov_rate == 1.0
    assert sorted(result.missing_tokens) == ["bad", "good"]
    assert np.all(np.abs(result.matrix[2:]) < 0.25)


def test_embeddings_wrong_dimension(tmp_path, small_vocab):
    path = write(tmp_path, "vec.txt", "good 1 1 1\nbad 1 1\n")
    with pytest.raises(EmbeddingFormatError) as info:
        load_embeddings(path, small_vocab, dim=3)
    assert info.value.line_number == 2


def test_embeddings_duplicate_keeps_first(tmp_path, small_vocab):
    result = load_embeddings(write(tmp_path, "vec.txt", "good 1 1 1\ngood 2 2 2\n"), small_vocab, dim=3)
    assert result.duplicates == 1
    assert np.allclose(result.matrix[3], [1.0, 1.0, 1.0])
    assert result.coverage == 0.5


def test_embeddings_skip_header(tmp_path, small_vocab):
    result = load_embeddings(write(tmp_path, "vec.txt", "2 3\ngood 1 1 1\nbad 2 2 2\n"), small_vocab, dim=3)
    assert result.coverage == 1.0


# -----------------------------------------------------------------------------
# Folds
# -----------------------------------------------------------------------------

def test_kfold_sizes():
    splits = kfold_split(1600, FoldPlan(k=5, seed=0, dev_fraction=0.1))
    assert len(splits) == 5
    for s in splits:
        assert (len(s.train), len(s.dev), len(s.test)) == (1152, 128, 320)


def test_kfold_is_deterministic():
    a = kfold_split(100, FoldPlan(k=5, seed=4))
    b = kfold_split(100, FoldPlan(k=5, seed=4))
    assert all(np.array_equal(x.test, y.test) and np.array_equal(x.dev, y.dev) for x, y in zip(a, b))


def test_kfold_partitions(rng):
    for _ in range(50):
        n = int(rng.integers(5, 400))
        k = int(rng.integers(2, 6))
        splits = kfold_split(n, FoldPlan(k=k, seed=int(rng.integers(1000))))
        tests = np.concatenate([s.test for s in splits])
        assert sorted(tests.tolist()) == list(range(n))
        for s in splits:
            parts = np.concatenate([s.train, s.dev, s.test])
            assert sorted(parts.tolist()) == list(range(n))


def test_kfold_rejects_bad_plans():
    with pytest.raises(ContractViolation):
        FoldPlan(k=1)
    with pytest.raises(ContractViolation):
        kfold_split(3, FoldPlan(k=5))


# -----------------------------------------------------------------------------
# Synthetic corpora
# -----------------------------------------------------------------------------

def small_config(**kwargs):
    base = dict(vocab_size=50, positive_lexicon_size=5, negative_lexicon_size=5,
                n_short=40, n_long=20, seed=3)
    base.update(kwargs)
    return SyntheticConfig(**base)


def test_synthetic_full_injection_is_lexically_separable():
    cfg = small_config(injection_rate=1.0, noise_rate=0.0)
    gen = SyntheticGenerator(cfg)
    short, long, _ = gen.generate()
    for corpus in (short, long):
        preds = [lexicon_predict(inst.tokens, gen.lexicon, 2) for inst in corpus.instances]
        assert preds == corpus.labels.tolist()


def test_synthetic_single_segment_longs():
    _, long, _ = gen_synthetic(small_config(segments_per_long=(1, 1)))
    assert all(inst.tokens.count(".") == 1 for inst in long.instances)


def test_synthetic_labels_are_balanced():
    short, long, _ = gen_synthetic(small_config(n_short=10, n_long=10))
    assert short.label_histogram() == [5, 5]
    short, _, _ = gen_synthetic(small_config(num_classes=5, n_short=10))
    assert short.label_histogram() == [2] * 5


def test_synthetic_long_segments_carry_the_document_label():
    gen = SyntheticGenerator(small_config(noise_rate=0.3))
    _, long, _ = gen.generate()
    for inst in long.instances:
        for piece in segment(inst.tokens):
            assert lexicon_predict(piece, gen.lexicon, 2) == inst.label


def test_synthetic_is_deterministic():
    a_short, a_long, a_unl = gen_synthetic(small_config(n_unlabeled=5))
    b_short, b_long, b_unl = gen_synthetic(small_config(n_unlabeled=5))
    assert a_short.instances == b_short.instances
    assert a_long.instances == b_long.instances
    assert a_unl == b_unl and len(a_unl) == 5
    other, _, _ = gen_synthetic(small_config(seed=4))
    assert other.instances != a_short.instances


def test_synthetic_long_texts_are_longer():
    short, long, _ = gen_synthetic(small_config())
    assert long.mean_length > 3 * short.mean_length


@pytest.mark.parametrize("kwargs", [
    {"short_length": (5, 2)},
    {"segments_per_long": (0, 3)},
    {"num_classes": 3},
    {"injection_rate": 0.0},
    {"unknown_key": 1},
])
def test_synthetic_config_validation(kwargs):
    with pytest.raises(ValidationError):
        small_config(**kwargs)
