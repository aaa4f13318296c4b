import numpy as np
import pytest

from clt.datasets import random_embeddings
from clt.errors import CheckpointFormatError, ContractViolation
from clt.models import (
    MEAN_POOLING,
    Attention,
    ModelDims,
    attention_pool,
    build_model,
    load_checkpoint,
    read_header,
    save_checkpoint,
)
from clt.numcore import Parameter, Tensor
from clt.textproc import Bag, Instance

KINDS = ("cnn", "baggedcnn", "letranets")


def zero_parameters(model):
    for p in model.parameters():
        p.data[...] = 0.0
    return model


def random_bag(vocab, rng, num_segments, label=1):
    words = vocab.id_to_token[2:]
    segments = []
    for _ in range(num_segments):
        n = int(rng.integers(1, 9))
        tokens = tuple(words[i] for i in rng.integers(len(words), size=n))
        segments.append(vocab.encode_instance(Instance(tokens=tokens, label=label)))
    return Bag(segments=tuple(segments), label=label)


@pytest.mark.parametrize("num_classes", [2, 5])
def test_letranets_parameter_count_at_full_size(num_classes):
    V, C = 50, num_classes
    dims = ModelDims(vocab_size=V, num_classes=C)
    model = build_model("letranets", dims, random_embeddings(V, 300, seed=0))
    expected = 300 * V + 2 * (300 * 12 * 100 + 300) + (30000 + 200) + 2 * (300 * C + C) + 600 * C + C
    assert model.num_parameters() == expected
    assert model.head_joint.in_dim == 600


def test_parameter_names_are_unique_and_ordered(make_model):
    model = make_model("letranets")
    names = [p.name for p in model.parameters()]
    assert len(names) == len(set(names))
    assert names[0] == "embedding"
    assert names[-6:] == ["head_l.W", "head_l.b", "head_b.W", "head_b.b", "head_j.W", "head_j.b"]


@pytest.mark.parametrize("kind", KINDS)
def test_zero_parameters_give_uniform_output(kind, make_model, make_bag):
    model = zero_parameters(make_model(kind))
    assert np.allclose(model.predict_proba(make_bag("great film .", "dull plot .")), [0.5, 0.5])


@pytest.mark.parametrize("kind", KINDS)
def test_fine_grained_output_shape(kind, vocab, tiny_embeddings):
    dims = ModelDims(vocab_size=len(vocab), num_classes=5, embedding_dim=6, widths=(2, 3), maps=3, attention_dim=4)
    model = build_model(kind, dims, tiny_embeddings)
    probs = model.predict_proba(random_bag(vocab, np.random.default_rng(0), 3))
    assert probs.shape == (5,)
    assert probs.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("kind", KINDS)
def test_eval_prediction_is_deterministic(kind, make_model, make_bag):
    model = make_model(kind)
    bag = make_bag("a truly great film .", "the plot is dull .")
    assert np.array_equal(model.predict_proba(bag), model.predict_proba(bag))
    assert model.predict(bag) in (0, 1)


def test_same_seed_builds_same_model(make_model):
    a, b = make_model("letranets", seed=3), make_model("letranets", seed=3)
    for (name, x), y in zip(a.snapshot().items(), b.snapshot().values()):
        assert np.array_equal(x, y), name


def test_short_text_is_a_single_segment_bag(make_model, vocab):
    model = make_model("baggedcnn")
    inst = vocab.encode_instance(Instance(tokens=("great", "cast", "."), label=1))
    assert np.array_equal(model.predict_proba(inst), model.predict_proba(Bag.from_instance(inst)))
    with pytest.raises(ContractViolation):
        model.predict_proba("great cast")


# -----------------------------------------------------------------------------
# Attention pooling
# -----------------------------------------------------------------------------

def test_attention_pool_single_segment(rng):
    s = Tensor(rng.normal(size=4))
    d, weights = attention_pool([s], Attention("attention", 4, 3, rng))
    assert weights.data.tolist() == [1.0]
    assert np.allclose(d.data, s.data)


def test_attention_pool_identical_pair(rng):
    s = rng.normal(size=4)
    d, weights = attention_pool([Tensor(s), Tensor(s.copy())], Attention("attention", 4, 3, rng))
    assert np.allclose(weights.data, [0.5, 0.5])
    assert np.allclose(d.data, s)


def test_attention_pool_is_permutation_invariant(rng):
    attn = Attention("attention", 4, 3, rng)
    vectors = [rng.normal(size=4) for _ in range(5)]
    d, weights = attention_pool([Tensor(v) for v in vectors], attn)
    order = rng.permutation(5)
    d_perm, weights_perm = attention_pool([Tensor(vectors[i]) for i in order], attn)
    assert np.allclose(d.data, d_perm.data)
    assert np.allclose(weights.data[order], weights_perm.data)


def test_attention_weights_form_a_distribution(rng):
    attn = Attention("attention", 4, 3, rng)
    for _ in range(1000):
        n = int(rng.integers(1, 8))
        _, weights = attention_pool([Tensor(rng.normal(scale=3.0, size=4)) for _ in range(n)], attn)
        assert abs(weights.data.sum() - 1.0) < 1e-9
        assert np.all(weights.data >= 0.0)


def test_mean_pooling(vocab, tiny_embeddings, rng):
    dims = ModelDims(vocab_size=len(vocab), num_classes=2, embedding_dim=6, widths=(2, 3), maps=3,
                     attention_dim=4, pooling=MEAN_POOLING)
    model = build_model("baggedcnn", dims, tiny_embeddings)
    assert model.attention is None
    assert not any(p.name.startswith("attention") for p in model.parameters())
    out = model.forward(random_bag(vocab, rng, 4))
    assert np.allclose(out.weights.data, 0.25)


# -----------------------------------------------------------------------------
# One-segment inputs
# -----------------------------------------------------------------------------

def test_one_segment_documents_match_their_segment(make_model, vocab, rng):
    bagged, letra = make_model("baggedcnn"), make_model("letranets")
    for _ in range(1000):
        bag = random_bag(vocab, rng, 1)
        out = bagged.forward(bag)
        assert np.allclose(out.document.data, out.segments[0].data, atol=1e-9, rtol=0)
        out = letra.forward(bag)
        assert np.allclose(out.doc_lone.data, out.seg_lone[0].data, atol=1e-9, rtol=0)
        assert np.allclose(out.doc_bag.data, out.seg_bag[0].data, atol=1e-9, rtol=0)
        assert np.allclose(out.doc_joint.data, out.seg_joint[0].data, atol=1e-9, rtol=0)


def test_letranets_output_shapes(make_model, make_bag):
    out = make_model("letranets").forward(make_bag("great film .", "warm cast .", "funny end ."))
    assert len(out.seg_lone) == len(out.seg_bag) == len(out.seg_joint) == 3
    assert out.weights.shape == (3,)
    assert out.doc_joint.shape == (2,)


def test_letranets_without_joint_averages_the_channel_heads(make_model, make_bag):
    model = make_model("letranets", use_joint=False)
    bag = make_bag("great film .", "dull plot .")
    out = model.forward(bag)
    assert np.allclose(model.predict_proba(bag), 0.5 * (out.doc_lone.data + out.doc_bag.data))


def test_embedding_shape_must_match_dims(tiny_dims):
    with pytest.raises(ContractViolation):
        build_model("cnn", tiny_dims, np.zeros((tiny_dims.vocab_size + 1, tiny_dims.embedding_dim)))


@pytest.mark.parametrize("num_classes", [0, 1])
def test_dims_need_at_least_two_classes(num_classes):
    with pytest.raises(ContractViolation):
        ModelDims(vocab_size=5, num_classes=num_classes)


def test_unknown_kind(tiny_dims, tiny_embeddings):
    with pytest.raises(ContractViolation):
        build_model("rnn", tiny_dims, tiny_embeddings)


def test_frozen_embeddings(make_model):
    model = make_model("cnn", train_embeddings=False)
    assert not model.embedding.table.trainable
    model.set_trainable(model.parameters())
    model.reset_trainable()
    assert not model.embedding.table.trainable
    assert all(p.trainable for p in model.parameters()[1:])


def test_constrain_skips_frozen_heads(make_model):
    model = make_model("letranets")
    for head in model.heads():
        head.W.data[...] = 10.0
    model.set_trainable(model.joint_path())
    model.constrain(3.0)
    assert np.all(model.head_lone.W.data == 10.0)
    assert np.all(np.linalg.norm(model.head_joint.W.data, axis=1) <= 3.0 + 1e-12)


def test_padding_row_is_zero(make_model):
    assert np.all(make_model("cnn").embedding.table.data[0] == 0.0)


# -----------------------------------------------------------------------------
# Checkpoints
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_checkpoint_round_trip(kind, make_model, make_bag, tmp_path):
    model = make_model(kind, seed=7)
    path = save_checkpoint(model, tmp_path / "model.ckpt")
    loaded = load_checkpoint(path)
    assert loaded.kind == kind
    bag = make_bag("a great film .", "slow plot .")
    assert np.array_equal(model.predict_proba(bag), loaded.predict_proba(bag))
    assert read_header(path)["kind"] == kind


def test_checkpoint_keeps_model_options(make_model, tmp_path):
    path = save_checkpoint(make_model("letranets", use_joint=False, train_embeddings=False), tmp_path / "m.ckpt")
    loaded = load_checkpoint(path)
    assert loaded.use_joint is False
    assert loaded.train_embeddings is False


def test_checkpoint_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.ckpt"
    path.write_bytes(b"not a checkpoint at all")
    with pytest.raises(CheckpointFormatError):
        load_checkpoint(path)


def test_checkpoint_rejects_truncated_payload(make_model, tmp_path):
    path = save_checkpoint(make_model("cnn"), tmp_path / "model.ckpt")
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(CheckpointFormatError):
        load_checkpoint(path)
    path.write_bytes(data[:12])
    with pytest.raises(CheckpointFormatError):
        load_checkpoint(path)


def test_restore_rejects_wrong_shapes(make_model):
    model = make_model("cnn")
    snap = model.snapshot()
    snap["head.W"] = np.zeros((1, 1))
    with pytest.raises(ContractViolation):
        model.restore(snap)


def test_parameter_is_a_tensor():
    p = Parameter(np.ones(3), name="w")
    assert p.requires_grad and p.trainable
    assert np.array_equal(p.grad, np.zeros(3))
