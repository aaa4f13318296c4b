from dataclasses import replace

import numpy as np
import pytest

from clt.datasets import SyntheticConfig, gen_synthetic, random_embeddings
from clt.errors import ContractViolation, TrainingDivergedError
from clt.evaluation import accuracy, predict_all
from clt.models import MEAN_POOLING, ModelDims, build_model
from clt.numcore import Adadelta
from clt.textproc import Bag, build_vocab
from clt.training import (
    BAG,
    JOINT,
    LONE,
    LONG_TO_SHORT,
    SHORT_TO_LONG,
    TrainConfig,
    batch_loss,
    check_loss_gradients,
    full_phase,
    gold_labels,
    loss_long,
    loss_short,
    minibatches,
    prepare_bags,
    pr_detach_direction,
    pretrain_phases,
    run_epoch,
    select_lambda,
    stepwise_pretrain,
    train,
    training_dims,
    tune_lambda,
)

LN2 = np.log(2.0)


def zeroed(model):
    for p in model.parameters():
        p.data[...] = 0.0
    return model


def fast_config(**kwargs):
    base = dict(batch_size=4, max_epochs=2, pretrain_epochs=1, patience=2, seed=5)
    base.update(kwargs)
    return TrainConfig(**base)


# -----------------------------------------------------------------------------
# Objectives
# -----------------------------------------------------------------------------

def test_pr_detach_direction():
    assert pr_detach_direction(LONG_TO_SHORT) == (BAG, LONE)
    assert pr_detach_direction(SHORT_TO_LONG) == (LONE, BAG)
    with pytest.raises(ContractViolation):
        pr_detach_direction("sideways")


def test_zero_initialised_long_loss_is_three_ln2(make_model, make_bag):
    model = zeroed(make_model("letranets"))
    loss = loss_long(make_bag("great film .", "dull plot .", label=1), model, lambda_=0.5)
    assert loss.value == pytest.approx(3 * LN2)
    assert loss.components["reg"] == pytest.approx(0.0, abs=1e-12)


def test_zero_initialised_short_loss_is_three_ln2(make_model, make_bag):
    model = zeroed(make_model("letranets"))
    batch = [make_bag("great film .", label=1), make_bag("dull plot .", label=0)]
    pseudo_long = Bag(segments=tuple(b.segments[0] for b in batch))
    loss = loss_short(batch, pseudo_long, model, lambda_=0.5)
    assert loss.value == pytest.approx(3 * LN2)


def test_short_loss_is_a_batch_mean(make_model, make_bag):
    model = make_model("letranets")
    batch = [make_bag("great film .", label=1), make_bag("dull plot .", label=0), make_bag("warm cast .", label=1)]
    pseudo_long = Bag(segments=tuple(b.segments[0] for b in batch))
    once = loss_short(batch, pseudo_long, model, lambda_=0.1).value
    twice = loss_short(batch + batch, pseudo_long, model, lambda_=0.1).value
    assert twice == pytest.approx(once, rel=1e-12)


@pytest.mark.parametrize("direction, reference, regularized", [
    (LONG_TO_SHORT, "head_bag", "head_lone"),
    (SHORT_TO_LONG, "head_lone", "head_bag"),
])
def test_regularizer_leaves_the_reference_untouched(direction, reference, regularized, make_model, make_bag):
    model = make_model("letranets", seed=2)
    bag = make_bag("a truly great film .", "the plot is dull .", "warm cast .", label=1)
    if direction == LONG_TO_SHORT:
        loss = loss_long(bag, model, lambda_=1.0, terms=frozenset())
    else:
        loss = loss_short([bag], bag, model, lambda_=1.0, terms=frozenset())
    loss.total.backward()
    assert np.all(getattr(model, reference).W.grad == 0.0)
    assert np.any(getattr(model, regularized).W.grad != 0.0)
    assert np.all(model.head_joint.W.grad == 0.0)


def test_loss_needs_labels_and_examples(make_model, make_bag):
    model = make_model("letranets")
    with pytest.raises(ContractViolation):
        loss_long(make_bag("great film .", label=None), model, lambda_=0.1)
    with pytest.raises(ContractViolation):
        loss_short([], None, model, lambda_=0.1)
    with pytest.raises(ContractViolation):
        batch_loss(model, [], LONG_TO_SHORT, 0.1)


def test_regularized_short_loss_needs_a_pseudo_long(make_model, make_bag):
    with pytest.raises(ContractViolation):
        loss_short([make_bag("great film .")], None, make_model("letranets"), lambda_=0.1)


@pytest.mark.parametrize("kind", ["cnn", "baggedcnn"])
def test_baseline_losses_are_plain_cross_entropy(kind, make_model, make_bag):
    model = zeroed(make_model(kind))
    loss = batch_loss(model, [make_bag("great film .", "dull plot .")], LONG_TO_SHORT, 0.1)
    assert loss.value == pytest.approx(LN2)


def test_minibatches_cover_every_index():
    batches = minibatches(10, 4, np.random.default_rng(0))
    assert [len(b) for b in batches] == [4, 4, 2]
    assert sorted(np.concatenate(batches).tolist()) == list(range(10))


# -----------------------------------------------------------------------------
# Stepwise pretraining
# -----------------------------------------------------------------------------

def _snapshot(params):
    return [p.data.copy() for p in params]


def _unchanged(params, before):
    return all(np.array_equal(p.data, b) for p, b in zip(params, before))


def _run_phase(model, phase, examples, cfg):
    model.set_trainable(phase.params)
    run_epoch(model, examples, cfg, phase, Adadelta(model.parameters()), epoch=0)
    model.reset_trainable()


def test_first_stage_moves_only_the_strong_path(make_model, fixture_data, vocab):
    cfg = fast_config(direction=LONG_TO_SHORT)
    model = make_model("letranets")
    examples = prepare_bags(fixture_data[1], vocab)
    stage1 = pretrain_phases(model, cfg)[0]
    lone_before = _snapshot(model.lone_path())
    bag_before = _snapshot(model.bag_path())
    joint_before = _snapshot(model.joint_path())

    _run_phase(model, stage1, examples, cfg)
    assert _unchanged(model.lone_path(), lone_before)
    assert _unchanged(model.joint_path(), joint_before)
    assert not _unchanged(model.bag_path(), bag_before)


def test_last_stage_moves_only_the_joint_head(make_model, fixture_data, vocab):
    cfg = fast_config(direction=SHORT_TO_LONG)
    model = make_model("letranets")
    examples = prepare_bags(fixture_data[0], vocab)
    stages = pretrain_phases(model, cfg)
    assert [s.name for s in stages] == ["stage1", "stage2", "stage3"]
    assert stages[1].regularize and stages[2].terms == frozenset({JOINT})

    before = model.snapshot()
    _run_phase(model, stages[2], examples, cfg)
    after = model.snapshot()
    changed = {name for name in before if not np.array_equal(before[name], after[name])}
    assert changed == {"head_j.W", "head_j.b"}


def test_pretraining_without_joint_training_has_two_stages(make_model):
    assert len(pretrain_phases(make_model("letranets"), fast_config(joint_training=False))) == 2
    assert full_phase(make_model("letranets"), fast_config(joint_training=False)).terms == frozenset({LONE, BAG})


def test_disabled_pretraining_is_a_noop(make_model, fixture_data, vocab):
    model = make_model("letranets")
    before = model.snapshot()
    stepwise_pretrain(model, prepare_bags(fixture_data[1], vocab), fast_config(stepwise_pretraining=False))
    after = model.snapshot()
    assert all(np.array_equal(before[k], after[k]) for k in before)


# -----------------------------------------------------------------------------
# Training loop
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("kind, direction", [
    ("letranets", LONG_TO_SHORT),
    ("letranets", SHORT_TO_LONG),
    ("baggedcnn", SHORT_TO_LONG),
])
def test_training_is_deterministic(kind, direction, fixture_data, vocab, tiny_dims, tiny_embeddings):
    short, long, _ = fixture_data
    corpus = long if direction == LONG_TO_SHORT else short
    cfg = fast_config(direction=direction)
    runs = [train(kind, corpus.subset(range(6)), cfg, vocab, tiny_embeddings,
                  dev_corpus=corpus.subset([6, 7]), dims=tiny_dims) for _ in range(2)]
    assert runs[0].history.to_dict() == runs[1].history.to_dict()
    a, b = runs[0].model.snapshot(), runs[1].model.snapshot()
    assert all(np.array_equal(a[k], b[k]) for k in a)


def test_training_rejects_the_wrong_channel(fixture_data, vocab, tiny_dims, tiny_embeddings):
    short = fixture_data[0]
    with pytest.raises(ContractViolation):
        train("cnn", short, fast_config(direction=LONG_TO_SHORT), vocab, tiny_embeddings, dims=tiny_dims)


def test_selected_epoch_has_the_best_dev_accuracy(fixture_data, vocab, tiny_dims, tiny_embeddings):
    long = fixture_data[1]
    cfg = fast_config(max_epochs=4, patience=4)
    result = train("letranets", long.subset(range(6)), cfg, vocab, tiny_embeddings,
                   dev_corpus=long.subset([6, 7]), dims=tiny_dims)
    history = result.history
    accs = [e.dev_accuracy for e in history.full_epochs()]
    assert history.best_dev_accuracy == max(accs)
    assert history.selected_epoch == accs.index(max(accs))
    assert [e.stage for e in history.epochs[:3]] == ["stage1", "stage2", "stage3"]


def test_non_finite_embeddings_diverge(fixture_data, vocab, tiny_dims, tiny_embeddings):
    embeddings = tiny_embeddings.copy()
    embeddings[2:] = np.nan
    with pytest.raises(TrainingDivergedError) as info:
        train("cnn", fixture_data[1], fast_config(), vocab, embeddings, dims=tiny_dims)
    assert info.value.last_good is not None
    assert info.value.epoch == 0


def test_cnn_learns_a_synthetic_lexicon():
    short, _, _ = gen_synthetic(SyntheticConfig(vocab_size=30, positive_lexicon_size=5, negative_lexicon_size=5,
                                                injection_rate=0.5, noise_rate=0.0, short_length=(6, 10),
                                                n_short=60, n_long=2, seed=1))
    vocab = build_vocab([inst.tokens for inst in short.instances], min_count=1)
    dims = ModelDims(vocab_size=len(vocab), num_classes=2, embedding_dim=8, widths=(2, 3), maps=8,
                     attention_dim=4, dropout=0.0)
    embeddings = random_embeddings(len(vocab), 8, seed=0, init_range=0.5)
    cfg = TrainConfig(direction=SHORT_TO_LONG, batch_size=2, max_epochs=10, seed=2)
    result = train("cnn", short, cfg, vocab, embeddings, dims=dims)
    losses = [e.losses["total"] for e in result.history.full_epochs()]
    assert len(losses) == 10
    assert losses[-1] < losses[0]
    bags = prepare_bags(short, vocab)
    assert accuracy(predict_all(result.model, bags), gold_labels(bags)) >= 0.95


def test_short_trained_baggedcnn_pools_by_the_mean(fixture_data, vocab, tiny_dims, tiny_embeddings):
    short = fixture_data[0]
    assert training_dims("baggedcnn", SHORT_TO_LONG, tiny_dims).pooling == MEAN_POOLING
    assert training_dims("baggedcnn", LONG_TO_SHORT, tiny_dims) == tiny_dims
    assert training_dims("letranets", SHORT_TO_LONG, tiny_dims) == tiny_dims

    result = train("baggedcnn", short, fast_config(direction=SHORT_TO_LONG), vocab, tiny_embeddings, dims=tiny_dims)
    assert result.model.dims.pooling == MEAN_POOLING
    bags = prepare_bags(short, vocab)
    long_text = Bag(segments=tuple(b.segments[0] for b in bags[:3]), label=1)
    weights = result.model.forward(long_text).weights.data
    np.testing.assert_allclose(weights, [1 / 3, 1 / 3, 1 / 3])


@pytest.mark.parametrize("direction, standalone_kind", [
    (LONG_TO_SHORT, "baggedcnn"),
    (SHORT_TO_LONG, "cnn"),
])
def test_switched_off_letranets_strong_path_matches_a_standalone_model(direction, standalone_kind, fixture_data,
                                                                       vocab, tiny_dims, tiny_embeddings):
    short, long, _ = fixture_data
    source, target = (long, short) if direction == LONG_TO_SHORT else (short, long)
    cfg = fast_config(direction=direction, lambda_=0.0, joint_training=False, prediction_regularization=False,
                      stepwise_pretraining=False, train_embeddings=False)
    dims = replace(tiny_dims, dropout=0.0)
    letra = build_model("letranets", dims, tiny_embeddings, seed=3, train_embeddings=False, use_joint=False)
    alone = build_model(standalone_kind, dims, tiny_embeddings, seed=4, train_embeddings=False)
    strong_path = letra.lone_path() if pr_detach_direction(direction)[0] == LONE else letra.bag_path()
    alone_path = alone.parameters()[1:]
    assert [p.shape for p in strong_path] == [p.shape for p in alone_path]
    for mine, theirs in zip(strong_path, alone_path):
        theirs.data[...] = mine.data

    examples = prepare_bags(source, vocab)
    for model in (letra, alone):
        optimizer = Adadelta(model.parameters())
        for epoch in range(3):
            run_epoch(model, examples, cfg, full_phase(model, cfg), optimizer, epoch)

    for mine, theirs in zip(strong_path, alone_path):
        np.testing.assert_allclose(mine.data, theirs.data, rtol=1e-9, atol=1e-12)
    for bag in prepare_bags(target, vocab):
        out = letra.forward(bag)
        strong = out.doc_lone if pr_detach_direction(direction)[0] == LONE else out.doc_bag
        np.testing.assert_allclose(strong.data, alone.predict_proba(bag), rtol=1e-9, atol=1e-12)
        assert int(np.argmax(strong.data)) == alone.predict(bag)


# -----------------------------------------------------------------------------
# Lambda selection and switches
# -----------------------------------------------------------------------------

def test_select_lambda_prefers_the_smaller_on_ties():
    assert select_lambda({0.01: 0.8, 0.1: 0.8, 1.0: 0.7}) == 0.01
    assert select_lambda({0.01: 0.6, 0.1: 0.9, 1.0: 0.9}) == 0.1
    with pytest.raises(ContractViolation):
        select_lambda({})


def test_singleton_grid_needs_no_training(fixture_data, vocab, tiny_embeddings):
    search = tune_lambda("letranets", [0.3], fixture_data[1], [], fast_config(), vocab, tiny_embeddings)
    assert search.best == 0.3
    assert search.scores == {}


def test_ablation_switches():
    cfg = TrainConfig()
    assert cfg.mechanisms == "JT+PR+SP"
    assert cfg.ablation("-").mechanisms == "-"
    assert cfg.ablation("PR").mechanisms == "PR"
    assert cfg.ablation("All").mechanisms == "JT+PR+SP"
    with pytest.raises(ValueError):
        cfg.ablation("XY")


# -----------------------------------------------------------------------------
# Gradient checks
# -----------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["cnn", "baggedcnn", "letranets"])
@pytest.mark.parametrize("direction", [LONG_TO_SHORT, SHORT_TO_LONG])
def test_loss_gradients_match_finite_differences(kind, direction):
    check = check_loss_gradients(kind, direction, lambda_=0.1, probe_count=60)
    assert check.result.max_relative_error < 1e-4, check.result.offending(1e-4)


def test_gradient_check_refuses_dropout():
    with pytest.raises(ContractViolation):
        check_loss_gradients("letranets", LONG_TO_SHORT, dropout=0.5)
