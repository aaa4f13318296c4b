import numpy as np
import pytest

from clt.datasets import gradcheck_fixture, random_embeddings
from clt.models import ModelDims, build_model
from clt.textproc import Bag, Instance


@pytest.fixture
def fixture_data():
    """(short corpus, long corpus, vocabulary) of the bundled eight-text fixture."""
    return gradcheck_fixture()


@pytest.fixture
def vocab(fixture_data):
    return fixture_data[2]


@pytest.fixture
def tiny_dims(vocab):
    return ModelDims(vocab_size=len(vocab), num_classes=2, embedding_dim=6, widths=(2, 3),
                     maps=3, attention_dim=4, dropout=0.5)


@pytest.fixture
def tiny_embeddings(vocab, tiny_dims):
    return random_embeddings(len(vocab), tiny_dims.embedding_dim, seed=0, init_range=0.5)


@pytest.fixture
def make_model(tiny_dims, tiny_embeddings):
    def _make(kind, seed=0, **options):
        return build_model(kind, tiny_dims, tiny_embeddings, seed=seed, **options)
    return _make


@pytest.fixture
def make_bag(vocab):
    """Encode whitespace-separated segments into a labelled bag."""
    def _make(*segments, label=1):
        instances = tuple(vocab.encode_instance(Instance(tokens=tuple(s.split()), label=label)) for s in segments)
        return Bag(segments=instances, label=label)
    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quiet_cli(monkeypatch):
    """Keep CLI runs from writing log files or console output."""
    monkeypatch.setenv("CLT_LOG_FILE", "false")
    monkeypatch.setenv("CLT_LOG_CONSOLE", "false")
