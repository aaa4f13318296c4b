from clt.datasets.corpus import (
    CHANNELS,
    LONG,
    SHORT,
    Corpus,
    load_corpus,
    load_unlabeled,
    write_corpus,
    write_unlabeled,
)
from clt.datasets.embeddings import EmbeddingLoadResult, load_embeddings, random_embeddings
from clt.datasets.folds import FoldPlan, FoldSplit, kfold_split
from clt.datasets.fixtures import gradcheck_fixture
from clt.datasets.synthetic import Lexicon, SyntheticConfig, SyntheticGenerator, gen_synthetic, lexicon_predict

__all__ = [
    "CHANNELS", "LONG", "SHORT", "Corpus", "load_corpus", "load_unlabeled", "write_corpus", "write_unlabeled",
    "EmbeddingLoadResult", "load_embeddings", "random_embeddings",
    "FoldPlan", "FoldSplit", "kfold_split", "gradcheck_fixture",
    "Lexicon", "SyntheticConfig", "SyntheticGenerator", "gen_synthetic", "lexicon_predict",
]
