"""Shared setup for subcommands: inputs, vocabulary, embeddings, manifests and metrics streams."""

import json
import platform
import uuid
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import pydantic

from clt.config import MANIFEST_FILENAME, METRICS_FILENAME
from clt.config.seeding import derive_seed
from clt.config.settings import RunConfig
from clt.datasets import LONG, SHORT, Corpus, load_corpus, load_embeddings, load_unlabeled, random_embeddings
from clt.models import ModelDims
from clt.textproc import Vocabulary, build_vocab
from clt.training import LONG_TO_SHORT
from clt.utils.file_handlers import format_file_size, hash_inputs, require_readable
from clt.utils.logging.component_loggers import get_cli_logger, log_data_event
from clt.utils.logging.logging_config import attach_metrics_stream, detach_metrics_stream

logger = get_cli_logger(__name__)


def new_run_id() -> str:
    return uuid.uuid4().hex[:12]


def channels_for(direction: str) -> Tuple[str, str]:
    """(source channel, target channel)."""
    return (LONG, SHORT) if direction == LONG_TO_SHORT else (SHORT, LONG)


def load_input_corpus(path: str, channel: str, cfg: RunConfig) -> Corpus:
    require_readable(path, f"{channel} corpus")
    size = format_file_size(Path(path).stat().st_size)
    log_data_event(logger, f"Reading {channel} corpus {path} ({size})", path=path, action="corpus_read")
    return load_corpus(path, channel, cfg.num_classes, label_base=cfg.label_base)


def load_corpora(cfg: RunConfig) -> Tuple[Corpus, Corpus]:
    """(short, long) corpora from the configured source and target paths."""
    source_channel, target_channel = channels_for(cfg.direction)
    source = load_input_corpus(cfg.source, source_channel, cfg)
    target = load_input_corpus(cfg.target, target_channel, cfg)
    return (source, target) if source_channel == SHORT else (target, source)


def build_run_vocab(cfg: RunConfig, source: Corpus) -> Vocabulary:
    """Vocabulary from source-channel texts plus the optional unlabeled pool."""
    texts = [inst.tokens for inst in source.instances]
    if cfg.unlabeled:
        require_readable(cfg.unlabeled, "unlabeled text file")
        texts.extend(load_unlabeled(cfg.unlabeled))
    texts.extend(source.unlabeled)
    return build_vocab(texts, min_count=cfg.min_count)


def build_run_embeddings(cfg: RunConfig, vocab: Vocabulary) -> np.ndarray:
    seed = derive_seed(cfg.seed, "embeddings")
    if cfg.embeddings:
        require_readable(cfg.embeddings, "embedding file")
        return load_embeddings(cfg.embeddings, vocab, dim=cfg.embedding_dim, seed=seed).matrix
    return random_embeddings(len(vocab), cfg.embedding_dim, seed=seed)


def run_dims(cfg: RunConfig, vocab: Vocabulary) -> ModelDims:
    return ModelDims(
        vocab_size=len(vocab), num_classes=cfg.num_classes, embedding_dim=cfg.embedding_dim,
        widths=tuple(cfg.widths), maps=cfg.maps, attention_dim=cfg.attention_dim,
        dropout=cfg.dropout, pooling=cfg.pooling,
    )


def write_json(path: Path, payload) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding='utf-8')
    return path


def write_manifest(out_dir: Path, command: str, cfg: RunConfig, run_id: str,
                   inputs: Sequence[Optional[str]] = ()) -> Path:
    """Config snapshot, root seed, content hashes of the run's input files and library versions."""
    manifest = {
        'command': command,
        'run_id': run_id,
        'seed': cfg.seed,
        'config': cfg.snapshot(),
        'inputs': hash_inputs(p for p in inputs if p),
        'versions': {
            'python': platform.python_version(),
            'numpy': np.__version__,
            'pandas': pd.__version__,
            'pydantic': pydantic.VERSION,
        },
    }
    return write_json(out_dir / MANIFEST_FILENAME, manifest)


@contextmanager
def metrics_stream(out_dir: Path) -> Iterator[Path]:
    """Attach the per-epoch metrics stream under `out_dir` for the duration of a run."""
    path = out_dir / METRICS_FILENAME
    handler = attach_metrics_stream(str(path))
    try:
        yield path
    finally:
        detach_metrics_stream(handler)
