"""
Pretrained word vectors in text format: `token v1 ... vD` per line.

Rows for vocabulary tokens found in the file are copied; every other row
(including UNK) is drawn uniformly from (-r, r); the PAD row is all zeros.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from clt.config import EMBEDDING_DIM, EMBEDDING_INIT_RANGE, PAD_ID, UNK_ID
from clt.errors import EmbeddingFormatError
from clt.textproc import Vocabulary
from clt.utils.logging.component_loggers import get_data_logger, log_data_event

logger = get_data_logger(__name__)


@dataclass
class EmbeddingLoadResult:
    matrix: np.ndarray
    found: int
    missing_tokens: List[str] = field(default_factory=list)
    duplicates: int = 0

    @property
    def coverage(self) -> float:
        total = self.found + len(self.missing_tokens)
        return self.found / total if total else 0.0

    @property
    def oov_rate(self) -> float:
        return 1.0 - self.coverage


def random_embeddings(
    vocab_size: int,
    dim: int = EMBEDDING_DIM,
    seed: int = 0,
    init_range: float = EMBEDDING_INIT_RANGE,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-init_range, init_range, size=(vocab_size, dim))
    matrix[PAD_ID] = 0.0
    return matrix


def _is_header(parts: List[str]) -> bool:
    # word2vec-style "count dim" first line
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_embeddings(
    path: str,
    vocab: Vocabulary,
    dim: int = EMBEDDING_DIM,
    seed: int = 0,
    init_range: float = EMBEDDING_INIT_RANGE,
) -> EmbeddingLoadResult:
    """
    Build a [V x dim] embedding matrix for `vocab` from a text-format vector file.

    Raises:
        EmbeddingFormatError: when any line has a dimension other than `dim` or a non-numeric value
    """
    matrix = random_embeddings(len(vocab), dim=dim, seed=seed, init_range=init_range)
    seen, duplicates = set(), 0

    with open(path, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.rstrip('\n').rstrip(' ').split(' ')
            if not parts or parts == ['']:
                continue
            if line_number == 1 and _is_header(parts):
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"expected {dim} values for {token!r}, found {len(values)}",
                    path=path, line_number=line_number,
                )
            if token in seen:
                duplicates += 1
                logger.warning(f"{path}:{line_number}: duplicate vector for {token!r}; keeping the first",
                               extra={'action': 'duplicate_vector', 'path': path, 'line_number': line_number})
                continue
            seen.add(token)
            idx = vocab.token_to_id.get(token)
            if idx is None or idx in (PAD_ID, UNK_ID):
                continue
            try:
                matrix[idx] = np.asarray(values, dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(f"non-numeric value in vector for {token!r}",
                                           path=path, line_number=line_number)

    regular = vocab.id_to_token[2:]
    missing = [tok for tok in regular if tok not in seen]
    result = EmbeddingLoadResult(matrix=matrix, found=len(regular) - len(missing),
                                 missing_tokens=missing, duplicates=duplicates)
    log_data_event(
        logger,
        f"Loaded embeddings from {path}: coverage {result.coverage:.3f} "
        f"({result.found} found, {len(missing)} missing, {duplicates} duplicates)",
        path=path,
        action="embeddings_loaded",
        coverage=round(result.coverage, 4),
    )
    return result
