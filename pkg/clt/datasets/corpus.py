"""
Labeled corpus files.

Format: UTF-8, one record per line, `label<TAB>text`. Lines starting with `#`
are comments; blank lines are skipped. Labels are integers offset by
`label_base` (0 for 0-based files, 1 for 1..5 fine-grained files).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from clt.errors import ContractViolation, CorpusFormatError
from clt.textproc import Instance, tokenize
from clt.utils.logging.component_loggers import get_data_logger, log_data_event

logger = get_data_logger(__name__)

SHORT = "short"
LONG = "long"
CHANNELS = (SHORT, LONG)


@dataclass
class Corpus:
    instances: List[Instance]
    channel: str
    num_classes: int
    name: str = "corpus"
    unlabeled: List[List[str]] = field(default_factory=list)
    label_base: int = 0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ContractViolation(f"Unknown channel {self.channel!r}; expected one of {CHANNELS}")
        if self.num_classes not in (2, 5):
            raise ContractViolation(f"num_classes must be 2 or 5, got {self.num_classes}")
        for i, inst in enumerate(self.instances):
            if inst.label is None or not 0 <= inst.label < self.num_classes:
                raise ContractViolation(f"{self.name}: instance {i} has label {inst.label} outside 0..{self.num_classes - 1}")

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def labels(self) -> np.ndarray:
        return np.asarray([inst.label for inst in self.instances], dtype=np.int64)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray([inst.length for inst in self.instances], dtype=np.int64)

    @property
    def mean_length(self) -> float:
        return float(self.lengths.mean()) if self.instances else 0.0

    def subset(self, indices: Sequence[int]) -> 'Corpus':
        return Corpus(
            instances=[self.instances[int(i)] for i in indices],
            channel=self.channel,
            num_classes=self.num_classes,
            name=self.name,
            unlabeled=self.unlabeled,
            label_base=self.label_base,
        )

    def label_histogram(self) -> List[int]:
        return np.bincount(self.labels, minlength=self.num_classes).tolist()


def parse_record(line: str, num_classes: int, label_base: int, path: str, line_number: int) -> Instance:
    if '\t' not in line:
        raise CorpusFormatError("expected `label<TAB>text`", path=path, line_number=line_number)
    raw_label, text = line.split('\t', 1)
    try:
        label = int(raw_label.strip()) - label_base
    except ValueError:
        raise CorpusFormatError(f"label {raw_label.strip()!r} is not an integer", path=path, line_number=line_number)
    if not 0 <= label < num_classes:
        raise CorpusFormatError(
            f"label {label + label_base} outside {label_base}..{num_classes - 1 + label_base}",
            path=path, line_number=line_number,
        )
    return Instance(tokens=tuple(tokenize(text)), label=label)


def load_corpus(
    path: str,
    channel: str,
    num_classes: int,
    label_base: int = 0,
    name: str = None,
) -> Corpus:
    """
    Read a `label<TAB>text` corpus file.

    Args:
        path: Corpus file
        channel: 'short' or 'long'
        num_classes: 2 (polarity) or 5 (fine-grained)
        label_base: 1 when the file stores fine-grained labels as 1..5

    Returns:
        Corpus with tokenized instances

    Raises:
        CorpusFormatError: on a malformed line or an out-of-range label (names the line)
    """
    instances, blank, empty_text = [], 0, 0
    with open(path, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip('\n').rstrip('\r')
            if not line.strip():
                blank += 1
                continue
            if line.startswith('#'):
                continue
            instance = parse_record(line, num_classes, label_base, path, line_number)
            if not instance.tokens:
                empty_text += 1
                logger.warning(f"{path}:{line_number}: empty text skipped",
                               extra={'action': 'empty_text_skipped', 'path': path, 'line_number': line_number})
                continue
            instances.append(instance)

    corpus = Corpus(
        instances=instances,
        channel=channel,
        num_classes=num_classes,
        name=name or Path(path).stem,
        label_base=label_base,
    )
    log_data_event(
        logger,
        f"Loaded {len(instances)} {channel} instances from {path} "
        f"({blank} blank lines, {empty_text} empty texts skipped)",
        path=path,
        action="corpus_loaded",
        instances=len(instances),
        blank_lines=blank,
        empty_texts=empty_text,
        mean_length=round(corpus.mean_length, 2),
    )
    return corpus


def load_unlabeled(path: str) -> List[List[str]]:
    """One raw text per line; blank lines and `#` comments skipped."""
    texts = []
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            tokens = tokenize(line)
            if tokens:
                texts.append(tokens)
    log_data_event(logger, f"Loaded {len(texts)} unlabeled texts from {path}", path=path, action="unlabeled_loaded")
    return texts


def format_record(instance: Instance, label_base: int = 0) -> str:
    return f"{instance.label + label_base}\t{' '.join(instance.tokens)}"


def write_corpus(corpus: Corpus, path: str) -> int:
    """Export in the same `label<TAB>text` format; returns the number of data lines."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for inst in corpus.instances:
            f.write(format_record(inst, corpus.label_base) + '\n')
    return len(corpus.instances)


def write_unlabeled(texts: Iterable[Sequence[str]], path: str) -> int:
    count = 0
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for tokens in texts:
            f.write(' '.join(tokens) + '\n')
            count += 1
    return count
