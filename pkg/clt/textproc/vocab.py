"""
Token <-> id mapping shared by both encoders.

Ids 0 and 1 are reserved for padding and unknown tokens. Remaining ids are
assigned in descending frequency order, ties broken lexicographically.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np

from clt.config import MIN_COUNT, PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN
from clt.errors import ContractViolation
from clt.textproc.instances import Bag, Instance

RESERVED = (PAD_TOKEN, UNK_TOKEN)


@dataclass
class Vocabulary:
    id_to_token: List[str]
    min_count: int = MIN_COUNT
    token_to_id: Dict[str, int] = field(init=False)

    def __post_init__(self):
        if self.id_to_token[PAD_ID] != PAD_TOKEN or self.id_to_token[UNK_ID] != UNK_TOKEN:
            raise ContractViolation("Vocabulary must start with the reserved PAD and UNK tokens")
        self.token_to_id = {tok: i for i, tok in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ContractViolation("Vocabulary tokens must be unique")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def lookup(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        return np.fromiter((self.lookup(t) for t in tokens), dtype=np.int64, count=len(tokens))

    def encode_instance(self, instance: Instance) -> Instance:
        return instance.with_ids(self.encode(instance.tokens))

    def encode_bag(self, bag: Bag) -> Bag:
        return Bag(segments=tuple(self.encode_instance(s) for s in bag.segments), label=bag.label)

    def save(self, path: str) -> None:
        payload = {'min_count': self.min_count, 'tokens': self.id_to_token}
        Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding='utf-8')

    @classmethod
    def load(cls, path: str) -> 'Vocabulary':
        payload = json.loads(Path(path).read_text(encoding='utf-8'))
        return cls(id_to_token=list(payload['tokens']), min_count=int(payload['min_count']))


def build_vocab(corpora: Iterable[Sequence[str]], min_count: int = MIN_COUNT) -> Vocabulary:
    """
    Build a vocabulary from token lists.

    Only source-side training texts and unlabeled texts should be passed here.

    Raises:
        ContractViolation: if no token reaches `min_count`
    """
    if min_count < 1:
        raise ContractViolation(f"min_count must be at least 1, got {min_count}")
    counts = Counter()
    for tokens in corpora:
        counts.update(tokens)
    for reserved in RESERVED:
        counts.pop(reserved, None)

    kept = sorted((tok for tok, n in counts.items() if n >= min_count), key=lambda t: (-counts[t], t))
    if not kept:
        raise ContractViolation(
            f"Vocabulary would be empty: no token occurs at least {min_count} times"
        )
    return Vocabulary(id_to_token=[PAD_TOKEN, UNK_TOKEN] + kept, min_count=min_count)
