from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from clt.errors import ContractViolation


@dataclass(frozen=True)
class Instance:
    """One text: its tokens, optional vocabulary ids, and optional class label (0..C-1)."""
    tokens: Tuple[str, ...]
    label: Optional[int] = None
    ids: Optional[Tuple[int, ...]] = None

    @property
    def length(self) -> int:
        return len(self.tokens)

    def id_array(self) -> np.ndarray:
        if self.ids is None:
            raise ContractViolation("Instance has not been encoded against a vocabulary")
        return np.asarray(self.ids, dtype=np.int64)

    def with_ids(self, ids) -> 'Instance':
        return replace(self, ids=tuple(int(i) for i in ids))


@dataclass(frozen=True)
class Bag:
    """A long text as an ordered tuple of segment Instances, with an optional document label."""
    segments: Tuple[Instance, ...]
    label: Optional[int] = None

    def __post_init__(self):
        if not self.segments:
            raise ContractViolation("A bag needs at least one segment")

    @classmethod
    def from_instance(cls, instance: Instance) -> 'Bag':
        """Wrap a short text as a one-segment bag carrying the text's label."""
        return cls(segments=(instance,), label=instance.label)

    @property
    def num_segments(self) -> int:
        return len(self.segments)

    @property
    def tokens(self) -> Tuple[str, ...]:
        return tuple(t for s in self.segments for t in s.tokens)

    @property
    def length(self) -> int:
        return sum(s.length for s in self.segments)

    @property
    def segment_labels(self) -> Tuple[Optional[int], ...]:
        return tuple(s.label for s in self.segments)

    def segment_ids(self):
        return [s.id_array() for s in self.segments]

    def document_ids(self) -> np.ndarray:
        # Segments are joined without a separator token
        return np.concatenate(self.segment_ids())
