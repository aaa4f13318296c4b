import hashlib
from typing import Union

import numpy as np

Purpose = Union[str, int, float]


def _key(part: Purpose) -> int:
    if isinstance(part, (int, np.integer)) and not isinstance(part, bool) and part >= 0:
        return int(part)
    digest = hashlib.sha256(repr(part).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


def derive_seed(root_seed: int, *purpose: Purpose) -> int:
    """
    Deterministic 64-bit sub-seed for a purpose path such as ("shuffle", fold, epoch).

    Different purpose paths give statistically independent streams; the same
    path always gives the same seed.
    """
    seq = np.random.SeedSequence([int(root_seed)] + [_key(p) for p in purpose])
    low, high = seq.generate_state(2, dtype=np.uint32)
    return int(low) | (int(high) << 32)


def derive_rng(root_seed: int, *purpose: Purpose) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root_seed, *purpose))
