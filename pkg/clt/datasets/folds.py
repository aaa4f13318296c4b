from dataclasses import dataclass
from typing import List, Sized, Union

import numpy as np

from clt.config import DEV_FRACTION, NUM_FOLDS
from clt.errors import ContractViolation


@dataclass(frozen=True)
class FoldPlan:
    k: int = NUM_FOLDS
    seed: int = 0
    dev_fraction: float = DEV_FRACTION

    def __post_init__(self):
        if self.k < 2:
            raise ContractViolation(f"k-fold cross-validation needs k >= 2, got {self.k}")
        if not 0.0 <= self.dev_fraction < 1.0:
            raise ContractViolation(f"dev_fraction must lie in [0, 1), got {self.dev_fraction}")

    def assignment(self, n: int) -> np.ndarray:
        """Fold id for every instance index: seeded shuffle, then k contiguous blocks."""
        if n < self.k:
            raise ContractViolation(f"Cannot split {n} instances into {self.k} folds")
        order = np.random.default_rng(self.seed).permutation(n)
        fold_of = np.empty(n, dtype=np.int64)
        for f, block in enumerate(np.array_split(order, self.k)):
            fold_of[block] = f
        return fold_of


@dataclass(frozen=True)
class FoldSplit:
    fold: int
    train: np.ndarray
    dev: np.ndarray
    test: np.ndarray


def kfold_split(data: Union[int, Sized], plan: FoldPlan = FoldPlan()) -> List[FoldSplit]:
    """
    Train/dev/test index sets for every fold of a corpus (or of `data` indices).

    Fold f is the test set; a seeded `dev_fraction` of the remaining indices is
    the development set and the rest is training data.
    """
    n = data if isinstance(data, int) else len(data)
    fold_of = plan.assignment(n)
    splits = []
    for f in range(plan.k):
        test = np.flatnonzero(fold_of == f)
        rest = np.flatnonzero(fold_of != f)
        shuffled = np.random.default_rng([plan.seed, f]).permutation(rest)
        n_dev = int(round(plan.dev_fraction * len(rest)))
        splits.append(FoldSplit(
            fold=f,
            train=np.sort(shuffled[n_dev:]),
            dev=np.sort(shuffled[:n_dev]),
            test=test,
        ))
    return splits
