from typing import Sequence

import numpy as np

from clt.errors import ContractViolation


def _paired(predictions: Sequence[int], golds: Sequence[int]):
    preds = np.asarray(predictions)
    golds = np.asarray(golds)
    if preds.shape != golds.shape or preds.ndim != 1:
        raise ContractViolation(f"predictions {preds.shape} and golds {golds.shape} must be equal-length 1-D")
    if preds.size == 0:
        raise ContractViolation("metrics need at least one prediction")
    return preds, golds


def accuracy(predictions: Sequence[int], golds: Sequence[int]) -> float:
    preds, golds = _paired(predictions, golds)
    return float(np.count_nonzero(preds == golds)) / preds.size


def error_rate(predictions: Sequence[int], golds: Sequence[int]) -> float:
    preds, golds = _paired(predictions, golds)
    return float(np.count_nonzero(preds != golds)) / preds.size


def rmse(predictions: Sequence[int], golds: Sequence[int], num_classes: int = 5) -> float:
    """Root mean squared error of sentiment scores; only meaningful on the 5-point scale."""
    if num_classes != 5:
        raise ContractViolation(f"RMSE is reported for fine-grained (5-class) corpora only, got C={num_classes}")
    preds, golds = _paired(predictions, golds)
    diff = preds.astype(np.float64) - golds.astype(np.float64)
    return float(np.sqrt(np.mean(diff * diff)))


def transfer_loss(e_oc: float, e_ic: float) -> float:
    """Out-channel minus in-channel error, in percentage points."""
    for name, e in (("e_oc", e_oc), ("e_ic", e_ic)):
        if not 0.0 <= e <= 1.0:
            raise ContractViolation(f"{name}={e} is not an error fraction")
    return 100.0 * (e_oc - e_ic)


def transfer_ratio(transfer_errors: Sequence[float], baseline_errors: Sequence[float]) -> float:
    """Mean over datasets of transfer error divided by the in-domain baseline error."""
    errs = np.asarray(transfer_errors, dtype=np.float64)
    base = np.asarray(baseline_errors, dtype=np.float64)
    if errs.shape != base.shape or errs.ndim != 1 or errs.size == 0:
        raise ContractViolation("transfer_ratio needs equal-length non-empty error lists")
    if np.any(base == 0.0):
        raise ContractViolation("transfer ratio is undefined for a zero baseline error")
    return float(np.mean(errs / base))
