"""
Finite-difference gradient oracle.

Compares the tape's analytic gradients to central differences
(f(x+h) - f(x-h)) / 2h on sampled parameter coordinates. Relative error per
coordinate is |a - n| / max(|a|, |n|, 1e-6).

Stop-gradient references (`Tensor.detach()`) are recorded on the analytic pass
and replayed unchanged on every perturbed evaluation, so both sides
differentiate the same objective.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from clt.config import GRADCHECK_PROBES, GRADCHECK_STEP
from clt.errors import ContractViolation, NonFiniteError
from clt.numcore.tensor import DetachedValues, Parameter, Tensor, frozen_detach
from clt.utils.logging.component_loggers import get_numcore_logger

logger = get_numcore_logger(__name__)

RELATIVE_FLOOR = 1e-6  # denominator floor for near-zero gradients

LossFn = Callable[[], Tensor]


@dataclass
class ProbeResult:
    parameter: str
    index: Tuple[int, ...]
    analytic: float
    numeric: float
    relative_error: float


@dataclass
class GradCheckResult:
    max_relative_error: float
    probes: List[ProbeResult] = field(default_factory=list)

    @property
    def worst(self) -> ProbeResult:
        return max(self.probes, key=lambda r: r.relative_error)

    def per_parameter(self) -> Dict[str, float]:
        errors: Dict[str, float] = {}
        for r in self.probes:
            errors[r.parameter] = max(errors.get(r.parameter, 0.0), r.relative_error)
        return errors

    def offending(self, tolerance: float) -> List[str]:
        return sorted(name for name, err in self.per_parameter().items() if err >= tolerance)


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), RELATIVE_FLOOR)


def _scalar_loss(loss_fn: LossFn) -> float:
    value = loss_fn()
    if value.size != 1:
        raise ContractViolation(f"gradient check needs a scalar loss, got shape {value.shape}")
    return float(value.data)


def analytic_gradients(loss_fn: LossFn, params: Sequence[Parameter]) -> Dict[str, np.ndarray]:
    """Run one forward/backward pass and return a copy of every parameter's gradient."""
    for p in params:
        if p.data.dtype != np.float64:
            raise ContractViolation(f"gradient check requires float64 parameters, {p.name} is {p.data.dtype}")
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    return {p.name: p.grad.copy() for p in params}


def _probe_plan(params: Sequence[Parameter], probe_count: int, rng: np.random.Generator):
    """Spread probes over parameters; small parameters are checked exhaustively."""
    total_size = sum(p.size for p in params)
    if probe_count >= total_size:
        return [(p, np.unravel_index(i, p.shape)) for p in params for i in range(p.size)]

    plan = []
    quota = max(1, probe_count // len(params))
    for p in params:
        if p.size <= quota:
            picks = range(p.size)
        else:
            picks = rng.choice(p.size, size=quota, replace=False)
        plan.extend((p, np.unravel_index(int(i), p.shape)) for i in picks)
    return plan


def compare_gradients(
    loss_fn: LossFn,
    params: Sequence[Parameter],
    analytic: Dict[str, np.ndarray],
    probe_count: int = GRADCHECK_PROBES,
    h: float = GRADCHECK_STEP,
    rng: np.random.Generator = None,
) -> GradCheckResult:
    """Compare supplied analytic gradients to central differences on sampled coordinates."""
    if not params:
        raise ContractViolation("gradient check needs at least one parameter")
    rng = rng or np.random.default_rng(0)

    results = []
    for p, index in _probe_plan(params, probe_count, rng):
        original = p.data[index].copy()
        p.data[index] = original + h
        f_plus = _scalar_loss(loss_fn)
        p.data[index] = original - h
        f_minus = _scalar_loss(loss_fn)
        p.data[index] = original

        numeric = (f_plus - f_minus) / (2.0 * h)
        a = float(analytic[p.name][index])
        if not (np.isfinite(numeric) and np.isfinite(a)):
            raise NonFiniteError(f"Non-finite gradient at {p.name}{tuple(int(i) for i in index)}", name=p.name)
        results.append(ProbeResult(
            parameter=p.name,
            index=tuple(int(i) for i in index),
            analytic=a,
            numeric=float(numeric),
            relative_error=relative_error(a, numeric),
        ))

    result = GradCheckResult(max_relative_error=max(r.relative_error for r in results), probes=results)
    worst = result.worst
    logger.debug(
        f"Gradient check over {len(results)} probes: max relative error {result.max_relative_error:.3e} "
        f"at {worst.parameter}{worst.index}",
        extra={'action': 'gradcheck_complete', 'parameter': worst.parameter}
    )
    return result


def grad_check(
    loss_fn: LossFn,
    params: Sequence[Parameter],
    probe_count: int = GRADCHECK_PROBES,
    h: float = GRADCHECK_STEP,
    rng: np.random.Generator = None,
) -> GradCheckResult:
    """
    Analytic-versus-numeric gradient comparison for a deterministic scalar loss.

    Args:
        loss_fn: Zero-argument callable building the loss from the current parameter values;
            must be deterministic (no dropout, fixed data)
        params: Parameters to probe; all must be float64
        probe_count: Number of sampled coordinates (all coordinates when at least the total size)
        h: Central-difference step
        rng: Generator for coordinate sampling

    Returns:
        GradCheckResult whose `max_relative_error` is the headline number
    """
    with frozen_detach(DetachedValues()) as detached:
        analytic = analytic_gradients(loss_fn, params)

        def replayed_loss() -> Tensor:
            detached.rewind()
            return loss_fn()

        return compare_gradients(replayed_loss, params, analytic, probe_count=probe_count, h=h, rng=rng)
