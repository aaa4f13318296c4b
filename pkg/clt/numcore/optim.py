"""
Adadelta and the max-norm weight constraint.

Update rule (per element, rho / eps as configured):
    E[g^2]  <- rho E[g^2] + (1 - rho) g^2
    dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
    E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
    x       <- x + dx
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence

import numpy as np

from clt.config import ADADELTA_EPSILON, ADADELTA_RHO
from clt.errors import ContractViolation, NonFiniteError
from clt.numcore.tensor import Parameter


@dataclass
class AdadeltaState:
    """Running averages keyed by parameter name."""
    rho: float = ADADELTA_RHO
    epsilon: float = ADADELTA_EPSILON
    sq_grad: Dict[str, np.ndarray] = field(default_factory=dict)
    sq_delta: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ContractViolation(f"Adadelta rho must lie in (0, 1), got {self.rho}")
        if self.epsilon <= 0.0:
            raise ContractViolation(f"Adadelta epsilon must be positive, got {self.epsilon}")

    def ensure(self, param: Parameter) -> None:
        if param.name not in self.sq_grad:
            self.sq_grad[param.name] = np.zeros_like(param.data)
            self.sq_delta[param.name] = np.zeros_like(param.data)
        elif self.sq_grad[param.name].shape != param.shape:
            raise ContractViolation(
                f"Adadelta state for {param.name} has shape {self.sq_grad[param.name].shape}, "
                f"parameter has {param.shape}"
            )


def adadelta_step(params: Sequence[Parameter], state: AdadeltaState) -> AdadeltaState:
    """
    Apply one Adadelta update using each parameter's accumulated `.grad`.

    Non-trainable parameters are left untouched. The whole step is refused
    (nothing modified) if any trainable gradient is non-finite.
    """
    live = [p for p in params if p.trainable]
    for p in live:
        if not np.all(np.isfinite(p.grad)):
            raise NonFiniteError(f"Non-finite gradient for parameter {p.name}", name=p.name)

    rho, eps = state.rho, state.epsilon
    for p in live:
        state.ensure(p)
        eg = state.sq_grad[p.name]
        ed = state.sq_delta[p.name]
        g = p.grad
        eg *= rho
        eg += (1.0 - rho) * g * g
        delta = -np.sqrt(ed + eps) / np.sqrt(eg + eps) * g
        ed *= rho
        ed += (1.0 - rho) * delta * delta
        p.data += delta
    return state


class Adadelta:
    """Thin stateful wrapper so training loops can call `step()` / `zero_grad()`."""

    def __init__(self, params: Iterable[Parameter], rho: float = ADADELTA_RHO, epsilon: float = ADADELTA_EPSILON):
        self.params: List[Parameter] = list(params)
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ContractViolation("Adadelta needs uniquely named parameters")
        self.state = AdadeltaState(rho=rho, epsilon=epsilon)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        adadelta_step(self.params, self.state)


def maxnorm_constrain(matrix: Parameter, c: float) -> Parameter:
    """Rescale every row whose l2 norm exceeds `c` back onto the sphere of radius `c`."""
    if c <= 0:
        raise ContractViolation(f"max-norm bound must be positive, got {c}")
    if matrix.data.ndim != 2:
        raise ContractViolation(f"max-norm applies to 2-D parameters, {matrix.name} has shape {matrix.shape}")
    norms = np.linalg.norm(matrix.data, axis=1)
    over = norms > c
    if np.any(over):
        matrix.data[over] *= (c / norms[over])[:, None]
    return matrix
