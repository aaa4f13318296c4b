"""
Dense tensors with a reverse-mode tape.

A Tensor wraps a numpy array. Operations in `clt.numcore.ops` record their
parents and a backward closure on the result; `Tensor.backward()` walks the
recorded graph in reverse topological order and accumulates gradients.
Parameters are leaf tensors that always own a gradient buffer.
"""

import threading
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clt.config import DEFAULT_DTYPE
from clt.errors import ContractViolation

_dtype_state = {'dtype': np.dtype(DEFAULT_DTYPE)}
_detach_state = threading.local()


def get_default_dtype() -> np.dtype:
    return _dtype_state['dtype']


def set_default_dtype(dtype) -> None:
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype('float32'), np.dtype('float64')):
        raise ContractViolation(f"Unsupported dtype: {dtype}")
    _dtype_state['dtype'] = dtype


@contextmanager
def default_dtype(dtype):
    """Temporarily switch the dtype used for new tensors and parameters."""
    previous = get_default_dtype()
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(previous)


class DetachedValues:
    """
    Values returned by `Tensor.detach()` on a recorded pass, handed back in
    call order on replayed passes.

    Within `frozen_detach(values)` the first pass records; after `rewind()`
    each `detach()` returns the recorded array instead of the current one, so
    a stop-gradient reference stays at the value it had when recorded.
    """

    def __init__(self):
        self.values: List[np.ndarray] = []
        self.cursor: Optional[int] = None

    def rewind(self) -> None:
        self.cursor = 0

    def take(self, data: np.ndarray) -> np.ndarray:
        if self.cursor is None:
            self.values.append(np.array(data, copy=True))
            return data
        if self.cursor >= len(self.values):
            raise ContractViolation(f"replayed pass detached more than the {len(self.values)} recorded tensors")
        value = self.values[self.cursor]
        if value.shape != data.shape:
            raise ContractViolation(f"replayed detach #{self.cursor} has shape {data.shape}, recorded {value.shape}")
        self.cursor += 1
        return value


@contextmanager
def frozen_detach(values: DetachedValues):
    """Route every `detach()` in this thread through `values`."""
    previous = getattr(_detach_state, 'values', None)
    _detach_state.values = values
    try:
        yield values
    finally:
        _detach_state.values = previous


class Tensor:
    __slots__ = ('data', 'grad', 'requires_grad', '_parents', '_backward', 'name')

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        parents: Sequence['Tensor'] = (),
        backward_fn: Optional[Callable[[np.ndarray], None]] = None,
        name: str = None,
        dtype=None,
    ):
        self.data = np.asarray(data, dtype=dtype or get_default_dtype())
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = tuple(parents)
        self._backward = backward_fn
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        return float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> 'Tensor':
        """Same values, cut from the graph: nothing flows back through the result."""
        replay = getattr(_detach_state, 'values', None)
        data = self.data if replay is None else replay.take(self.data)
        return Tensor(data, requires_grad=False, dtype=self.data.dtype)

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True).reshape(self.data.shape)
        else:
            self.grad += grad

    def backward(self, grad: np.ndarray = None) -> None:
        if not self.requires_grad:
            raise ContractViolation("backward() called on a tensor that does not require grad")
        if grad is None:
            if self.size != 1:
                raise ContractViolation(f"backward() without a seed needs a scalar, got shape {self.shape}")
            grad = np.ones_like(self.data)

        order = _topological_order(self)
        self.accumulate_grad(grad)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __add__(self, other: 'Tensor') -> 'Tensor':
        from clt.numcore.ops import add
        return add(self, other)

    def __mul__(self, scalar: float) -> 'Tensor':
        from clt.numcore.ops import scale
        return scale(self, scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> 'Tensor':
        from clt.numcore.ops import scale
        return scale(self, 1.0 / scalar)

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"


class Parameter(Tensor):
    """Trainable leaf tensor with a persistent gradient buffer."""

    __slots__ = ('trainable',)

    def __init__(self, data, name: str, trainable: bool = True, dtype=None):
        super().__init__(data, requires_grad=True, name=name, dtype=dtype)
        self.trainable = trainable
        self.grad = np.zeros_like(self.data)

    @property
    def value(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        self.grad.fill(0.0)

    def accumulate_grad(self, grad: np.ndarray) -> None:
        self.grad += grad

    def __repr__(self):
        return f"Parameter(name={self.name!r}, shape={self.shape}, trainable={self.trainable})"


def zero_grads(params: Iterable[Parameter]) -> None:
    for p in params:
        p.zero_grad()


def _topological_order(root: Tensor):
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order
