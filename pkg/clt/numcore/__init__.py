from clt.numcore.tensor import (
    DetachedValues,
    Parameter,
    Tensor,
    default_dtype,
    frozen_detach,
    get_default_dtype,
    set_default_dtype,
    zero_grads,
)
from clt.numcore.ops import (
    add,
    argmax,
    concat,
    conv1d_maxpool,
    cross_entropy,
    dropout,
    embedding_lookup,
    kl_divergence,
    linear,
    matvec,
    mean,
    scale,
    softmax,
    stack,
    tanh,
    total,
    weighted_sum,
)
from clt.numcore.optim import Adadelta, AdadeltaState, adadelta_step, maxnorm_constrain
from clt.numcore.gradcheck import GradCheckResult, analytic_gradients, compare_gradients, grad_check

__all__ = [
    "DetachedValues", "Parameter", "Tensor", "default_dtype", "frozen_detach", "get_default_dtype",
    "set_default_dtype", "zero_grads",
    "add", "argmax", "concat", "conv1d_maxpool", "cross_entropy", "dropout", "embedding_lookup",
    "kl_divergence", "linear", "matvec", "mean", "scale", "softmax", "stack", "tanh",
    "total", "weighted_sum",
    "Adadelta", "AdadeltaState", "adadelta_step", "maxnorm_constrain",
    "GradCheckResult", "analytic_gradients", "compare_gradients", "grad_check",
]
