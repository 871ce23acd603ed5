"""Minimal differentiable computation substrate."""

from .tensor import Tensor, as_tensor, concat, gather_rows, log_softmax, matmul, no_grad, softmax
from .blocks import (
    GruParams,
    Parameter,
    ParameterBag,
    additive_attention,
    conv1d_same,
    dense,
    dropout,
    embedding_lookup,
    gru_sequence,
    multi_head_self_attention,
    personalized_attention,
)
from .gradcheck import GradCheckReport, grad_check
from .optim import Adam
from .checkpoint import LoadReport, load_checkpoint, load_into, save_checkpoint

__all__ = [
    "Adam",
    "GradCheckReport",
    "GruParams",
    "LoadReport",
    "Parameter",
    "ParameterBag",
    "Tensor",
    "additive_attention",
    "as_tensor",
    "concat",
    "conv1d_same",
    "dense",
    "dropout",
    "embedding_lookup",
    "gather_rows",
    "grad_check",
    "gru_sequence",
    "load_checkpoint",
    "load_into",
    "log_softmax",
    "matmul",
    "multi_head_self_attention",
    "no_grad",
    "personalized_attention",
    "save_checkpoint",
    "softmax",
]
