"""Differentiable building blocks for news and user encoders.

Every block is a pure function of tensors; trainable state lives in
:class:`Parameter` objects created through a :class:`ParameterBag`.
Blocks accept either a single sequence ``[n, d]`` or a batch of
sequences ``[m, n, d]`` where noted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import (
    Tensor,
    concat,
    gather_rows,
    grad_enabled,
    matmul,
    relu,
    reshape,
    sigmoid,
    softmax,
    tanh,
    transpose,
)


# ----------------------------------------------------------------------
# parameters

@dataclass
class Parameter:
    """Named trainable (or frozen) tensor with its initialization tag."""

    name: str
    tensor: Tensor
    init: str
    trainable: bool = True

    @property
    def data(self) -> np.ndarray:
        return self.tensor.data

    @property
    def shape(self) -> tuple:
        return self.tensor.shape


def glorot_uniform(shape: tuple, rng: np.random.Generator, dtype) -> np.ndarray:
    fan_in = shape[0] if len(shape) > 1 else shape[0]
    fan_out = shape[1] if len(shape) > 1 else 1
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def normal_init(shape: tuple, rng: np.random.Generator, dtype, std: float = 0.1) -> np.ndarray:
    return (rng.standard_normal(shape) * std).astype(dtype)


class ParameterBag:
    """Ordered registry of named parameters for one model.

    Names must be unique; creation order is the checkpoint and
    optimizer order, so model construction must be deterministic.
    """

    def __init__(self, rng: np.random.Generator, dtype=np.float64):
        self.rng = rng
        self.dtype = dtype
        self._params: dict[str, Parameter] = {}

    def add(self, name: str, shape: tuple, init: str = "uniform_glorot",
            trainable: bool = True, data: np.ndarray | None = None) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter name: {name}")
        if data is not None:
            arr = np.ascontiguousarray(data, dtype=self.dtype)
            if arr.shape != tuple(shape):
                raise ValueError(f"{name}: data shape {arr.shape} != {tuple(shape)}")
        elif init == "uniform_glorot":
            arr = glorot_uniform(tuple(shape), self.rng, self.dtype)
        elif init == "zeros":
            arr = np.zeros(shape, dtype=self.dtype)
        elif init == "normal":
            arr = normal_init(tuple(shape), self.rng, self.dtype)
        else:
            raise ValueError(f"unknown init: {init}")
        t = Tensor(arr, requires_grad=trainable)
        self._params[name] = Parameter(name, t, init if data is None else "pretrained", trainable)
        return t

    def parameters(self) -> list[Parameter]:
        return list(self._params.values())

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def zero_grad(self) -> None:
        for p in self._params.values():
            p.tensor.zero_grad()

    def count(self) -> dict:
        """Exact parameter counts: trainable, total and total byte size."""
        trainable = sum(p.tensor.size for p in self._params.values() if p.trainable)
        total = sum(p.tensor.size for p in self._params.values())
        nbytes = sum(p.tensor.data.nbytes for p in self._params.values())
        return {"trainable": int(trainable), "total": int(total), "bytes": int(nbytes)}

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {name: p.tensor.data for name, p in self._params.items()}


# ----------------------------------------------------------------------
# blocks

def dense(x: Tensor, w: Tensor, b: Tensor | None = None, activation: str | None = None) -> Tensor:
    out = matmul(x, w)
    if b is not None:
        out = out + b
    if activation == "relu":
        out = relu(out)
    elif activation == "tanh":
        out = tanh(out)
    elif activation is not None:
        raise ValueError(f"unknown activation: {activation}")
    return out


def embedding_lookup(table: Tensor, ids, pad_id: int = 0) -> Tensor:
    """Gather rows of ``table`` for ``ids``; pad rows are exactly zero.

    Rows selected by ``pad_id`` produce zero vectors and contribute no
    gradient to the table. ids may be any integer array shape; output
    shape is ``ids.shape + (d,)``.
    """
    idx = np.asarray(ids)
    vocab = table.shape[0]
    if idx.size and int(idx.max()) >= vocab:
        raise ValueError(f"embedding id {int(idx.max())} out of range (table has {vocab} rows)")
    if idx.size and int(idx.min()) < 0:
        raise ValueError(f"negative embedding id {int(idx.min())}")
    out = gather_rows(table, idx)
    keep = (idx != pad_id).astype(table.dtype)[..., None]
    return out * keep


def conv1d_same(x: Tensor, filters: Tensor, bias: Tensor, window: int) -> Tensor:
    """Same-length 1-D convolution over the sequence axis with ReLU.

    ``x`` is ``[n, d_in]`` or ``[m, n, d_in]``; ``filters`` is
    ``[window * d_in, d_out]`` laid out window-position-major; zero
    padding at the borders. ``window`` must be odd.
    """
    if window % 2 == 0 or window < 1:
        raise ValueError(f"conv window must be odd, got {window}")
    single = x.ndim == 2
    if single:
        x = reshape(x, (1,) + x.shape)
    m, n, d_in = x.shape
    half = window // 2
    if half:
        pad = Tensor(np.zeros((m, half, d_in), dtype=x.dtype))
        padded = concat([pad, x, pad], axis=1)
    else:
        padded = x
    # windows: [m, n, window, d_in] gathered along the sequence axis
    pos = np.arange(n)[:, None] + np.arange(window)[None, :]
    flat = reshape(transpose(padded, (1, 0, 2)), (n + 2 * half, m * d_in))
    windows = gather_rows(flat, pos)                      # [n, window, m*d_in]
    windows = reshape(windows, (n, window, m, d_in))
    windows = transpose(windows, (2, 0, 1, 3))            # [m, n, window, d_in]
    cols = reshape(windows, (m, n, window * d_in))
    out = relu(matmul(cols, filters) + bias)
    if single:
        out = reshape(out, out.shape[1:])
    return out


def additive_attention(h: Tensor, w: Tensor, q: Tensor,
                       mask: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """Attention pooling: scores ``q . tanh(h W)``, softmax, weighted sum.

    ``h`` is ``[n, d]`` or ``[m, n, d]``; ``mask`` (same leading shape as
    the scores) excludes positions from the softmax entirely. Returns the
    pooled output ``[d]`` / ``[m, d]`` and the attention weights.
    """
    single = h.ndim == 2
    if single:
        h = reshape(h, (1,) + h.shape)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)[None, :]
    if mask is not None and not np.asarray(mask).any(axis=-1).all():
        raise ValueError("additive_attention: fully masked input")
    m, n, d = h.shape
    scores = matmul(tanh(matmul(h, w)), q)        # [m, n]
    weights = softmax(scores, mask=mask)
    out = matmul(reshape(weights, (m, 1, n)), h)  # [m, 1, d]
    out = reshape(out, (m, d))
    if single:
        return reshape(out, (d,)), reshape(weights, (n,))
    return out, weights


def personalized_attention(h: Tensor, w: Tensor, query: Tensor,
                           mask: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """Additive attention whose query vector is supplied per batch row.

    ``h`` is ``[m, n, d]`` (or ``[n, d]``), ``query`` is ``[m, a]`` (or
    ``[a]``) so different rows attend with different queries.
    """
    single = h.ndim == 2
    if single:
        h = reshape(h, (1,) + h.shape)
        query = reshape(query, (1,) + query.shape)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)[None, :]
    if mask is not None and not np.asarray(mask).any(axis=-1).all():
        raise ValueError("personalized_attention: fully masked input")
    m, n, d = h.shape
    proj = tanh(matmul(h, w))                               # [m, n, a]
    scores = matmul(proj, reshape(query, (m, query.shape[-1], 1)))  # [m, n, 1]
    scores = reshape(scores, (m, n))
    weights = softmax(scores, mask=mask)
    out = reshape(matmul(reshape(weights, (m, 1, n)), h), (m, d))
    if single:
        return reshape(out, (d,)), reshape(weights, (n,))
    return out, weights


def multi_head_self_attention(h: Tensor, wq: Tensor, wk: Tensor, wv: Tensor,
                              heads: int, mask: np.ndarray | None = None) -> Tensor:
    """Scaled dot-product self-attention with ``heads`` heads.

    ``h`` is ``[n, d]`` or ``[m, n, d]`` with ``d`` divisible by
    ``heads``; scale is ``1/sqrt(d/heads)``. Masked positions are
    excluded as keys and zeroed in the output.
    """
    single = h.ndim == 2
    if single:
        h = reshape(h, (1,) + h.shape)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)[None, :]
    m, n, d = h.shape
    if d % heads != 0:
        raise ValueError(f"model dim {d} not divisible by {heads} heads")
    dh = d // heads

    def split(x):
        return transpose(reshape(x, (m, n, heads, dh)), (0, 2, 1, 3))  # [m, heads, n, dh]

    q = split(matmul(h, wq))
    k = split(matmul(h, wk))
    v = split(matmul(h, wv))
    scores = matmul(q, transpose(k, (0, 1, 3, 2))) * (1.0 / np.sqrt(dh))  # [m, heads, n, n]
    key_mask = None
    if mask is not None:
        key_mask = np.asarray(mask, dtype=bool)[:, None, None, :]
        if not key_mask.any(axis=-1).all():
            raise ValueError("multi_head_self_attention: fully masked input")
    attn = softmax(scores, mask=key_mask)
    ctx = matmul(attn, v)                                   # [m, heads, n, dh]
    out = reshape(transpose(ctx, (0, 2, 1, 3)), (m, n, d))
    if mask is not None:
        out = out * np.asarray(mask, dtype=h.dtype)[:, :, None]
    if single:
        out = reshape(out, (n, d))
    return out


@dataclass
class GruParams:
    """Weights of a single-layer GRU: input, recurrent and bias per gate."""

    wz: Tensor
    wr: Tensor
    wh: Tensor
    uz: Tensor
    ur: Tensor
    uh: Tensor
    bz: Tensor
    br: Tensor
    bh: Tensor

    @staticmethod
    def create(bag: ParameterBag, prefix: str, d_in: int, d_h: int) -> "GruParams":
        return GruParams(
            wz=bag.add(f"{prefix}.wz", (d_in, d_h)),
            wr=bag.add(f"{prefix}.wr", (d_in, d_h)),
            wh=bag.add(f"{prefix}.wh", (d_in, d_h)),
            uz=bag.add(f"{prefix}.uz", (d_h, d_h)),
            ur=bag.add(f"{prefix}.ur", (d_h, d_h)),
            uh=bag.add(f"{prefix}.uh", (d_h, d_h)),
            bz=bag.add(f"{prefix}.bz", (d_h,), init="zeros"),
            br=bag.add(f"{prefix}.br", (d_h,), init="zeros"),
            bh=bag.add(f"{prefix}.bh", (d_h,), init="zeros"),
        )


def gru_sequence(xs: Tensor, h0: Tensor, p: GruParams) -> Tensor:
    """Run a GRU over ``xs`` ``[n, d_in]`` starting from ``h0`` ``[d_h]``.

    Update gate z, reset gate r, candidate state, final hidden state
    returned; an empty sequence returns ``h0`` unchanged.
    """
    h = h0
    n = xs.shape[0]
    for t in range(n):
        x_t = reshape(gather_rows(xs, np.array([t])), (xs.shape[1],))
        z = sigmoid(matmul(x_t, p.wz) + matmul(h, p.uz) + p.bz)
        r = sigmoid(matmul(x_t, p.wr) + matmul(h, p.ur) + p.br)
        cand = tanh(matmul(x_t, p.wh) + matmul(r * h, p.uh) + p.bh)
        h = (1.0 - z) * h + z * cand
    return h


def dropout(x: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; identity when not training or rate is 0."""
    if not training or rate <= 0.0 or not grad_enabled():
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * keep
