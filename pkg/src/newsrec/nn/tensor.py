"""Dense tensors with reverse-mode automatic differentiation.

Small numpy-backed autograd engine covering exactly the operations the
recommendation blocks need: elementwise arithmetic, (batched) matmul,
shape ops, pointwise nonlinearities, reductions, row gathering and
masked softmax. Gradients accumulate into ``Tensor.grad`` on ``backward``.

Arrays are float32 or float64; use 64-bit for finite-difference checks
and 32-bit for training.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable, Sequence

import numpy as np

_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (evaluation mode)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def grad_enabled() -> bool:
    return _GRAD_ENABLED


class Tensor:
    """N-dimensional float array with an optional gradient.

    ``data`` is always contiguous; ``grad``, when present, has the same
    shape and dtype. Non-leaf tensors hold a backward closure and their
    parent tensors, forming a DAG walked by :meth:`backward`.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        _parents: tuple = (),
        _backward: Callable[[np.ndarray], None] | None = None,
    ):
        arr = np.asarray(data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        if not arr.flags["C_CONTIGUOUS"]:
            # note: ascontiguousarray would promote 0-d arrays to 1-d
            arr = np.ascontiguousarray(arr)
        self.data: np.ndarray = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward = _backward

    # ------------------------------------------------------------------
    # introspection
    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return self.data.item()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype.name}, requires_grad={self.requires_grad})"

    def zero_grad(self) -> None:
        self.grad = None

    # ------------------------------------------------------------------
    # backward pass
    def backward(self, seed: np.ndarray | float | None = None) -> None:
        """Accumulate gradients of self w.r.t. every requires_grad ancestor.

        ``seed`` defaults to ones (use a scalar loss). Gradients add into
        ``.grad`` so batched losses may call backward repeatedly before an
        optimizer step.
        """
        if not self.requires_grad:
            return
        if seed is None:
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(seed, dtype=self.data.dtype) * np.ones_like(self.data)

        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in visited:
                    stack.append((p, False))

        grads: dict[int, np.ndarray] = {id(self): seed}
        for node in reversed(topo):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                # leaf: accumulate into .grad
                if node.grad is None:
                    node.grad = g.copy()
                else:
                    node.grad += g
                continue
            for parent, pg in node._backward(g):
                if not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] += pg
                else:
                    grads[key] = pg
        # interior accumulation done through the dict; leaves got .grad above

    # ------------------------------------------------------------------
    # operator sugar
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise TypeError("tensor/tensor division unsupported; multiply by a reciprocal")
        return mul(self, 1.0 / float(other))

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent):
        return power(self, exponent)

    def sum(self, axis=None, keepdims: bool = False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, *shape)

    def transpose(self, *axes):
        return transpose(self, *axes)

    @property
    def T(self):
        return transpose(self)

    def relu(self):
        return relu(self)

    def tanh(self):
        return tanh(self)

    def sigmoid(self):
        return sigmoid(self)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)


# ----------------------------------------------------------------------
# helpers

def as_tensor(x, dtype=None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    arr = np.asarray(x, dtype=dtype)
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64 if dtype is None else dtype)
    return Tensor(arr)


def _result(data: np.ndarray, parents: Sequence[Tensor], backward) -> Tensor:
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        return Tensor(data, True, tuple(parents), backward)
    return Tensor(data)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcasted gradient back down to ``shape``."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    squeeze_axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if squeeze_axes:
        grad = grad.sum(axis=squeeze_axes, keepdims=True)
    return grad.reshape(shape)


# ----------------------------------------------------------------------
# arithmetic

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def backward(g):
        return ((a, _unbroadcast(g, a.shape)), (b, _unbroadcast(g, b.shape)))

    return _result(out, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data
    ad, bd = a.data, b.data

    def backward(g):
        return ((a, _unbroadcast(g * bd, a.shape)), (b, _unbroadcast(g * ad, b.shape)))

    return _result(out, (a, b), backward)


def power(a, exponent: float) -> Tensor:
    a = as_tensor(a)
    e = float(exponent)
    out = a.data ** e
    ad = a.data

    def backward(g):
        return ((a, g * e * ad ** (e - 1.0)),)

    return _result(out, (a,), backward)


def matmul(a, b) -> Tensor:
    """Matrix product with numpy semantics for ndim >= 1 operands.

    Batch dimensions broadcast; gradients are summed back over any
    broadcast axes.
    """
    a, b = as_tensor(a), as_tensor(b)
    out = np.matmul(a.data, b.data)
    ad, bd = a.data, b.data

    def backward(g):
        ga = gb = None
        a2 = ad[None, :] if ad.ndim == 1 else ad
        b2 = bd[:, None] if bd.ndim == 1 else bd
        g2 = g
        if bd.ndim == 1:
            g2 = np.expand_dims(g2, axis=-1)
        if ad.ndim == 1:
            g2 = np.expand_dims(g2, axis=-2)
        ga = np.matmul(g2, np.swapaxes(b2, -1, -2))
        gb = np.matmul(np.swapaxes(a2, -1, -2), g2)
        if ad.ndim == 1:
            ga = ga.reshape(ga.shape[:-2] + (ga.shape[-1],))
        if bd.ndim == 1:
            gb = gb.reshape(gb.shape[:-1])
        return ((a, _unbroadcast(ga, ad.shape)), (b, _unbroadcast(gb, bd.shape)))

    return _result(out, (a, b), backward)


# ----------------------------------------------------------------------
# pointwise nonlinearities

def relu(a) -> Tensor:
    a = as_tensor(a)
    out = np.maximum(a.data, 0.0)
    pos = a.data > 0

    def backward(g):
        return ((a, g * pos),)

    return _result(out, (a,), backward)


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)

    def backward(g):
        return ((a, g * (1.0 - out * out)),)

    return _result(out, (a,), backward)


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out = 1.0 / (1.0 + np.exp(-a.data))

    def backward(g):
        return ((a, g * out * (1.0 - out)),)

    return _result(out, (a,), backward)


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)

    def backward(g):
        return ((a, g * out),)

    return _result(out, (a,), backward)


def log(a) -> Tensor:
    a = as_tensor(a)
    out = np.log(a.data)
    ad = a.data

    def backward(g):
        return ((a, g / ad),)

    return _result(out, (a,), backward)


# ----------------------------------------------------------------------
# reductions

def tsum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)
    in_shape = a.shape

    def backward(g):
        g = np.asarray(g)
        if axis is None:
            ga = np.broadcast_to(g, in_shape).astype(a.dtype, copy=True)
        else:
            axes = (axis,) if isinstance(axis, int) else tuple(axis)
            if not keepdims:
                for ax in sorted(ax % len(in_shape) for ax in axes):
                    g = np.expand_dims(g, ax)
            ga = np.broadcast_to(g, in_shape).astype(a.dtype, copy=True)
        return ((a, ga),)

    return _result(out, (a,), backward)


def tmean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        n = a.size
    else:
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        n = 1
        for ax in axes:
            n *= a.shape[ax]
    return mul(tsum(a, axis=axis, keepdims=keepdims), 1.0 / n)


# ----------------------------------------------------------------------
# shape ops

def reshape(a, *shape) -> Tensor:
    a = as_tensor(a)
    if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
        shape = tuple(shape[0])
    out = a.data.reshape(shape)
    in_shape = a.shape

    def backward(g):
        return ((a, g.reshape(in_shape)),)

    return _result(out, (a,), backward)


def transpose(a, *axes) -> Tensor:
    a = as_tensor(a)
    if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
        axes = tuple(axes[0])
    if not axes:
        axes = tuple(reversed(range(a.ndim)))
    out = a.data.transpose(axes)
    inv = np.argsort(axes)

    def backward(g):
        return ((a, g.transpose(inv)),)

    return _result(out, (a,), backward)


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    ts = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.shape[axis] for t in ts]

    def backward(g):
        pieces = np.split(g, np.cumsum(sizes)[:-1], axis=axis)
        return tuple((t, p) for t, p in zip(ts, pieces))

    return _result(out, ts, backward)


def gather_rows(table, ids) -> Tensor:
    """Select ``table[ids]`` along axis 0; ids is any integer array."""
    table = as_tensor(table)
    idx = np.asarray(ids)
    if not np.issubdtype(idx.dtype, np.integer):
        raise TypeError("gather_rows ids must be integers")
    out = table.data[idx]
    table_shape = table.shape

    def backward(g):
        gt = np.zeros(table_shape, dtype=g.dtype)
        np.add.at(gt, idx.ravel(), g.reshape(-1, *table_shape[1:]))
        return ((table, gt),)

    return _result(out, (table,), backward)


# ----------------------------------------------------------------------
# softmax family

def softmax(a, mask: np.ndarray | None = None) -> Tensor:
    """Softmax over the last axis, with optional boolean mask.

    Masked positions (mask False) get probability exactly 0 and are
    excluded from the normalization. Every row must keep at least one
    unmasked position.
    """
    a = as_tensor(a)
    x = a.data
    if mask is None:
        m = x.max(axis=-1, keepdims=True)
        e = np.exp(x - m)
    else:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        if not mask.any(axis=-1).all():
            raise ValueError("softmax: fully masked row")
        neg = np.where(mask, x, -np.inf)
        m = neg.max(axis=-1, keepdims=True)
        e = np.where(mask, np.exp(np.where(mask, x - m, 0.0)), 0.0)
    z = e.sum(axis=-1, keepdims=True)
    out = e / z

    def backward(g):
        dot = (g * out).sum(axis=-1, keepdims=True)
        return ((a, out * (g - dot)),)

    return _result(out, (a,), backward)


def log_softmax(a) -> Tensor:
    """Numerically stable log softmax over the last axis."""
    a = as_tensor(a)
    x = a.data
    m = x.max(axis=-1, keepdims=True)
    s = x - m
    lse = np.log(np.exp(s).sum(axis=-1, keepdims=True))
    out = s - lse
    soft = np.exp(out)

    def backward(g):
        return ((a, g - soft * g.sum(axis=-1, keepdims=True)),)

    return _result(out, (a,), backward)
