"""Reverse-mode automatic differentiation over numpy arrays.

A deliberately small engine: float64 everywhere, dynamic graph, 2-D
matmul plus broadcasting-aware elementwise ops, reductions, stack/concat
and basic slicing. Enough to express the sequence encoders and the
classifier exactly, so gradients can be verified against central finite
differences.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce ``grad`` back to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        if self.data.size != 1:
            raise ValueError("backward() expects a scalar loss")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar ----------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(const(other), self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return take(self, idx)


def const(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _wrap(data, parents, backward) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad or p._parents for p in parents):
        out._parents = tuple(parents)
        out._backward = backward
    return out


def add(a, b) -> Tensor:
    a, b = const(a), const(b)

    def backward(g):
        a._accumulate(_unbroadcast(g, a.data.shape))
        b._accumulate(_unbroadcast(g, b.data.shape))

    return _wrap(a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = const(a), const(b)

    def backward(g):
        a._accumulate(_unbroadcast(g, a.data.shape))
        b._accumulate(_unbroadcast(-g, b.data.shape))

    return _wrap(a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = const(a), const(b)

    def backward(g):
        a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    return _wrap(a.data * b.data, (a, b), backward)


def div(a, b) -> Tensor:
    a, b = const(a), const(b)

    def backward(g):
        a._accumulate(_unbroadcast(g / b.data, a.data.shape))
        b._accumulate(_unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return _wrap(a.data / b.data, (a, b), backward)


def matmul(a, b) -> Tensor:
    a, b = const(a), const(b)

    def backward(g):
        a._accumulate(g @ b.data.T)
        b._accumulate(a.data.T @ g)

    return _wrap(a.data @ b.data, (a, b), backward)


def tanh(a) -> Tensor:
    a = const(a)
    out_data = np.tanh(a.data)

    def backward(g):
        a._accumulate(g * (1.0 - out_data * out_data))

    return _wrap(out_data, (a,), backward)


def sigmoid(a) -> Tensor:
    a = const(a)
    x = a.data
    out_data = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                        np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g):
        a._accumulate(g * out_data * (1.0 - out_data))

    return _wrap(out_data, (a,), backward)


def exp(a) -> Tensor:
    a = const(a)
    out_data = np.exp(a.data)

    def backward(g):
        a._accumulate(g * out_data)

    return _wrap(out_data, (a,), backward)


def log(a) -> Tensor:
    a = const(a)

    def backward(g):
        a._accumulate(g / a.data)

    return _wrap(np.log(a.data), (a,), backward)


def sqrt(a) -> Tensor:
    a = const(a)
    out_data = np.sqrt(a.data)

    def backward(g):
        a._accumulate(g * 0.5 / out_data)

    return _wrap(out_data, (a,), backward)


def tsum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = const(a)

    def backward(g):
        if axis is None:
            a._accumulate(np.broadcast_to(g, a.data.shape).copy())
            return
        if not keepdims:
            g = np.expand_dims(g, axis)
        a._accumulate(np.broadcast_to(g, a.data.shape).copy())

    return _wrap(a.data.sum(axis=axis, keepdims=keepdims), (a,), backward)


def tmean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = const(a)
    if axis is None:
        scale = a.data.size
    else:
        scale = a.data.shape[axis]
    return mul(tsum(a, axis=axis, keepdims=keepdims), 1.0 / scale)


def stack(tensors, axis: int = 0) -> Tensor:
    tensors = [const(t) for t in tensors]

    def backward(g):
        pieces = np.split(g, len(tensors), axis=axis)
        for t, piece in zip(tensors, pieces):
            t._accumulate(np.squeeze(piece, axis=axis))

    return _wrap(np.stack([t.data for t in tensors], axis=axis), tensors, backward)


def concat(tensors, axis: int = 1) -> Tensor:
    tensors = [const(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
            t._accumulate(piece)

    return _wrap(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def take(a, idx) -> Tensor:
    """Basic slicing/indexing; gradient scatters back into place."""
    a = const(a)

    def backward(g):
        full = np.zeros_like(a.data)
        full[idx] = g
        a._accumulate(full)

    return _wrap(a.data[idx], (a,), backward)


def where_positive(x, pos, neg) -> Tensor:
    """Select ``pos`` where x.data > 0 else ``neg`` (mask is constant)."""
    x, pos, neg = const(x), const(pos), const(neg)
    mask = x.data > 0

    def backward(g):
        pos._accumulate(_unbroadcast(g * mask, pos.data.shape))
        neg._accumulate(_unbroadcast(g * ~mask, neg.data.shape))

    return _wrap(np.where(mask, pos.data, neg.data), (pos, neg), backward)


def softmax_axis0(m: Tensor, mask_bias: np.ndarray | None = None) -> Tensor:
    """Column-stochastic softmax along axis 0 with optional additive mask.

    ``mask_bias`` is 0 on valid positions and a large negative constant on
    padded ones; the detached max keeps the exponentials stable without
    affecting gradients (softmax is shift-invariant).
    """
    z = m if mask_bias is None else add(m, Tensor(mask_bias))
    shift = Tensor(z.data.max(axis=0, keepdims=True))
    e = exp(sub(z, shift))
    return div(e, tsum(e, axis=0, keepdims=True))


def softplus(a) -> Tensor:
    a = const(a)
    x = a.data
    out_data = np.logaddexp(0.0, x)
    sig = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                   np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g):
        a._accumulate(g * sig)

    return _wrap(out_data, (a,), backward)


def clamp(a, lo: float, hi: float) -> Tensor:
    """Clip values; gradient passes only through the interior."""
    a = const(a)
    inside = (a.data > lo) & (a.data < hi)

    def backward(g):
        a._accumulate(g * inside)

    return _wrap(np.clip(a.data, lo, hi), (a,), backward)


class Parameter(Tensor):
    __slots__ = ("name",)

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.data.shape})"
