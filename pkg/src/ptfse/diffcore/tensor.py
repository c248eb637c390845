"""Reverse-mode differentiable tensors over numpy arrays.

Each DiffTensor wraps an ndarray plus an optional record of the operation
that produced it (parent tensors and a closure mapping the output gradient
to parent-gradient contributions). `backward` walks the graph once in
reverse topological order, accumulating this pass's gradients in a side
table and then adding them onto each tensor's `grad`. Accumulation is
additive by design: a second backward without `zero_grad` doubles every
gradient.

Training arithmetic runs in float32; gradient checking builds float64
graphs. Ops inherit the dtype of their inputs.
"""

import numpy as np

from ..errors import InvalidInputError, ShapeError


class DiffTensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn", "op_name")

    def __init__(self, data, requires_grad=False, dtype=None):
        if isinstance(data, DiffTensor):
            data = data.data
        self.data = np.asarray(data, dtype=dtype if dtype is not None else None)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float32)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward_fn = None
        self.op_name = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def zero_grad(self):
        self.grad = None

    def item(self) -> float:
        if self.data.size != 1:
            raise InvalidInputError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def backward(self):
        backward(self)

    def __repr__(self):
        tag = f" op={self.op_name}" if self.op_name else ""
        return f"DiffTensor(shape={self.shape}, dtype={self.data.dtype}{tag})"

    # Arithmetic sugar over the op functions below.
    def __add__(self, other):
        return add(self, _lift(other, self.dtype))

    def __sub__(self, other):
        return sub(self, _lift(other, self.dtype))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return scale(self, -1.0)


def _lift(value, dtype):
    if isinstance(value, DiffTensor):
        return value
    return DiffTensor(np.asarray(value, dtype=dtype))


def make_op(data, parents, backward_fn, name):
    """Build a graph node. Gradient tracking follows the parents."""
    out = DiffTensor.__new__(DiffTensor)
    out.data = data
    out.grad = None
    out.requires_grad = any(p.requires_grad for p in parents)
    if out.requires_grad:
        out._parents = tuple(parents)
        out._backward_fn = backward_fn
    else:
        out._parents = ()
        out._backward_fn = None
    out.op_name = name
    return out


def zero_grad(tensors):
    """Reset gradients on a dict, list, or single tensor."""
    if isinstance(tensors, DiffTensor):
        tensors.zero_grad()
        return
    values = tensors.values() if hasattr(tensors, "values") else tensors
    for t in values:
        t.zero_grad()


def backward(loss: DiffTensor) -> None:
    """Populate grads on every requires_grad tensor reachable from `loss`."""
    if loss.size != 1:
        raise InvalidInputError(
            f"backward needs a scalar loss, got shape {loss.shape}"
        )
    order = _topo_order(loss)
    pass_grads = {id(loss): np.ones_like(loss.data)}
    for node in order:  # already reverse-topological
        gout = pass_grads.pop(id(node), None)
        if gout is None:
            continue
        if node.grad is None:
            node.grad = gout.copy()
        else:
            node.grad = node.grad + gout
        if node._backward_fn is None:
            continue
        contributions = node._backward_fn(gout)
        for parent, contrib in zip(node._parents, contributions):
            if contrib is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in pass_grads:
                pass_grads[key] = pass_grads[key] + contrib
            else:
                pass_grads[key] = contrib


def _topo_order(root):
    """Iterative DFS postorder, reversed: consumers before producers."""
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    order.reverse()
    return order


def _check_same_shape(a, b, op):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")


# ---------------------------------------------------------------------------
# Pointwise and structural primitives
# ---------------------------------------------------------------------------

def add(a: DiffTensor, b: DiffTensor) -> DiffTensor:
    _check_same_shape(a, b, "add")
    return make_op(a.data + b.data, (a, b), lambda g: (g, g), "add")


def sub(a: DiffTensor, b: DiffTensor) -> DiffTensor:
    _check_same_shape(a, b, "sub")
    return make_op(a.data - b.data, (a, b), lambda g: (g, -g), "sub")


def mul(a: DiffTensor, b: DiffTensor) -> DiffTensor:
    _check_same_shape(a, b, "mul")
    return make_op(
        a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data), "mul"
    )


def scale(a: DiffTensor, c: float) -> DiffTensor:
    c = float(c)
    return make_op(a.data * c, (a,), lambda g: (g * c,), "scale")


def sigmoid(a: DiffTensor) -> DiffTensor:
    x = a.data
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return make_op(out, (a,), lambda g: (g * out * (1.0 - out),), "sigmoid")


def tanh(a: DiffTensor) -> DiffTensor:
    out = np.tanh(a.data)
    return make_op(out, (a,), lambda g: (g * (1.0 - out * out),), "tanh")


def relu(a: DiffTensor) -> DiffTensor:
    mask = a.data > 0  # subgradient at 0 is 0
    return make_op(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,), "relu")


def mean(a: DiffTensor) -> DiffTensor:
    n = a.data.size
    out = np.asarray(a.data.mean(), dtype=a.data.dtype)
    return make_op(
        out, (a,), lambda g: (np.full_like(a.data, g / n),), "mean"
    )


def tensor_sum(a: DiffTensor) -> DiffTensor:
    out = np.asarray(a.data.sum(), dtype=a.data.dtype)
    return make_op(out, (a,), lambda g: (np.full_like(a.data, g),), "sum")


def concat_last_dim(tensors) -> DiffTensor:
    return concat(tensors, axis=-1)


def concat(tensors, axis: int) -> DiffTensor:
    tensors = list(tensors)
    ref = tensors[0].shape
    ax = axis % len(ref)
    for t in tensors[1:]:
        if len(t.shape) != len(ref) or any(
            t.shape[i] != ref[i] for i in range(len(ref)) if i != ax
        ):
            raise ShapeError(
                f"concat: shapes {[t.shape for t in tensors]} differ off axis {axis}"
            )
    widths = [t.shape[ax] for t in tensors]
    bounds = np.cumsum([0] + widths)

    def bwd(g):
        return tuple(
            np.take(g, range(bounds[i], bounds[i + 1]), axis=ax)
            for i in range(len(tensors))
        )

    return make_op(
        np.concatenate([t.data for t in tensors], axis=ax), tensors, bwd, "concat"
    )


def narrow(a: DiffTensor, axis: int, start: int, length: int) -> DiffTensor:
    ax = axis % a.data.ndim
    if start < 0 or start + length > a.shape[ax]:
        raise ShapeError(
            f"narrow: [{start}, {start + length}) out of bounds for axis {ax} "
            f"of shape {a.shape}"
        )
    sl = [slice(None)] * a.data.ndim
    sl[ax] = slice(start, start + length)
    sl = tuple(sl)

    def bwd(g):
        full = np.zeros_like(a.data)
        full[sl] = g
        return (full,)

    return make_op(a.data[sl].copy(), (a,), bwd, "narrow")


def permute(a: DiffTensor, axes) -> DiffTensor:
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def bwd(g):
        return (np.transpose(g, inverse),)

    return make_op(np.ascontiguousarray(np.transpose(a.data, axes)), (a,), bwd, "permute")


def reshape(a: DiffTensor, shape) -> DiffTensor:
    shape = tuple(shape)
    old = a.data.shape

    def bwd(g):
        return (g.reshape(old),)

    return make_op(a.data.reshape(shape).copy(), (a,), bwd, "reshape")


def take_rows(a: DiffTensor, indices) -> DiffTensor:
    """Gather rows along axis 0; backward scatter-adds into the source."""
    idx = np.asarray(indices, dtype=int)
    if idx.ndim != 1 or idx.size == 0:
        raise InvalidInputError(f"take_rows: need a flat non-empty index list, got {idx.shape}")
    if idx.min() < 0 or idx.max() >= a.shape[0]:
        raise ShapeError(
            f"take_rows: indices span [{idx.min()}, {idx.max()}] but axis 0 has "
            f"{a.shape[0]} rows"
        )

    def bwd(g):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        return (full,)

    return make_op(a.data[idx].copy(), (a,), bwd, "take_rows")


def stack(tensors, axis: int = 0) -> DiffTensor:
    tensors = list(tensors)
    ref = tensors[0].shape
    for t in tensors[1:]:
        if t.shape != ref:
            raise ShapeError(f"stack: shapes {[t.shape for t in tensors]} differ")

    def bwd(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return make_op(np.stack([t.data for t in tensors], axis=axis), tensors, bwd, "stack")


_POINTWISE = {
    "sigmoid": sigmoid,
    "tanh": tanh,
    "relu": relu,
    "add": add,
    "mul": mul,
    "concat_last_dim": concat_last_dim,
    "mean": mean,
}


def pointwise(op: str, *inputs) -> DiffTensor:
    """Dispatch by name; the named functions are the primary surface."""
    try:
        fn = _POINTWISE[op]
    except KeyError:
        raise InvalidInputError(f"unknown pointwise op {op!r}") from None
    if op == "concat_last_dim":
        return fn(inputs)
    return fn(*inputs)
