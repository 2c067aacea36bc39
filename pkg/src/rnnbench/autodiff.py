"""Tape-based reverse-mode differentiation over dense 2-D float64 arrays.

Every value flowing through a recurrent cell is a :class:`Tensor` bound to a
:class:`Tape`. Primitive ops append one node each; :meth:`Tape.backward`
walks the nodes in reverse order and accumulates adjoints.

Broadcasting is deliberately absent except for adding a ``(1, n)`` row vector
(a bias) to an ``(m, n)`` matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

__all__ = [
    "DimensionError",
    "NumericError",
    "Parameter",
    "Tape",
    "Tensor",
    "add",
    "grad_check",
    "hadamard",
    "matmul",
    "mse_loss",
    "one_minus",
    "relu",
    "scalar_mul",
    "sigmoid",
    "sign",
    "subtract",
    "tanh",
    "total",
]


class DimensionError(ValueError):
    """Operand shapes are incompatible for the requested op."""


class NumericError(ArithmeticError):
    """An op produced NaN or infinity."""


@dataclass
class Parameter:
    """A named learnable array.

    ``name`` follows the cell nomenclature (``"W_hf"``, ``"b_o"``, ...).
    Frozen parameters (``trainable=False``) still receive gradients from
    :meth:`Tape.backward` but optimizers must leave them alone.
    """

    name: str
    value: np.ndarray
    trainable: bool = True

    def __post_init__(self):
        self.value = np.array(self.value, dtype=np.float64, ndmin=2)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape

    @property
    def size(self) -> int:
        return self.value.size

    def copy(self) -> "Parameter":
        return Parameter(self.name, self.value.copy(), self.trainable)


class Tensor:
    """A node on a tape, or a constant when ``index`` is None."""

    __slots__ = ("value", "tape", "index")

    def __init__(self, value: np.ndarray, tape: "Tape", index: Optional[int]):
        self.value = value
        self.tape = tape
        self.index = index

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape

    def __repr__(self):
        kind = "const" if self.index is None else f"node {self.index}"
        return f"Tensor({kind}, shape={self.shape})"


Backward = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass
class Tape:
    """Append-only record of primitive ops.

    Node ``k`` stores its op name, the ids of its parents (always ``< k``) and
    a closure mapping the node's adjoint to one adjoint per parent.
    """

    ops: List[str] = field(default_factory=list)
    parents: List[Tuple[Optional[int], ...]] = field(default_factory=list)
    backwards: List[Optional[Backward]] = field(default_factory=list)
    values: List[np.ndarray] = field(default_factory=list)
    leaves: Dict[int, Parameter] = field(default_factory=dict)
    _watched: Dict[int, Tensor] = field(default_factory=dict)

    def __len__(self):
        return len(self.ops)

    def _push(self, op, value, parents=(), backward=None) -> Tensor:
        # a sum is non-finite iff some entry is (short of overflow, also an error)
        if not math.isfinite(value.sum()):
            raise NumericError(f"{op} produced a non-finite value")
        idx = len(self.ops)
        self.ops.append(op)
        self.parents.append(tuple(parents))
        self.backwards.append(backward)
        self.values.append(value)
        return Tensor(value, self, idx)

    def watch(self, param: Parameter) -> Tensor:
        """Return the leaf tensor tracking ``param`` (one leaf per parameter)."""
        key = id(param)
        if key not in self._watched:
            t = self._push("leaf", param.value)
            self.leaves[t.index] = param
            self._watched[key] = t
        return self._watched[key]

    def variable(self, value) -> Tensor:
        """A differentiable leaf not tied to any parameter."""
        return self._push("leaf", np.array(value, dtype=np.float64, ndmin=2))

    def constant(self, value) -> Tensor:
        return Tensor(np.array(value, dtype=np.float64, ndmin=2), self, None)

    def backward(self, root: Tensor) -> Dict[str, np.ndarray]:
        """Adjoint of ``root`` with respect to every watched parameter.

        Parameters the root does not depend on get a zero array.
        """
        if root.shape != (1, 1):
            raise ValueError(f"backward needs a scalar root, got shape {root.shape}")
        adj = self.adjoints(root)
        grads = {}
        for idx, param in self.leaves.items():
            g = adj[idx]
            grads[param.name] = np.zeros_like(param.value) if g is None else g
        return grads

    def adjoints(self, root: Tensor) -> List[Optional[np.ndarray]]:
        if root.tape is not self or root.index is None:
            raise ValueError("root is not a node of this tape")
        adj: List[Optional[np.ndarray]] = [None] * (root.index + 1)
        adj[root.index] = np.ones_like(root.value)
        for k in range(root.index, -1, -1):
            g = adj[k]
            fn = self.backwards[k]
            if g is None or fn is None:
                continue
            for p, gp in zip(self.parents[k], fn(g)):
                if p is None or gp is None:
                    continue
                prev = adj[p]
                adj[p] = gp if prev is None else prev + gp
        return adj

    def grad(self, root: Tensor, wrt: Tensor) -> np.ndarray:
        g = self.adjoints(root)[wrt.index] if wrt.index <= root.index else None
        return np.zeros_like(wrt.value) if g is None else g


def _as_tensor(x, tape: Tape) -> Tensor:
    return x if isinstance(x, Tensor) else tape.constant(x)


def _tape_of(*xs) -> Tape:
    for x in xs:
        if isinstance(x, Tensor):
            return x.tape
    raise TypeError("at least one operand must be a Tensor")


def _same_shape(op, a: Tensor, b: Tensor):
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ")


# -- primitives ---------------------------------------------------------------


def matmul(a, b) -> Tensor:
    tape = _tape_of(a, b)
    a, b = _as_tensor(a, tape), _as_tensor(b, tape)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: shapes {a.shape} and {b.shape} are not aligned")
    av, bv = a.value, b.value

    def back(g):
        return (
            g @ bv.T if a.index is not None else None,
            av.T @ g if b.index is not None else None,
        )

    return tape._push("matmul", av @ bv, (a.index, b.index), back)


def add(a, b) -> Tensor:
    """Elementwise sum; a ``(1, n)`` operand is broadcast over rows."""
    tape = _tape_of(a, b)
    a, b = _as_tensor(a, tape), _as_tensor(b, tape)
    if a.shape == b.shape:
        return tape._push("add", a.value + b.value, (a.index, b.index), lambda g: (g, g))
    if b.shape[0] == 1 and b.shape[1] == a.shape[1]:
        return tape._push(
            "add", a.value + b.value, (a.index, b.index),
            lambda g: (g, g.sum(axis=0, keepdims=True)),
        )
    if a.shape[0] == 1 and a.shape[1] == b.shape[1]:
        return tape._push(
            "add", a.value + b.value, (a.index, b.index),
            lambda g: (g.sum(axis=0, keepdims=True), g),
        )
    raise DimensionError(f"add: shapes {a.shape} and {b.shape} differ")


def subtract(a, b) -> Tensor:
    tape = _tape_of(a, b)
    a, b = _as_tensor(a, tape), _as_tensor(b, tape)
    _same_shape("subtract", a, b)
    return tape._push("subtract", a.value - b.value, (a.index, b.index), lambda g: (g, -g))


def hadamard(a, b) -> Tensor:
    tape = _tape_of(a, b)
    a, b = _as_tensor(a, tape), _as_tensor(b, tape)
    _same_shape("hadamard", a, b)
    av, bv = a.value, b.value
    return tape._push("hadamard", av * bv, (a.index, b.index), lambda g: (g * bv, g * av))


def scalar_mul(c: float, a: Tensor) -> Tensor:
    c = float(c)
    return a.tape._push("scalar_mul", c * a.value, (a.index,), lambda g: (c * g,))


def one_minus(a: Tensor) -> Tensor:
    return a.tape._push("one_minus", 1.0 - a.value, (a.index,), lambda g: (-g,))


def sigmoid(a: Tensor) -> Tensor:
    s = expit(a.value)
    return a.tape._push("sigmoid", s, (a.index,), lambda g: (g * s * (1.0 - s),))


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.value)
    return a.tape._push("tanh", t, (a.index,), lambda g: (g * (1.0 - t * t),))


def relu(a: Tensor) -> Tensor:
    mask = a.value > 0
    return a.tape._push("relu", np.where(mask, a.value, 0.0), (a.index,), lambda g: (g * mask,))


def sign(a: Tensor) -> Tensor:
    """Elementwise sign. Its derivative is taken to be 0 everywhere."""
    return a.tape._push("sign", np.sign(a.value), (a.index,), lambda g: (None,))


def total(a: Tensor) -> Tensor:
    """Sum of all entries as a ``(1, 1)`` tensor."""
    shape = a.shape
    return a.tape._push(
        "total", np.array([[a.value.sum()]]), (a.index,),
        lambda g: (np.full(shape, g[0, 0]),),
    )


def mse_loss(pred: Tensor, target) -> Tensor:
    """Mean squared error over all entries, as a ``(1, 1)`` tensor."""
    tape = pred.tape
    target = _as_tensor(target, tape)
    _same_shape("mse_loss", pred, target)
    diff = pred.value - target.value
    n = diff.size
    value = np.array([[np.dot(diff.ravel(), diff.ravel()) / n]])

    def back(g):
        d = (2.0 * g[0, 0] / n) * diff
        return d, (-d if target.index is not None else None)

    return tape._push("mse_loss", value, (pred.index, target.index), back)


# -- verification -------------------------------------------------------------


def grad_check(
    f: Callable[[Tape, Dict[str, Tensor]], Tensor],
    params: Iterable[Parameter],
    eps: float = 1e-5,
) -> float:
    """Compare tape gradients with central differences, coordinate by coordinate.

    ``f(tape, leaves)`` must build a scalar on ``tape`` from the watched
    parameters in ``leaves`` (keyed by name). Returns the largest
    ``|analytic - numeric| / max(1, |analytic|, |numeric|)``.
    """
    params = list(params)

    def evaluate():
        tape = Tape()
        leaves = {p.name: tape.watch(p) for p in params}
        return tape, f(tape, leaves)

    tape, root = evaluate()
    analytic = tape.backward(root)

    worst = 0.0
    for p in params:
        flat = p.value.reshape(-1)
        grad = analytic[p.name].reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + eps
            up = evaluate()[1].value[0, 0]
            flat[k] = orig - eps
            down = evaluate()[1].value[0, 0]
            flat[k] = orig
            numeric = (up - down) / (2.0 * eps)
            err = abs(grad[k] - numeric) / max(1.0, abs(grad[k]), abs(numeric))
            worst = max(worst, err)
    return worst
