"""Truncated multivariate Taylor ("jet") arithmetic.

A :class:`Jet` carries an array of values together with all partial
derivatives up to a fixed order (at most 3) with respect to ``nvars``
independent coordinates.  Derivative axes are stored *leading*::

    val : S
    d1  : (n,) + S
    d2  : (n, n) + S
    d3  : (n, n, n) + S

so that ``S`` (the "value shape") behaves like an ordinary numpy array for
indexing, stacking and contraction.  Every operation propagates derivatives
by the Leibniz and Faa di Bruno rules truncated at the jet order, so results
are exact up to floating point rounding.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

MAX_ORDER = 3


def _sym3(a2, b1):
    """Symmetrised outer product sum_{sym} a2[i,j] * b1[k] over derivative axes."""
    return (
        a2[:, :, None] * b1[None, None, :]
        + a2[:, None, :] * b1[None, :, None]
        + a2[None, :, :] * b1[:, None, None]
    )


class Jet:
    """Array of scalars with exact partial derivatives up to ``order``."""

    __array_priority__ = 1000

    def __init__(self, val, d1=None, d2=None, d3=None, *, order: int, nvars: int):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in [0, {MAX_ORDER}], got {order}")
        self.order = order
        self.nvars = nvars
        self.val = np.asarray(val, dtype=float)
        shape = self.val.shape
        n = nvars
        self.d1 = self.d2 = self.d3 = None
        if order >= 1:
            self.d1 = np.zeros((n,) + shape) if d1 is None else np.asarray(d1, dtype=float)
        if order >= 2:
            self.d2 = np.zeros((n, n) + shape) if d2 is None else np.asarray(d2, dtype=float)
        if order >= 3:
            self.d3 = np.zeros((n, n, n) + shape) if d3 is None else np.asarray(d3, dtype=float)

    # ------------------------------------------------------------------ constructors
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        return cls(np.asarray(value, dtype=float), order=order, nvars=nvars)

    @classmethod
    def variables(cls, point, order: int) -> "Jet":
        """The coordinate functions x_1..x_n as a jet of shape (n,) at ``point``."""
        point = np.asarray(point, dtype=float)
        if point.ndim != 1:
            raise ValueError("point must be a 1-d coordinate vector")
        n = point.shape[0]
        d1 = np.eye(n) if order >= 1 else None
        return cls(point, d1, order=order, nvars=n)

    # ------------------------------------------------------------------ basics
    @property
    def shape(self) -> tuple:
        return self.val.shape

    @property
    def ndim(self) -> int:
        return self.val.ndim

    def arrays(self) -> list:
        return [a for a in (self.val, self.d1, self.d2, self.d3) if a is not None]

    def _rebuild(self, arrays, order=None, nvars=None) -> "Jet":
        order = self.order if order is None else order
        nvars = self.nvars if nvars is None else nvars
        padded = list(arrays) + [None] * (4 - len(arrays))
        return Jet(*padded, order=order, nvars=nvars)

    def _map(self, fn) -> "Jet":
        """Apply ``fn(array, k)`` to each stored array (k = number of derivative axes)."""
        return self._rebuild([fn(a, k) for k, a in enumerate(self.arrays())])

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, val={self.val!r})"

    def __len__(self) -> int:
        return self.val.shape[0]

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return self._map(lambda a, k: a[(slice(None),) * k + key])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def copy(self) -> "Jet":
        return self._map(lambda a, k: a.copy())

    def _axis(self, axis: int, extra: int = 0) -> int:
        # value-shape axes are addressed from the right so derivative axes never shift them
        nd = self.ndim + extra
        if axis < 0:
            axis += nd
        if not 0 <= axis < nd:
            raise np.exceptions.AxisError(axis, nd)
        return axis - nd

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axes = tuple(range(-self.ndim, 0))
        elif isinstance(axis, tuple):
            axes = tuple(self._axis(a) for a in axis)
        else:
            axes = (self._axis(axis),)
        return self._map(lambda a, k: a.sum(axis=axes))

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return self._map(lambda a, k: np.transpose(a, tuple(range(k)) + tuple(k + i for i in axes)))

    @property
    def T(self) -> "Jet":
        return self.transpose()

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return self._map(lambda a, k: a.reshape(a.shape[:k] + tuple(shape)))

    def broadcast_to(self, shape) -> "Jet":
        shape = tuple(shape)
        n = self.nvars
        return self._map(lambda a, k: np.broadcast_to(a, (n,) * k + shape).copy())

    def _pad(self, ndim: int) -> "Jet":
        extra = ndim - self.ndim
        if extra <= 0:
            return self
        return self._map(lambda a, k: a.reshape(a.shape[:k] + (1,) * extra + a.shape[k:]))

    # ------------------------------------------------------------------ order / variables
    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order from {self.order} to {order}")
        return self._rebuild(self.arrays()[: order + 1], order=order)

    def partial(self, i: int) -> "Jet":
        """d/dx_i as a jet of one lower order."""
        if self.order < 1:
            raise ValueError("an order-0 jet has no derivatives")
        arrays = [a[i] for a in self.arrays()[1:]]
        return self._rebuild(arrays, order=self.order - 1)

    def gradient(self) -> "Jet":
        """All first partials stacked along a new leading value axis (shape (n,) + S)."""
        return stack([self.partial(i) for i in range(self.nvars)], axis=0)

    def embed(self, nvars: int, index: Sequence[int]) -> "Jet":
        """Re-express the jet in ``nvars`` variables; old variable j becomes ``index[j]``.

        The jet is treated as constant along the new variables.
        """
        index = np.asarray(index, dtype=int)
        shape = self.shape
        arrays = [self.val]
        for k, a in enumerate(self.arrays()[1:], start=1):
            out = np.zeros((nvars,) * k + shape)
            out[np.ix_(*([index] * k))] = a
            arrays.append(out)
        return self._rebuild(arrays, nvars=nvars)

    # ------------------------------------------------------------------ arithmetic
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError(f"jets over {self.nvars} and {other.nvars} variables do not mix")
            return other
        return Jet.constant(other, self.nvars, self.order)

    def _common(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        a = self.truncate(order) if self.order > order else self
        b = other.truncate(order) if other.order > order else other
        nd = max(a.ndim, b.ndim)
        return a._pad(nd), b._pad(nd)

    def __neg__(self) -> "Jet":
        return self._map(lambda a, k: -a)

    def __add__(self, other) -> "Jet":
        a, b = self._common(other)
        arrays = [x + y for x, y in zip(a.arrays(), b.arrays())]
        return a._rebuild(arrays)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other if isinstance(other, Jet) else -np.asarray(other, dtype=float))

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return self._map(lambda a, k: a * c)
        return _product(*self._common(other), np.multiply)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = self.val
        if np.any(v == 0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        inv = 1.0 / v
        return self.compose(inv, -inv**2, 2 * inv**3, -6 * inv**4)

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, (int, np.integer)):
            if p == 0:
                return Jet.constant(np.ones(self.shape), self.nvars, self.order)
            if p < 0:
                return (self ** (-p)).reciprocal()
            out = self
            for _ in range(p - 1):
                out = out * self
            return out
        p = float(p)
        v = self.val
        return self.compose(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2),
                            p * (p - 1) * (p - 2) * v ** (p - 3))

    # ------------------------------------------------------------------ composition
    def compose(self, f0, f1, f2=0.0, f3=0.0) -> "Jet":
        """Jet of ``f(self)`` for a smooth univariate f with derivatives f0..f3 at ``self.val``."""
        f0, f1, f2, f3 = (np.asarray(f, dtype=float) for f in (f0, f1, f2, f3))
        arrays = [np.broadcast_to(f0, self.shape).astype(float)]
        if self.order >= 1:
            a1 = self.d1
            arrays.append(f1 * a1)
        if self.order >= 2:
            a2 = self.d2
            arrays.append(f2 * (a1[:, None] * a1[None, :]) + f1 * a2)
        if self.order >= 3:
            a3 = self.d3
            arrays.append(
                f3 * (a1[:, None, None] * a1[None, :, None] * a1[None, None, :])
                + f2 * _sym3(a2, a1)
                + f1 * a3
            )
        return self._rebuild(arrays)

    def sqrt(self) -> "Jet":
        s = np.sqrt(self.val)
        return self.compose(s, 0.5 / s, -0.25 / s**3, 0.375 / s**5)

    def sin(self) -> "Jet":
        s, c = np.sin(self.val), np.cos(self.val)
        return self.compose(s, c, -s, -c)

    def cos(self) -> "Jet":
        s, c = np.sin(self.val), np.cos(self.val)
        return self.compose(c, -s, -c, s)

    def exp(self) -> "Jet":
        e = np.exp(self.val)
        return self.compose(e, e, e, e)

    def log(self) -> "Jet":
        v = self.val
        return self.compose(np.log(v), 1 / v, -1 / v**2, 2 / v**3)


def _product(a: Jet, b: Jet, op) -> Jet:
    """Leibniz rule for a bilinear ``op`` acting on the value axes (operands pre-aligned)."""
    arrays = [op(a.val, b.val)]
    if a.order >= 1:
        arrays.append(op(a.d1, b.val) + op(a.val, b.d1))
    if a.order >= 2:
        cross = op(a.d1[:, None], b.d1[None, :])
        arrays.append(op(a.d2, b.val) + cross + np.swapaxes(cross, 0, 1) + op(a.val, b.d2))
    if a.order >= 3:
        a1, b1, a2, b2 = a.d1, b.d1, a.d2, b.d2
        t21 = (op(a2[:, :, None], b1[None, None, :]) + op(a2[:, None, :], b1[None, :, None])
               + op(a2[None, :, :], b1[:, None, None]))
        t12 = (op(a1[None, None, :], b2[:, :, None]) + op(a1[None, :, None], b2[:, None, :])
               + op(a1[:, None, None], b2[None, :, :]))
        arrays.append(op(a.d3, b.val) + t21 + t12 + op(a.val, b.d3))
    return a._rebuild(arrays)


def einsum(subscripts: str, *operands):
    """``np.einsum`` over value axes for one or two operands, jets or plain arrays.

    Subscripts must name every value axis explicitly (no ellipsis).
    """
    ins, out = subscripts.replace(" ", "").split("->")
    parts = ins.split(",")
    if len(parts) != len(operands) or len(parts) not in (1, 2):
        raise ValueError("einsum supports one or two operands")
    spec = ",".join("..." + p for p in parts) + "->..." + out

    def op(*xs):
        return np.einsum(spec, *xs)

    if len(operands) == 1:
        (a,) = operands
        if not isinstance(a, Jet):
            return np.einsum(subscripts, a)
        return a._map(lambda arr, k: op(arr))
    a, b = operands
    if isinstance(a, Jet) and isinstance(b, Jet):
        if a.nvars != b.nvars:
            raise ValueError("jets over different variable sets")
        order = min(a.order, b.order)
        a, b = a.truncate(order), b.truncate(order)
        return _product(a, b, op)
    if isinstance(a, Jet):
        b = np.asarray(b, dtype=float)
        return a._map(lambda arr, k: op(arr, b))
    if isinstance(b, Jet):
        a = np.asarray(a, dtype=float)
        return b._map(lambda arr, k: op(a, arr))
    return np.einsum(subscripts, a, b)


def matmul(a, b):
    """Matrix product of two (m, p) and (p, q) value-shaped operands."""
    return einsum("ij,jk->ik", a, b)


def stack(jets: Sequence[Jet], axis: int = 0) -> Jet:
    jets = list(jets)
    if not jets:
        raise ValueError("nothing to stack")
    order = min(j.order for j in jets)
    nvars = jets[0].nvars
    if any(j.nvars != nvars for j in jets):
        raise ValueError("jets over different variable sets")
    jets = [j.truncate(order) if j.order > order else j for j in jets]
    shape = np.broadcast_shapes(*(j.shape for j in jets))
    jets = [j.broadcast_to(shape) if j.shape != shape else j for j in jets]
    ax = jets[0]._axis(axis, extra=1)
    arrays = [np.stack([j.arrays()[k] for j in jets], axis=ax) for k in range(order + 1)]
    return jets[0]._rebuild(arrays)


def concatenate(jets: Sequence[Jet], axis: int = 0) -> Jet:
    jets = list(jets)
    order = min(j.order for j in jets)
    jets = [j.truncate(order) if j.order > order else j for j in jets]
    ax = jets[0]._axis(axis)
    arrays = [np.concatenate([j.arrays()[k] for j in jets], axis=ax) for k in range(order + 1)]
    return jets[0]._rebuild(arrays)


def block(rows: Sequence[Sequence[Jet]]) -> Jet:
    """Assemble a block matrix from 2-d value-shaped jets."""
    return concatenate([concatenate(list(r), axis=-1) for r in rows], axis=-2)


def as_jet(x, nvars: int, order: int) -> Jet:
    return x if isinstance(x, Jet) else Jet.constant(x, nvars, order)


def inv(a: Jet) -> Jet:
    """Inverse of a square-matrix-valued jet.

    With ``a = a0 + d`` where ``d`` has zero value, the Neumann series
    ``a0^-1 sum_k (-d a0^-1)^k`` terminates after ``order`` terms because
    products of more than ``order`` zero-value jets vanish identically.
    """
    a0inv = np.linalg.inv(a.val)
    d = a - a.val
    x = matmul(d, a0inv)
    n = a.shape[-1]
    term = Jet.constant(np.eye(n), a.nvars, a.order)
    total = term
    for _ in range(a.order):
        term = -matmul(term, x)
        total = total + term
    return matmul(a0inv, total)
