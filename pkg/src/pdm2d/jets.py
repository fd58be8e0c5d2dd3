"""Truncated bivariate Taylor arithmetic.

A :class:`Jet` holds the normalized Taylor coefficients

    f(x0 + dx, y0 + dy) = sum_{i + j <= K} c[i, j] dx**i dy**j

at every point of an array of expansion points.  Jets implement the numpy
ufunc protocol for the handful of functions used by the model (``np.cosh``,
``np.tanh``, ``**`` ...), so closed forms written against numpy evaluate
unchanged on jets and yield exact partial derivatives up to order ``K``.
Differential operators are applied to jets by shifting coefficients, which
makes operator products (``eta H``, ``H R`` ...) exact up to round-off.
"""
from __future__ import annotations

from math import factorial

import numpy as np

__all__ = ["Jet", "variables", "derivative_of", "is_jet"]


def _valid_mask(order: int) -> np.ndarray:
    i, j = np.indices((order + 1, order + 1))
    return i + j <= order


class Jet:
    """Taylor jet of total order ``order`` over an array of points."""

    __slots__ = ("c", "order")

    def __init__(self, c: np.ndarray, order: int):
        self.c = c
        self.order = order

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        value = np.broadcast_to(np.asarray(value, dtype=float), shape)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value, axis: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        if order >= 1:
            c[(1, 0) if axis == 0 else (0, 1)] = 1.0
        return cls(c, order)

    # -- access -----------------------------------------------------------
    @property
    def shape(self):
        return self.c.shape[2:]

    @property
    def value(self) -> np.ndarray:
        return self.c[0, 0]

    def partial(self, i: int, j: int) -> np.ndarray:
        """``d^{i+j} f / dx^i dy^j`` at the expansion points."""
        if i + j > self.order:
            raise ValueError(f"partial ({i},{j}) exceeds jet order {self.order}")
        return self.c[i, j] * (factorial(i) * factorial(j))

    def diff(self, i: int = 0, j: int = 0) -> "Jet":
        """Jet of ``d^{i+j} f / dx^i dy^j``; its order drops by ``i + j``."""
        out = self
        for _ in range(i):
            out = out._d(0)
        for _ in range(j):
            out = out._d(1)
        return out

    def _d(self, axis: int) -> "Jet":
        K = self.order
        if K == 0:
            raise ValueError("cannot differentiate a jet of order 0")
        c = np.zeros((K, K) + self.shape)
        idx = np.arange(1, K + 1).reshape((-1,) + (1,) * (1 + len(self.shape)))
        if axis == 0:
            c[:, :] = self.c[1:, :K] * idx
        else:
            c[:, :] = self.c[:K, 1:] * np.moveaxis(idx, 0, 1)
        c[~_valid_mask(K - 1)] = 0.0
        return Jet(c, K - 1)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        c = self.c[: order + 1, : order + 1].copy()
        c[~_valid_mask(order)] = 0.0
        return Jet(c, order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.shape})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                K = min(self.order, other.order)
                return other.truncate(K) if other.order > K else other
            return other
        return Jet.constant(other, self.order, np.shape(other))

    def _pair(self, other):
        other = self._coerce(other)
        a = self if self.order == other.order else self.truncate(other.order)
        return a, other

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            shape = np.broadcast_shapes(self.shape, other.shape)
            c = np.broadcast_to(self.c, self.c.shape[:2] + shape).copy()
            c[0, 0] += other
            return Jet(c, self.order)
        a, b = self._pair(other)
        return Jet(a.c + b.c, a.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other, dtype=float), self.order)
        a, b = self._pair(other)
        K = a.order
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros((K + 1, K + 1) + shape)
        for i in range(K + 1):
            for j in range(K + 1 - i):
                aij = a.c[i, j]
                out[i:, j:] += aij * b.c[: K + 1 - i, : K + 1 - j]
        out[~_valid_mask(K)] = 0.0
        return Jet(out, K)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other, dtype=float), self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        p = float(p)
        if p.is_integer() and 0 <= p <= 4:
            out = Jet.constant(1.0, self.order, self.shape)
            for _ in range(int(p)):
                out = out * self
            return out
        return self._compose(_power_derivatives(self.value, p, self.order))

    # -- composition with univariate functions ----------------------------
    def _compose(self, derivs) -> "Jet":
        """g(f) from the list [g(f0), g'(f0), ..., g^(K)(f0)]."""
        K = self.order
        delta = Jet(self.c.copy(), K)
        delta.c[0, 0] = 0.0
        out = Jet.constant(derivs[0], K, np.shape(derivs[0]))
        power = None
        for m in range(1, K + 1):
            power = delta if power is None else power * delta
            out = out + power * (derivs[m] / factorial(m))
        return out

    def reciprocal(self) -> "Jet":
        return self._compose(_power_derivatives(self.value, -1.0, self.order))

    def exp(self):
        e = np.exp(self.value)
        return self._compose([e] * (self.order + 1))

    def log(self):
        v = self.value
        d = [np.log(v)] + [(-1.0) ** (m - 1) * factorial(m - 1) / v**m
                           for m in range(1, self.order + 1)]
        return self._compose(d)

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [s, c, -s, -c]
        return self._compose([cycle[m % 4] for m in range(self.order + 1)])

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [c, -s, -c, s]
        return self._compose([cycle[m % 4] for m in range(self.order + 1)])

    def sinh(self):
        s, c = np.sinh(self.value), np.cosh(self.value)
        return self._compose([s if m % 2 == 0 else c for m in range(self.order + 1)])

    def cosh(self):
        s, c = np.sinh(self.value), np.cosh(self.value)
        return self._compose([c if m % 2 == 0 else s for m in range(self.order + 1)])

    def tanh(self):
        return self.sinh() / self.cosh()

    def sqrt(self):
        return self ** 0.5

    # -- numpy interoperability ------------------------------------------
    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            return NotImplemented
        if ufunc in _BINARY:
            a, b = inputs
            return _BINARY[ufunc](a, b)
        if ufunc in _UNARY:
            (a,) = inputs
            return _UNARY[ufunc](a)
        return NotImplemented


def _power_derivatives(v, p: float, order: int):
    out = []
    coef = 1.0
    for m in range(order + 1):
        out.append(coef * v ** (p - m) if coef != 0.0 else np.zeros_like(v))
        coef *= p - m
    return out


_BINARY = {
    np.add: lambda a, b: a + b if isinstance(a, Jet) else b + a,
    np.subtract: lambda a, b: a - b if isinstance(a, Jet) else (-b) + a,
    np.multiply: lambda a, b: a * b if isinstance(a, Jet) else b * a,
    np.true_divide: lambda a, b: a / b if isinstance(a, Jet) else b.reciprocal() * a,
    np.power: lambda a, b: a ** b,
}

_UNARY = {
    np.negative: lambda a: -a,
    np.positive: lambda a: a,
    np.exp: Jet.exp,
    np.log: Jet.log,
    np.sin: Jet.sin,
    np.cos: Jet.cos,
    np.sinh: Jet.sinh,
    np.cosh: Jet.cosh,
    np.tanh: Jet.tanh,
    np.sqrt: Jet.sqrt,
    np.reciprocal: Jet.reciprocal,
    np.square: lambda a: a * a,
}


def is_jet(v) -> bool:
    return isinstance(v, Jet)


def variables(x, y, order: int) -> tuple[Jet, Jet]:
    """Coordinate jets ``(X, Y)`` expanded at the points ``(x, y)``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return Jet.variable(x, 0, order), Jet.variable(y, 1, order)


def derivative_of(fn, i: int = 0, j: int = 0):
    """Wrap a jet-generic ``fn(x, y)`` into one returning ``d^{i+j} fn``.

    The wrapper accepts either plain arrays or coordinate jets built by
    :func:`variables`; in the latter case the result is a jet of the same
    order, obtained by re-expanding ``fn`` at a higher order.
    """

    def wrapped(x, y):
        if isinstance(x, Jet):
            K = x.order
            X, Y = variables(x.value, y.value, K + i + j)
            return fn(X, Y).diff(i, j)
        X, Y = variables(x, y, i + j)
        return fn(X, Y).partial(i, j)

    return wrapped
