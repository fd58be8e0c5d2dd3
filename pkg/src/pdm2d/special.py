"""Scalar special functions: log-gamma, Jacobi polynomials, factorials."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "JacobiIndex",
    "log_gamma",
    "log_factorial",
    "jacobi",
    "jacobi_recurrence",
    "binomial",
]


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_factorial(n: int) -> float:
    if n < 0:
        raise DomainError(f"factorial of negative integer {n}")
    return math.lgamma(n + 1.0)


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class JacobiIndex:
    """Degree and parameters of P_n^{(a, b)}."""

    n: int
    a: float
    b: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Jacobi degree must be a nonnegative integer, got {self.n!r}")
        if not (self.a > -1.0 and self.b > -1.0):
            raise DomainError(f"Jacobi parameters must exceed -1, got a={self.a}, b={self.b}")


def jacobi_recurrence(n: int, a: float, b: float, z):
    """P_n^{(a,b)}(z) by the ascending three-term recurrence.

    Only arithmetic is used, so ``z`` may be a float, an array or a
    :class:`~pdm2d.jets.Jet`.
    """
    p_prev = z * 0.0 + 1.0
    if n == 0:
        return p_prev
    p = (a - b) / 2.0 + (a + b + 2.0) / 2.0 * z
    for m in range(2, n + 1):
        s = 2.0 * m + a + b
        c0 = 2.0 * m * (m + a + b) * (s - 2.0)
        c1 = (s - 1.0) * s * (s - 2.0)
        c2 = (s - 1.0) * (a * a - b * b)
        c3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * s
        p, p_prev = ((c1 * z + c2) * p - c3 * p_prev) / c0, p
    return p


def jacobi(idx: JacobiIndex, z, order: int = 0):
    """P_n^{(a,b)}(z) or its first/second derivative in z.

    Derivatives use d/dz P_n^{(a,b)} = (n+a+b+1)/2 P_{n-1}^{(a+1,b+1)}.
    """
    if order not in (0, 1, 2):
        raise DomainError(f"derivative order must be 0, 1 or 2, got {order!r}")
    n, a, b = idx.n, idx.a, idx.b
    z = np.asarray(z, dtype=float) if not hasattr(z, "order") else z
    if order > n:
        return z * 0.0
    scale = 1.0
    for m in range(order):
        scale *= (n + a + b + 1.0 + m) / 2.0
    return scale * jacobi_recurrence(n - order, a + order, b + order, z)
