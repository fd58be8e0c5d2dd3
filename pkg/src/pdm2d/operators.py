"""Second-order differential operators with position-dependent coefficients.

Operators store their coefficients as numpy-only callables, so the same
coefficient code evaluates on plain arrays (finite-difference path) and on
Taylor jets (analytic path).  Products of operators are formed by applying
factors one after the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fields import Field, JetField
from .grid import Grid2D, GridFunction, fd_derivative
from .jets import Jet, derivative_of, variables
from .model import ModelParams

__all__ = [
    "DiffOp2",
    "DiffOp1",
    "OPERATOR_KINDS",
    "build_operator",
    "operator_1d",
    "first_order_operator",
    "schrodinger_operator",
    "apply",
    "OperatorImage",
    "linear_combination",
]

Coef = Optional[Callable]

# (attribute, x-order, y-order)
_TERMS_2D = (("c_xx", 2, 0), ("c_xy", 1, 1), ("c_yy", 0, 2), ("c_x", 1, 0), ("c_y", 0, 1), ("c_0", 0, 0))
_TERMS_1D = (("c_xx", 2), ("c_x", 1), ("c_0", 0))


@dataclass(frozen=True)
class DiffOp2:
    """c_xx dxx + c_xy dxy + c_yy dyy + c_x dx + c_y dy + c_0.

    Each coefficient is ``None`` (identically zero) or a callable ``(x, y)``.
    """

    name: str
    c_xx: Coef = None
    c_xy: Coef = None
    c_yy: Coef = None
    c_x: Coef = None
    c_y: Coef = None
    c_0: Coef = None

    @property
    def order(self) -> int:
        for attr, i, j in _TERMS_2D:
            if getattr(self, attr) is not None and i + j == 2:
                return 2
        return 1 if (self.c_x or self.c_y) else 0

    def terms(self):
        for attr, i, j in _TERMS_2D:
            c = getattr(self, attr)
            if c is not None:
                yield attr, i, j, c

    def coefficients(self, x, y) -> dict[str, np.ndarray]:
        """Coefficient values at points (zeros for absent terms)."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = {}
        for attr, _, _ in _TERMS_2D:
            c = getattr(self, attr)
            out[attr] = np.zeros_like(x) if c is None else np.asarray(c(x, y), dtype=float) * np.ones_like(x)
        return out

    def shifted(self, const: float, name: str | None = None) -> "DiffOp2":
        """The operator plus ``const`` times the identity."""
        base = self.c_0
        c0 = (lambda x, y: base(x, y) + const) if base is not None else (lambda x, y: x * 0.0 + const)
        return DiffOp2(name or f"({self.name} + {const:g})", self.c_xx, self.c_xy, self.c_yy,
                       self.c_x, self.c_y, c0)


@dataclass(frozen=True)
class DiffOp1:
    """c_xx d^2/dx^2 + c_x d/dx + c_0 with coefficients depending on x only."""

    name: str
    c_xx: Coef = None
    c_x: Coef = None
    c_0: Coef = None

    @property
    def order(self) -> int:
        return 2 if self.c_xx is not None else (1 if self.c_x is not None else 0)

    def terms(self):
        for attr, i in _TERMS_1D:
            c = getattr(self, attr)
            if c is not None:
                yield attr, i, 0, c

    def coefficients(self, x) -> dict[str, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return {attr: (np.zeros_like(x) if getattr(self, attr) is None
                       else np.asarray(getattr(self, attr)(x), dtype=float) * np.ones_like(x))
                for attr, _ in _TERMS_1D}

    def shifted(self, const: float, name: str | None = None) -> "DiffOp1":
        base = self.c_0
        c0 = (lambda x: base(x) + const) if base is not None else (lambda x: x * 0.0 + const)
        return DiffOp1(name or f"({self.name} + {const:g})", self.c_xx, self.c_x, c0)


# --- the model operators ----------------------------------------------------

def _model_2d(kind: str, p: ModelParams) -> DiffOp2:
    q, k, v0 = p.q, p.k, p.v0
    ch = lambda x: np.cosh(x * q)  # noqa: E731
    sh = lambda x: np.sinh(x * q)  # noqa: E731
    sn = lambda y: np.sin(y * q)  # noqa: E731
    cs = lambda y: np.cos(y * q)  # noqa: E731

    def csch2(x):
        return 1.0 / sh(x) ** 2

    if kind in ("H", "H1"):
        if kind == "H":
            def c0(x, y):
                return ch(x) ** 2 * (-q * q) + csch2(x) * (q * q * k * (k - 1)) + q * q * v0
        else:
            def c0(x, y):
                return ch(x) ** 2 * (-q * q) + csch2(x) * (q * q * k * (k + 1)) + q * q * (v0 + 2 * k)
        return DiffOp2(
            f"{kind}(k={k:g})",
            c_xx=lambda x, y: -ch(x) ** 2 + y * 0.0,
            c_yy=lambda x, y: -ch(x) ** 2 + y * 0.0,
            c_x=lambda x, y: sh(x) * ch(x) * (-2 * q) + y * 0.0,
            c_0=c0,
        )
    if kind == "eta":
        return DiffOp2(
            f"eta(k={k:g})",
            c_x=lambda x, y: ch(x) * sn(y),
            c_y=lambda x, y: -sh(x) * cs(y),
            c_0=lambda x, y: sn(y) * (sh(x) * q - q * k / sh(x)),
        )
    if kind == "eta_dagger":
        return DiffOp2(
            f"eta_dagger(k={k:g})",
            c_x=lambda x, y: -ch(x) * sn(y),
            c_y=lambda x, y: sh(x) * cs(y),
            c_0=lambda x, y: sn(y) * (-sh(x) * q - q * k / sh(x)),
        )
    if kind in ("R", "R1"):
        def c0(x, y):
            s2, S2 = sh(x) ** 2, sn(y) ** 2
            base = (q * q * (s2 - S2 - 3 * s2 * S2) - q * q * k * (1 + S2 / s2)
                    + q * q * k * k * S2 / s2)
            if kind == "R1":
                base = base + (1 + S2 / s2) * (2 * q * q * k)
            return base

        return DiffOp2(
            f"{kind}(k={k:g})",
            c_xx=lambda x, y: -(ch(x) ** 2) * sn(y) ** 2,
            c_xy=lambda x, y: sh(x) * ch(x) * sn(y) * cs(y) * 2.0,
            c_yy=lambda x, y: -(sh(x) ** 2) * cs(y) ** 2,
            c_x=lambda x, y: sh(x) * ch(x) * (1 - 4 * sn(y) ** 2) * q,
            c_y=lambda x, y: sn(y) * cs(y) * (1 + 4 * sh(x) ** 2) * q,
            c_0=c0,
        )
    if kind == "L":
        return DiffOp2("L", c_yy=lambda x, y: x * 0.0 + y * 0.0 - 1.0)
    raise ValueError(f"unknown operator kind {kind!r}")


def operator_1d(kind: str, q: float, k: float, l: int) -> DiffOp1:
    """1D operator at arbitrary real k (the factorization needs k - 1, possibly <= 0)."""
    ch = lambda x: np.cosh(x * q)  # noqa: E731
    sh = lambda x: np.sinh(x * q)  # noqa: E731
    if kind == "H_l":
        return DiffOp1(
            f"H_l(k={k:g},l={l})",
            c_xx=lambda x: -ch(x) ** 2,
            c_x=lambda x: sh(x) * ch(x) * (-2 * q),
            c_0=lambda x: ch(x) ** 2 * (q * q * l * (l + 2)) + (q * q * k * (k - 1)) / sh(x) ** 2,
        )
    # A = cosh d/dx + b(x); its adjoint is -cosh d/dx - q sinh + b(x).
    if kind in ("A", "A_dagger"):
        b = lambda x: sh(x) * (q * (l + 2)) - (q * k) / sh(x)  # noqa: E731
    elif kind in ("A_tilde", "A_tilde_dagger"):
        b = lambda x: sh(x) * (-q * l) - (q * k) / sh(x)  # noqa: E731
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    name = f"{kind}(k={k:g},l={l})"
    if kind.endswith("dagger"):
        return DiffOp1(name, c_x=lambda x: -ch(x), c_0=lambda x: b(x) - sh(x) * q)
    return DiffOp1(name, c_x=ch, c_0=b)


OPERATOR_KINDS = ("H", "H1", "eta", "eta_dagger", "R", "R1", "L",
                  "H_l", "A", "A_dagger", "A_tilde", "A_tilde_dagger")


def build_operator(kind: str, p: ModelParams, l: int | None = None):
    """Operator of the model: 2D kinds return :class:`DiffOp2`, 1D kinds :class:`DiffOp1`.

    2D: H, H1, eta, eta_dagger, R, R1, L.  1D (need ``l``): H_l, A, A_dagger,
    A_tilde, A_tilde_dagger.
    """
    if kind in ("H", "H1", "eta", "eta_dagger", "R", "R1", "L"):
        return _model_2d(kind, p)
    if kind in ("H_l", "A", "A_dagger", "A_tilde", "A_tilde_dagger"):
        if l is None:
            raise ValueError(f"operator kind {kind!r} needs the transverse index l")
        return operator_1d(kind, p.q, p.k, l)
    raise ValueError(f"unknown operator kind {kind!r}")


def first_order_operator(A1: Callable, A2: Callable, B: Callable, name: str = "eta",
                         dagger: bool = False) -> DiffOp2:
    """A1 dx + A2 dy + B, or its formal adjoint -A1 dx - A2 dy - (dx A1 + dy A2) + B."""
    if not dagger:
        return DiffOp2(name, c_x=A1, c_y=A2, c_0=B)
    dA1, dA2 = derivative_of(A1, 1, 0), derivative_of(A2, 0, 1)
    return DiffOp2(name + "_dagger", c_x=lambda x, y: -A1(x, y), c_y=lambda x, y: -A2(x, y),
                   c_0=lambda x, y: B(x, y) - dA1(x, y) - dA2(x, y))


def schrodinger_operator(mass: Callable, potential: Callable, name: str = "H") -> DiffOp2:
    """-d_i (1/M) d_i + V for a mass M(x, y) and potential V(x, y)."""
    inv = lambda x, y: 1.0 / mass(x, y)  # noqa: E731
    dinv_x, dinv_y = derivative_of(inv, 1, 0), derivative_of(inv, 0, 1)
    return DiffOp2(name, c_xx=lambda x, y: -inv(x, y), c_yy=lambda x, y: -inv(x, y),
                   c_x=lambda x, y: -dinv_x(x, y), c_y=lambda x, y: -dinv_y(x, y), c_0=potential)


# --- application ------------------------------------------------------------

def _as_jet(v, like: Jet) -> Jet:
    if isinstance(v, Jet):
        return v
    return Jet.constant(np.broadcast_to(np.asarray(v, dtype=float), like.shape), like.order, like.shape)


class OperatorImage(Field):
    """Lazy image ``op f`` of a field; itself a field, so images compose."""

    def __init__(self, op, f: Field):
        self.op, self.f = op, f
        self.label = f"{op.name}[{f.label}]"

    def jet(self, x, y, order: int) -> Jet:
        F = self.f.jet(x, y, order + self.op.order)
        X, Y = variables(x, y, order)
        out = None
        for _, i, j, c in self.op.terms():
            coef = c(X, Y) if isinstance(self.op, DiffOp2) else c(X)
            term = F.diff(i, j)
            if term.order > order:
                term = term.truncate(order)
            term = _as_jet(coef, term) * term
            out = term if out is None else out + term
        if out is None:
            return Jet.constant(0.0, order, X.shape)
        return out


def linear_combination(coeffs, fields, label: str | None = None):
    """sum_i coeffs[i] * fields[i] for fields or grid functions."""
    coeffs, fields = list(coeffs), list(fields)
    if all(isinstance(f, GridFunction) for f in fields):
        out = fields[0] * coeffs[0]
        for c, f in zip(coeffs[1:], fields[1:]):
            out = out + f * c
        return out

    def jet_fn(x, y, order):
        out = None
        for c, f in zip(coeffs, fields):
            term = f.jet(x, y, order) * float(c)
            out = term if out is None else out + term
        return out

    return JetField(label or "+".join(f"{c:g}*{f.label}" for c, f in zip(coeffs, fields)), jet_fn)


def apply(op, f, grid: Grid2D | None = None):
    """Apply ``op`` to a field (exact, lazily) or to a grid function (4th-order FD).

    For a field, the result is an :class:`OperatorImage`; pass ``grid`` to
    sample it immediately into a :class:`GridFunction`.
    """
    if isinstance(f, GridFunction):
        return _apply_fd(op, f)
    if isinstance(f, Field):
        img = OperatorImage(op, f)
        return grid.sample(img) if grid is not None else img
    raise TypeError(f"cannot apply an operator to {type(f).__name__}")


def _apply_fd(op, g: GridFunction) -> GridFunction:
    grid = g.grid
    if not grid.uniform:
        raise ValueError("finite-difference application needs a uniform grid")
    # column/row axes: coefficients are evaluated on 1D data and broadcast
    X, Y = grid.x[:, None], grid.y[None, :]
    out = np.zeros_like(g.values)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def deriv(i, j):
        if (i, j) not in cache:
            v = g.values
            if i:
                v = fd_derivative(v, grid.hx, axis=0, order=i) if j == 0 else \
                    fd_derivative(deriv(0, j), grid.hx, axis=0, order=i)
            elif j:
                v = fd_derivative(v, grid.hy, axis=1, order=j)
            cache[(i, j)] = v
        return cache[(i, j)]

    for _, i, j, c in op.terms():
        coef = c(X, Y) if isinstance(op, DiffOp2) else c(X)
        out = out + coef * deriv(i, j)
    return GridFunction(grid, out, f"{op.name}[{g.label}]")
