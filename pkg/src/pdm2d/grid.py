"""Tensor grids on the half-strip, grid functions, stencils and quadrature."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .model import ModelParams

__all__ = ["Grid2D", "GridFunction", "fd_weights", "fd_derivative", "inner_product", "gram_matrix",
           "smooth_cutoff"]

MIN_NODES = 4


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], deriv: int) -> np.ndarray:
    """Weights w with sum_j w_j f(s_j h) ~ h^deriv f^(deriv)(0), from Taylor matching."""
    s = np.asarray(offsets, dtype=float)
    m = len(s)
    V = np.vander(s, m, increasing=True).T / np.array([math.factorial(i) for i in range(m)])[:, None]
    rhs = np.zeros(m)
    rhs[deriv] = 1.0
    w = np.linalg.solve(V, rhs)
    w.setflags(write=False)
    return w


def fd_derivative(values: np.ndarray, h: float, axis: int, order: int) -> np.ndarray:
    """4th-order first or second derivative along ``axis``.

    Central 5-point stencils in the interior; 6-point one-sided stencils on
    the two nodes nearest each end.
    """
    if order not in (1, 2):
        raise ValueError("only first and second derivatives are supported")
    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 6:
        raise ValueError(f"need at least 6 nodes along axis {axis} for 4th-order stencils, got {n}")
    out = np.empty_like(f)
    if order == 1:
        out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    else:
        out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (12.0 * h * h)
    width = 5 if order == 1 else 6
    for i in (0, 1):
        w = fd_weights(tuple(range(-i, width - i)), order)
        out[i] = np.tensordot(w, f[:width], axes=1) / h**order
        out[n - 1 - i] = np.tensordot(w[::-1], f[n - width:], axes=1) * (-1) ** order / h**order
    return np.moveaxis(out, 0, axis)


def _composite_weights(n_intervals: int, h: float) -> np.ndarray:
    """Composite Simpson weights on n_intervals + 1 nodes (3/8 rule on the tail when odd)."""
    if n_intervals < 2:
        raise ValueError("need at least two intervals")
    w = np.zeros(n_intervals + 1)
    simpson = n_intervals if n_intervals % 2 == 0 else n_intervals - 3
    if simpson:
        w[:simpson + 1:2] += 2.0
        w[1:simpson:2] += 4.0
        w[0] -= 1.0
        w[simpson] -= 1.0
        w[:simpson + 1] *= h / 3.0
    if n_intervals % 2:
        w[simpson:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


def _gl_panels(a: float, b: float, panels: int, order: int, grading: int = 0,
               ratio: float = 0.2) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule; ``grading`` > 0 splits the first panel
    geometrically toward ``a`` (for integrands like (x-a)^p with fractional p)."""
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    if grading:
        inner = a + (edges[1] - a) * ratio ** np.arange(grading, 0, -1)
        edges = np.concatenate([[a], inner, edges[1:]])
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Tensor grid with quadrature weights; ``uniform`` grids also carry stencils."""

    x: np.ndarray
    y: np.ndarray
    wx: np.ndarray
    wy: np.ndarray
    uniform: bool
    kind: str = "uniform"
    _mesh: tuple = field(default=None, repr=False)

    def __post_init__(self):
        for name, arr in (("x", self.x), ("y", self.y)):
            if arr.ndim != 1 or arr.size < MIN_NODES:
                raise ValueError(f"grid axis {name} needs at least {MIN_NODES} nodes")
            if np.any(np.diff(arr) <= 0):
                raise ValueError(f"grid axis {name} must be strictly increasing")
        if self.x[0] <= 0:
            raise ValueError("grid must not contain x <= 0")
        object.__setattr__(self, "_mesh", tuple(np.meshgrid(self.x, self.y, indexing="ij")))

    @classmethod
    def uniform_grid(cls, p: ModelParams, nx: int, ny: int, x_max: float) -> "Grid2D":
        """x_i = i*hx (i = 1..nx, x_nx = x_max); y_j strictly inside the walls.

        Quadrature weights treat the field as vanishing at x = 0 and at the walls.
        """
        if x_max <= 0:
            raise ValueError("x_max must be positive")
        a = p.half_width
        hx, hy = x_max / nx, 2 * a / (ny + 1)
        x = hx * np.arange(1, nx + 1)
        y = -a + hy * np.arange(1, ny + 1)
        wx = _composite_weights(nx, hx)[1:]
        wy = _composite_weights(ny + 1, hy)[1:-1]
        return cls(x, y, wx, wy, True, "uniform")

    @classmethod
    def gauss_legendre(cls, p: ModelParams, x_max: float, panels_x: int = 24, panels_y: int = 8,
                       order: int = 8, x_min: float = 0.0, grading: int = 0) -> "Grid2D":
        """Gauss-Legendre panel grid over (x_min, x_max) x (-pi/2q, pi/2q).

        ``grading`` adds that many geometrically shrinking panels at x_min.
        """
        a = p.half_width
        x, wx = _gl_panels(x_min, x_max, panels_x, order, grading)
        y, wy = _gl_panels(-a, a, panels_y, order)
        return cls(x, y, wx, wy, False, "gauss-legendre")

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def hy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.size, self.y.size)

    @property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return self._mesh

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.wx, self.wy)

    def sample(self, f, label: str | None = None) -> "GridFunction":
        X, Y = self.mesh
        return GridFunction(self, np.asarray(f.values(X, Y), dtype=float), label or f.label)

    def same_as(self, other: "Grid2D") -> bool:
        return self is other or (self.shape == other.shape and np.array_equal(self.x, other.x)
                                 and np.array_equal(self.y, other.y))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "nx": self.shape[0], "ny": self.shape[1],
                "x_min": float(self.x[0]), "x_max": float(self.x[-1]),
                "y_min": float(self.y[0]), "y_max": float(self.y[-1])}


class GridFunction:
    """Real values on the nodes of a :class:`Grid2D`."""

    __array_priority__ = 100

    def __init__(self, grid: Grid2D, values, label: str = "f"):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(f"values have shape {values.shape}, grid has {grid.shape}")
        self.grid, self.values, self.label = grid, values, label

    def _other(self, other):
        if isinstance(other, GridFunction):
            if not self.grid.same_as(other.grid):
                raise ValueError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other), self.label)

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other), self.label)

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values, self.label)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other), self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values, self.label)

    def norm_l2(self) -> float:
        return math.sqrt(max(inner_product(self, self), 0.0))

    def norm_sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self) -> str:
        return f"<GridFunction {self.label} on {self.grid.shape}>"


def inner_product(f: GridFunction, g: GridFunction) -> float:
    """Quadrature of f*g over the half-strip."""
    if not f.grid.same_as(g.grid):
        raise ValueError("inner product of grid functions on different grids")
    return float(np.einsum("i,ij,j->", f.grid.wx, f.values * g.values, f.grid.wy))


def gram_matrix(fields, grid: Grid2D) -> np.ndarray:
    """Matrix of quadrature inner products of fields (or grid functions) on ``grid``."""
    vals = [f.values if isinstance(f, GridFunction) else grid.sample(f).values for f in fields]
    V = np.stack([v.ravel() for v in vals])
    return (V * grid.weights.ravel()) @ V.T


def smooth_cutoff(nodes: np.ndarray, margin_nodes: int = 3, power: int = 8) -> np.ndarray:
    """Bump (4t(1-t))^power along one axis, with t running from 0 to 1 between the
    nodes ``margin_nodes`` in from each end; zero outside.

    The bump is C^(power-1) across its edges, enough for the fourth-order
    compositions checked on grids.
    """
    lo, hi = nodes[margin_nodes], nodes[-1 - margin_nodes]
    t = np.clip((nodes - lo) / (hi - lo), 0.0, 1.0)
    return (4.0 * t * (1.0 - t)) ** power
