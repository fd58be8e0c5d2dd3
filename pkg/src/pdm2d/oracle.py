"""Finite-difference eigensolvers used as independent checks of the spectrum.

Two discretizations are provided:

* the x equation mapped onto the trigonometric Poschl-Teller problem
  -u'' + k(k-1) csc^2 z u + (l+3/2)(l+1/2) sec^2 z u on (0, pi/2), on a
  cell-centred grid, solved as a symmetric tridiagonal matrix;
* the full 2D operator in flux form on a truncated half-strip.

The 2D matrix is A = Tx (x) I + C (x) Ty + V (x) I where Ty is the Dirichlet
second difference in y and C = diag(cosh^2 q x_i).  Ty has exactly known sine
eigenvectors, so in that basis A splits into one tridiagonal x problem per y
mode (``separate_y``).  This is an exact rewriting of the same matrix, not an
approximation; the full assembled matrix is kept for small grids and tests.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import brentq

from .errors import DomainError
from .model import ModelParams, energy_level

__all__ = [
    "PT_MIN_GRID",
    "pt_potential",
    "pt_exact",
    "fd_eigs_pt",
    "pt_to_energy",
    "FdConfig",
    "assemble_2d",
    "fd_eigs_2d",
    "lanczos_smallest",
    "LanczosResult",
    "cluster_multiplicities",
    "convergence_study",
    "observed_order",
    "ConvergenceRow",
    "Fd2dResult",
    "y_mode_eigenvalues",
    "pt_level_energy",
    "exact_levels",
]

PT_MIN_GRID = 100
DENSE_CAP = 4000


# --- 1D Poschl-Teller oracle ------------------------------------------------

def pt_potential(k: float, l: int, z):
    z = np.asarray(z, dtype=float)
    return k * (k - 1) / np.sin(z) ** 2 + (l + 1.5) * (l + 0.5) / np.cos(z) ** 2


def pt_exact(k: float, l: int, n: int) -> float:
    """(kappa + lambda + 2n)^2 with kappa = k, lambda = l + 3/2."""
    return (k + l + 1.5 + 2 * n) ** 2


def pt_to_energy(p: ModelParams, pt_value: float) -> float:
    """Energy of H corresponding to a Poschl-Teller eigenvalue."""
    return p.q**2 * (pt_value - (p.k - 0.5) ** 2 + p.v0)


def fd_eigs_pt(p: ModelParams, l: int, n_grid: int, n_eigs: int = 4,
               first_order: bool = False) -> np.ndarray:
    """Lowest ``n_eigs`` eigenvalues of the Poschl-Teller problem.

    Nodes z_i = (i - 1/2) h, h = (pi/2)/n_grid; the Dirichlet walls sit half a
    cell outside the first and last nodes (odd ghost values), giving a
    second-order scheme.  ``first_order`` samples the potential at z_i + h/4
    instead, a deliberately first-order variant used to test order estimation.
    """
    if n_grid < PT_MIN_GRID:
        raise DomainError(f"n_grid must be at least {PT_MIN_GRID}, got {n_grid}")
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    if not 1 <= n_eigs <= n_grid:
        raise DomainError(f"n_eigs must lie in [1, {n_grid}]")
    if p.k < 0.5:
        warnings.warn("for k < 1/2 the scheme converges to the z^(1-k) branch, not the model's "
                      "z^k solutions; eigenvalues are not comparable", RuntimeWarning, stacklevel=2)
    h = 0.5 * math.pi / n_grid
    z = (np.arange(1, n_grid + 1) - 0.5) * h
    zs = z + 0.25 * h if first_order else z
    diag = 2.0 / h**2 + pt_potential(p.k, l, zs)
    diag[0] += 1.0 / h**2
    diag[-1] += 1.0 / h**2
    off = np.full(n_grid - 1, -1.0 / h**2)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, n_eigs - 1))


# --- 2D oracle --------------------------------------------------------------

@dataclass(frozen=True)
class FdConfig:
    """Grid, truncation and solver settings for the 2D oracle.

    nx, ny count interior nodes; Dirichlet nodes sit at x = 0, x = x_max and
    at the walls.  ``x_max`` is in units of 1/q.
    """

    nx: int = 240
    ny: int = 96
    x_max: float = 5.0
    n_eigs: int = 6
    solver: str = "dense"
    separate_y: bool = True
    lanczos_max_iter: int = 1000
    lanczos_tol: float = 1e-12
    seed: int = 0
    dense_cap: int = DENSE_CAP

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise DomainError(f"grid sizes must be at least 16, got {self.nx}x{self.ny}")
        if not self.x_max > 0:
            raise DomainError(f"x_max must be positive, got {self.x_max!r}")
        if self.solver not in ("dense", "lanczos"):
            raise DomainError(f"solver must be 'dense' or 'lanczos', got {self.solver!r}")
        if self.n_eigs < 1:
            raise DomainError("n_eigs must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def _axes(p: ModelParams, cfg: FdConfig):
    X = cfg.x_max / p.q
    hx = X / (cfg.nx + 1)
    a = p.half_width
    hy = 2 * a / (cfg.ny + 1)
    x = hx * np.arange(1, cfg.nx + 1)
    y = -a + hy * np.arange(1, cfg.ny + 1)
    return x, y, hx, hy


def _x_parts(p: ModelParams, x: np.ndarray, hx: float):
    """Flux-form -d_x cosh^2 d_x (diag, off), cosh^2 at nodes, and the potential."""
    q, k = p.q, p.k
    mid = np.concatenate([x - 0.5 * hx, [x[-1] + 0.5 * hx]])
    pm = np.cosh(q * mid) ** 2
    diag = (pm[:-1] + pm[1:]) / hx**2
    off = -pm[1:-1] / hx**2
    c = np.cosh(q * x) ** 2
    v = -(q * q) * c + q * q * k * (k - 1) / np.sinh(q * x) ** 2 + q * q * p.v0
    return diag, off, c, v


def assemble_2d(p: ModelParams, cfg: FdConfig) -> sp.csr_matrix:
    """Full sparse matrix; node (i, j) has index i * ny + j."""
    x, y, hx, hy = _axes(p, cfg)
    dx, ox, c, v = _x_parts(p, x, hx)
    Tx = sp.diags([ox, dx + v, ox], [-1, 0, 1])
    ny = cfg.ny
    Ty = sp.diags([np.full(ny - 1, -1.0), np.full(ny, 2.0), np.full(ny - 1, -1.0)], [-1, 0, 1]) / hy**2
    A = sp.kron(Tx, sp.identity(ny)) + sp.kron(sp.diags(c), Ty)
    return sp.csr_matrix(A)


def y_mode_eigenvalues(ny: int, hy: float) -> np.ndarray:
    """Eigenvalues of the Dirichlet second difference: (4/hy^2) sin^2(m pi / (2(ny+1)))."""
    m = np.arange(1, ny + 1)
    return 4.0 / hy**2 * np.sin(m * math.pi / (2 * (ny + 1))) ** 2


@dataclass
class LanczosResult:
    values: np.ndarray
    iterations: int
    converged: bool
    residuals: np.ndarray


def lanczos_smallest(matvec: Callable[[np.ndarray], np.ndarray], n: int, n_eigs: int,
                     max_iter: int = 600, tol: float = 1e-12, seed: int = 0,
                     check_every: int = 10) -> LanczosResult:
    """Smallest eigenvalues of a symmetric operator by Lanczos with full reorthogonalization.

    Stops when the Ritz residual bound |beta_j s_j| of each wanted pair falls
    below ``tol * max(1, |theta|)``, when an invariant subspace is found, or at
    ``max_iter`` steps (then ``converged`` is False).
    """
    if n_eigs > n:
        raise DomainError(f"asked for {n_eigs} eigenvalues of a {n}-dimensional operator")
    m = min(max_iter, n)
    rng = np.random.default_rng(seed)
    V = np.zeros((m + 1, n))
    v = rng.standard_normal(n)
    V[0] = v / np.linalg.norm(v)
    alpha, beta = np.zeros(m), np.zeros(m)
    theta = np.array([])
    bounds = np.array([np.inf])
    steps = 0
    for j in range(m):
        w = matvec(V[j])
        alpha[j] = V[j] @ w
        w = w - alpha[j] * V[j] - (beta[j - 1] * V[j - 1] if j else 0.0)
        for _ in range(2):
            w -= V[: j + 1].T @ (V[: j + 1] @ w)
        beta[j] = np.linalg.norm(w)
        steps = j + 1
        done = beta[j] <= 1e-14 * max(1.0, abs(alpha[j])) or steps == m
        if steps >= n_eigs and (done or steps % check_every == 0):
            theta, S = eigh_tridiagonal(alpha[:steps], beta[: steps - 1])
            bounds = np.abs(beta[j] * S[-1, :n_eigs])
            if done or np.all(bounds <= tol * np.maximum(1.0, np.abs(theta[:n_eigs]))):
                break
        V[j + 1] = w / beta[j]
    converged = bool(np.all(bounds <= tol * np.maximum(1.0, np.abs(theta[:n_eigs])))) if theta.size else False
    return LanczosResult(theta[:n_eigs], steps, converged, bounds[:n_eigs])


def _tridiagonal_smallest(diag, off, n_eigs, cfg: FdConfig):
    n = diag.size
    k = min(n_eigs, n)
    if cfg.solver == "dense":
        return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1)), None

    def matvec(u):
        out = diag * u
        out[:-1] += off * u[1:]
        out[1:] += off * u[:-1]
        return out

    res = lanczos_smallest(matvec, n, k, cfg.lanczos_max_iter, cfg.lanczos_tol, cfg.seed)
    return res.values, res


@dataclass
class Fd2dResult:
    eigenvalues: np.ndarray
    config: FdConfig
    runtime_s: float
    lanczos_converged: bool | None = None
    lanczos_iterations: int | None = None
    meta: dict = field(default_factory=dict)


def fd_eigs_2d(p: ModelParams, cfg: FdConfig = FdConfig(), full: bool = False):
    """Smallest eigenvalues of the flux-form 2D matrix (ascending).

    Returns the eigenvalue array, or a :class:`Fd2dResult` with run metadata
    when ``full`` is set.
    """
    t0 = time.perf_counter()
    x, y, hx, hy = _axes(p, cfg)
    conv, iters = None, None
    if cfg.separate_y:
        dx, ox, c, v = _x_parts(p, x, hx)
        mu = y_mode_eigenvalues(cfg.ny, hy)
        vals, conv, iters = [], True, 0
        for m in range(cfg.ny):
            ev, res = _tridiagonal_smallest(dx + v + mu[m] * c, ox, cfg.n_eigs, cfg)
            vals.append(ev)
            if res is not None:
                conv = conv and res.converged
                iters = max(iters, res.iterations)
            # block minima grow with the y mode, so later blocks cannot contribute
            collected = np.sort(np.concatenate(vals))
            if collected.size >= cfg.n_eigs and ev[0] > collected[cfg.n_eigs - 1]:
                break
        if cfg.solver == "dense":
            conv, iters = None, None
        out = np.sort(np.concatenate(vals))[: cfg.n_eigs]
    else:
        A = assemble_2d(p, cfg)
        n = A.shape[0]
        if cfg.solver == "dense":
            if n > cfg.dense_cap:
                raise DomainError(f"matrix dimension {n} exceeds the dense cap {cfg.dense_cap}; "
                                  "use solver='lanczos' or separate_y=True")
            out = eigh(A.toarray(), eigvals_only=True, subset_by_index=(0, cfg.n_eigs - 1))
        else:
            res = lanczos_smallest(A.dot, n, cfg.n_eigs, cfg.lanczos_max_iter, cfg.lanczos_tol, cfg.seed)
            out, conv, iters = res.values, res.converged, res.iterations
    dt = time.perf_counter() - t0
    if not full:
        return out
    return Fd2dResult(out, cfg, dt, conv, iters,
                      {"hx": hx, "hy": hy, "x_max_over_q": cfg.x_max})


def cluster_multiplicities(values: Sequence[float], rel_tol: float = 0.02) -> list[int]:
    """Group ascending values whose consecutive relative gap is below ``rel_tol``."""
    vals = sorted(values)
    if not vals:
        return []
    counts = [1]
    for a, b in zip(vals, vals[1:]):
        if abs(b - a) <= rel_tol * max(abs(a), abs(b)):
            counts[-1] += 1
        else:
            counts.append(1)
    return counts


# --- convergence ------------------------------------------------------------

@dataclass
class ConvergenceRow:
    h: float
    value: float
    order: float | None = None
    error: float | None = None
    order_vs_exact: float | None = None


def observed_order(h: Sequence[float], v: Sequence[float]) -> float:
    """Order p from three levels assuming v(h) = v* + c h^p.

    Solves (v1 - v2)/(v2 - v3) = (h1^p - h2^p)/(h2^p - h3^p), which reduces to
    log ratio / log(h1/h2) for a constant refinement ratio.
    """
    (h1, h2, h3), (v1, v2, v3) = h, v
    d12, d23 = v1 - v2, v2 - v3
    if d23 == 0 or d12 / d23 <= 0:
        return float("nan")
    target = d12 / d23
    if math.isclose(h1 / h2, h2 / h3, rel_tol=1e-12):
        return math.log(target) / math.log(h1 / h2)

    def g(p):
        return (h1**p - h2**p) / (h2**p - h3**p) - target

    try:
        return brentq(g, 0.05, 12.0)
    except ValueError:
        return float("nan")


def convergence_study(solve: Callable[[object], tuple[float, float]], levels: Sequence,
                      exact: float | None = None) -> list[ConvergenceRow]:
    """Run ``solve(level) -> (h, value)`` over at least three levels.

    Each row from the third on carries the three-level observed order; with
    ``exact`` the error and the two-level order against it are added too.
    """
    if len(levels) < 3:
        raise DomainError("a convergence study needs at least 3 refinement levels")
    rows: list[ConvergenceRow] = []
    for lev in levels:
        h, val = solve(lev)
        rows.append(ConvergenceRow(float(h), float(val)))
    for i, r in enumerate(rows):
        if i >= 2:
            r.order = observed_order([rows[i - 2].h, rows[i - 1].h, r.h],
                                     [rows[i - 2].value, rows[i - 1].value, r.value])
        if exact is not None:
            r.error = abs(r.value - exact)
            if i >= 1 and r.error > 0 and rows[i - 1].error > 0:
                r.order_vs_exact = math.log(rows[i - 1].error / r.error) / math.log(rows[i - 1].h / r.h)
    return rows


def pt_level_energy(p: ModelParams, n: int, l: int, n_grid: int = 2000) -> float:
    """E_{n,l} through the Poschl-Teller oracle."""
    return pt_to_energy(p, fd_eigs_pt(p, l, n_grid, n_eigs=n + 1)[n])


def exact_levels(p: ModelParams, count: int) -> np.ndarray:
    """The lowest ``count`` closed-form energies with multiplicity."""
    out, N = [], 0
    while len(out) < count:
        out.extend([energy_level(p, N)] * (N // 2 + 1))
        N += 1
    return np.array(out[:count])
