"""Residual checks of the operator identities of the model.

Each identity is split into one or more relations ``lhs == rhs`` whose two
sides are built by applying operators one after the other to a probe.  For
analytic probes the sides are exact (jet) images sampled on a Gauss-Legendre
check grid; for grid probes they are finite-difference images.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import Field
from .grid import Grid2D, GridFunction, smooth_cutoff
from .model import ModelParams
from .operators import apply, build_operator, operator_1d

__all__ = [
    "IDENTITIES",
    "ANALYTIC_THRESHOLD",
    "GRID_THRESHOLD",
    "IdentityReport",
    "verify_identity",
    "check_grid",
    "cutoff_probe",
    "probe_grid",
    "relations",
]

IDENTITIES = (
    "intertwine_2d",
    "conjugate_intertwine",
    "commute_HR",
    "R_definition",
    "shape_invariance_H",
    "shape_invariance_R",
    "intertwine_1d",
    "factorization",
    "superalgebra",
)
ANALYTIC_THRESHOLD = 1e-8
GRID_THRESHOLD = 1e-4
DEFAULT_L_VALUES = (0, 1, 2, 3)


@dataclass
class IdentityReport:
    identity: str
    probe: str
    residual_L2: float
    residual_sup: float
    passed: bool
    mode: str
    threshold: float
    relations: list[dict] = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        d = {"identity": self.identity, "probe": self.probe, "residual_L2": self.residual_L2,
             "residual_sup": self.residual_sup, "pass": self.passed, "mode": self.mode,
             "threshold": self.threshold, "relations": self.relations}
        if self.note:
            d["note"] = self.note
        return d


def check_grid(p: ModelParams, x_max: float | None = None) -> Grid2D:
    """Gauss-Legendre grid on which analytic residuals are measured.

    It stays 0.05/q away from x = 0: the identities are local, and closer in the
    cancelling csch^n terms of fourth-order compositions lose digits to roundoff.
    """
    return Grid2D.gauss_legendre(p, x_max if x_max is not None else 6.0 / p.q,
                                 panels_x=12, panels_y=4, order=8, x_min=0.05 / p.q)


def probe_grid(p: ModelParams, n: int = 640, x_max: float | None = None) -> Grid2D:
    """Uniform grid used for grid-probe identity checks."""
    return Grid2D.uniform_grid(p, n, n, x_max if x_max is not None else 1.5 / p.q)


def cutoff_probe(grid: Grid2D, seed: int, modes: int = 2) -> GridFunction:
    """Random smooth function times a cutoff vanishing within 3 nodes of every edge."""
    if not grid.uniform:
        raise ValueError("grid probes live on uniform grids")
    rng = np.random.default_rng(seed)
    X, Y = grid.mesh
    u = (X - grid.x[0]) / (grid.x[-1] - grid.x[0])
    v = (Y - grid.y[0]) / (grid.y[-1] - grid.y[0])
    vals = np.zeros_like(X)
    for a in range(modes):
        for b in range(modes):
            c = rng.normal() / (1 + a + b)
            vals += c * np.cos(math.pi * a * u + rng.uniform(0, 2 * math.pi)) * \
                np.cos(math.pi * b * v + rng.uniform(0, 2 * math.pi))
    cut = np.outer(smooth_cutoff(grid.x), smooth_cutoff(grid.y))
    return GridFunction(grid, vals * cut, f"cutoff-probe[seed={seed}]")


# --- relation builders ------------------------------------------------------

def _ap(op, f):
    return apply(op, f)


def relations(identity: str, p: ModelParams, probe, l_values: Sequence[int] = DEFAULT_L_VALUES):
    """List of (name, lhs, rhs) where each side is a list of components, and each
    component is a list of (coefficient, image) terms."""
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; expected one of {', '.join(IDENTITIES)}")
    q, k = p.q, p.k
    op = lambda kind, pp=p: build_operator(kind, pp)  # noqa: E731
    if identity == "superalgebra":
        f1, f2 = probe
    else:
        f = probe[0] if isinstance(probe, tuple) else probe
    H, H1, eta, etad, R, R1 = (op(s) for s in ("H", "H1", "eta", "eta_dagger", "R", "R1"))
    one = lambda g: [(1.0, g)]  # noqa: E731

    if identity == "intertwine_2d":
        return [("eta H = H1 eta", [one(_ap(eta, _ap(H, f)))], [one(_ap(H1, _ap(eta, f)))])]
    if identity == "conjugate_intertwine":
        return [("H eta+ = eta+ H1", [one(_ap(H, _ap(etad, f)))], [one(_ap(etad, _ap(H1, f)))])]
    if identity == "commute_HR":
        return [("H R = R H", [one(_ap(H, _ap(R, f)))], [one(_ap(R, _ap(H, f)))]),
                ("H1 R1 = R1 H1", [one(_ap(H1, _ap(R1, f)))], [one(_ap(R1, _ap(H1, f)))])]
    if identity == "R_definition":
        return [("eta+ eta = R", [one(_ap(etad, _ap(eta, f)))], [one(_ap(R, f))]),
                ("eta eta+ = R1", [one(_ap(eta, _ap(etad, f)))], [one(_ap(R1, f))])]
    if identity == "shape_invariance_H":
        Hk1 = op("H", p.with_k(k + 1))
        return [("H1(k) = H(k+1) + 2q^2k", [one(_ap(H1, f))],
                 [[(1.0, _ap(Hk1, f)), (2 * q * q * k, f)]])]
    if identity == "shape_invariance_R":
        Rk1 = op("R", p.with_k(k + 1))
        return [("R1(k) = R(k+1) + q^2(2k+1)", [one(_ap(R1, f))],
                 [[(1.0, _ap(Rk1, f)), (q * q * (2 * k + 1), f)]])]
    if identity == "intertwine_1d":
        out = []
        for l in l_values:
            Hl = operator_1d("H_l", q, k, l)
            A, At = operator_1d("A", q, k, l), operator_1d("A_tilde", q, k, l)
            up = operator_1d("H_l", q, k + 1, l + 1).shifted(2 * q * q * k)
            dn = operator_1d("H_l", q, k + 1, l - 1).shifted(2 * q * q * k)
            out.append((f"A H_l = (H_(l+1)(k+1) + 2q^2k) A [l={l}]",
                        [one(_ap(A, _ap(Hl, f)))], [one(_ap(up, _ap(A, f)))]))
            out.append((f"A~ H_l = (H_(l-1)(k+1) + 2q^2k) A~ [l={l}]",
                        [one(_ap(At, _ap(Hl, f)))], [one(_ap(dn, _ap(At, f)))]))
        return out
    if identity == "factorization":
        out = []
        c = lambda l_, k_: q * q * (l_ + 2) * (l_ + 2 * k_ + 1)  # noqa: E731
        ct = lambda l_, k_: q * q * l_ * (l_ - 2 * k_ + 1)  # noqa: E731
        for l in l_values:
            Hl = operator_1d("H_l", q, k, l)
            lhs = [one(_ap(Hl, f))]
            A, Ad = operator_1d("A", q, k, l), operator_1d("A_dagger", q, k, l)
            B, Bd = operator_1d("A", q, k - 1, l - 1), operator_1d("A_dagger", q, k - 1, l - 1)
            T, Td = operator_1d("A_tilde", q, k, l), operator_1d("A_tilde_dagger", q, k, l)
            U, Ud = operator_1d("A_tilde", q, k - 1, l + 1), operator_1d("A_tilde_dagger", q, k - 1, l + 1)
            out.append((f"H_l = A+ A + c_l [l={l}]", lhs, [[(1.0, _ap(Ad, _ap(A, f))), (c(l, k), f)]]))
            out.append((f"H_l = A(k-1,l-1) A+(k-1,l-1) + c_(l-2) [l={l}]", lhs,
                        [[(1.0, _ap(B, _ap(Bd, f))), (c(l - 2, k), f)]]))
            out.append((f"H_l = A~+ A~ + c~_l [l={l}]", lhs, [[(1.0, _ap(Td, _ap(T, f))), (ct(l, k), f)]]))
            out.append((f"H_l = A~(k-1,l+1) A~+(k-1,l+1) + c~_(l+2) [l={l}]", lhs,
                        [[(1.0, _ap(U, _ap(Ud, f))), (ct(l + 2, k), f)]]))
        return out
    # superalgebra on (f1, f2): Q+ (f1, f2) = (0, eta f1), Q- (f1, f2) = (eta+ f2, 0)
    zero: list = []
    return [
        ("{Q+,Q-} = diag(R, R1)",
         [one(_ap(etad, _ap(eta, f1))), one(_ap(eta, _ap(etad, f2)))],
         [one(_ap(R, f1)), one(_ap(R1, f2))]),
        ("{Q+,Q+} = 0", [zero, zero], [zero, zero]),
        ("{Q-,Q-} = 0", [zero, zero], [zero, zero]),
        ("[H,Q+] = 0", [zero, one(_ap(H1, _ap(eta, f1)))], [zero, one(_ap(eta, _ap(H, f1)))]),
        ("[H,Q-] = 0", [one(_ap(H, _ap(etad, f2))), zero], [one(_ap(etad, _ap(H1, f2))), zero]),
        ("[R,Q+] = 0", [zero, one(_ap(R1, _ap(eta, f1)))], [zero, one(_ap(eta, _ap(R, f1)))]),
        ("[R,Q-] = 0", [one(_ap(R, _ap(etad, f2))), zero], [one(_ap(etad, _ap(R1, f2))), zero]),
        ("[H,R] = 0", [one(_ap(H, _ap(R, f1))), one(_ap(H1, _ap(R1, f2)))],
         [one(_ap(R, _ap(H, f1))), one(_ap(R1, _ap(H1, f2)))]),
    ]


# --- evaluation -------------------------------------------------------------

def _values(term, grid: Grid2D | None) -> np.ndarray:
    if isinstance(term, GridFunction):
        return term.values
    X, Y = grid.mesh
    return np.asarray(term.values(X, Y), dtype=float)


def _component_values(component, grid, shape) -> np.ndarray:
    out = np.zeros(shape)
    for c, term in component:
        out = out + c * _values(term, grid)
    return out


def _probe_components(probe) -> list:
    return list(probe) if isinstance(probe, tuple) else [probe]


def verify_identity(identity: str, p: ModelParams, probe, grid: Grid2D | None = None,
                    l_values: Sequence[int] = DEFAULT_L_VALUES) -> IdentityReport:
    """Residual of ``identity`` on ``probe``, relative to the probe's norms.

    ``probe`` is a field (analytic path), a :class:`GridFunction` (finite
    differences), or a pair of either for ``superalgebra``.  For fields,
    ``grid`` is the evaluation grid (default :func:`check_grid`).
    """
    comps = _probe_components(probe)
    if identity == "superalgebra" and len(comps) == 1:
        comps = comps * 2
    is_grid = isinstance(comps[0], GridFunction)
    if is_grid:
        qgrid = comps[0].grid
    else:
        if not all(isinstance(c, Field) for c in comps):
            raise TypeError("probe must be a field, a grid function, or a pair of them")
        qgrid = grid if grid is not None else check_grid(p)
    shape = qgrid.shape
    W = qgrid.weights

    pvals = [_values(c, qgrid) for c in comps]
    p_l2 = math.sqrt(sum(float(np.sum(W * v * v)) for v in pvals))
    p_sup = max(float(np.max(np.abs(v))) for v in pvals)
    if p_l2 == 0.0 or p_sup == 0.0:
        raise ValueError("probe must be nonzero")

    rels = relations(identity, p, tuple(comps) if identity == "superalgebra" else comps[0], l_values)
    details = []
    for name, lhs, rhs in rels:
        l2sq, sup = 0.0, 0.0
        for lc, rc in zip(lhs, rhs):
            diff = _component_values(lc, qgrid, shape) - _component_values(rc, qgrid, shape)
            l2sq += float(np.sum(W * diff * diff))
            sup = max(sup, float(np.max(np.abs(diff))))
        details.append({"relation": name, "residual_L2": math.sqrt(l2sq) / p_l2,
                        "residual_sup": sup / p_sup})
    r_l2 = max(d["residual_L2"] for d in details)
    r_sup = max(d["residual_sup"] for d in details)
    threshold = GRID_THRESHOLD if is_grid else ANALYTIC_THRESHOLD
    label = " & ".join(dict.fromkeys(c.label for c in comps))
    note = ""
    if identity == "superalgebra":
        note = "anticommutator {Q+,Q-} checked against diag(R, R1)"
    return IdentityReport(identity, label, r_l2, r_sup, bool(max(r_l2, r_sup) < threshold),
                          "grid" if is_grid else "analytic", threshold, details, note)
