"""Named verification suites producing uniform report rows.

Every row has the keys identity, probe, residual_L2, residual_sup, pass,
mode and threshold.  Operator residuals are relative to the probe size
(identities) or to the summed magnitudes of the operator's terms
(eigen-relations), so cancellation is what gets measured.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from . import coeffs
from .fields import AnalyticState
from .grid import Grid2D
from .identities import (ANALYTIC_THRESHOLD, check_grid, cutoff_probe, probe_grid,
                         verify_identity)
from .massgen import (MASS_CLASSES, constraint_residuals, hyperbolic_family, mass_class_solution,
                      one_dim_susy)
from .model import (ModelParams, Psi_state, energy_level, level_states, psi_state, zero_mode_combination,
                    zero_mode_state)
from .operators import DiffOp2, apply, build_operator, linear_combination

__all__ = ["SUITES", "SUITE_IDENTITIES", "COEFF_THRESHOLD", "analytic_probes", "smooth_probe",
           "operator_residual", "ladder_fit", "lattice_path_count", "random_constants", "run_suite",
           "identity_rows", "eigen_rows", "ladder_rows", "cross_route_rows", "massgen_rows", "one_dim_rows",
           "coeff_rows"]

SUITE_IDENTITIES = {
    "intertwine": ("intertwine_2d", "conjugate_intertwine", "intertwine_1d", "factorization",
                   "shape_invariance_H", "shape_invariance_R"),
    "commute": ("commute_HR", "R_definition"),
    "susy": ("superalgebra",),
    "massgen": (),
    "coeffs": (),
}
SUITES = ("all",) + tuple(SUITE_IDENTITIES)
COEFF_THRESHOLD = 1e-10
MASSGEN_THRESHOLD = 1e-10


def _row(identity: str, probe: str, l2: float, sup: float, threshold: float,
         mode: str = "analytic", **extra) -> dict:
    row = {"identity": identity, "probe": probe, "residual_L2": float(l2), "residual_sup": float(sup),
           "pass": bool(max(l2, sup) < threshold), "mode": mode, "threshold": threshold}
    row.update(extra)
    return row


# --- probes -----------------------------------------------------------------

def smooth_probe(p: ModelParams) -> AnalyticState:
    """A smooth function that is not an eigenfunction of any operator checked."""
    q = p.q

    def fn(x, y):
        return (np.tanh(x * q) ** 2 * np.exp(-0.5 * (x * q) ** 2) * np.cos(y * q)
                * (1.0 + 0.3 * np.sin(y * (2 * q)) + 0.2 * x * q))

    return AnalyticState("smooth-probe", fn)


def analytic_probes(p: ModelParams) -> list:
    return [psi_state(p, 1, 2), Psi_state(p, 3, 2), smooth_probe(p)]


# --- operator residuals -----------------------------------------------------

def operator_residual(op, f, value: float, grid: Grid2D) -> tuple[float, float]:
    """Relative residual of op f = value * f on ``grid``.

    The reference is |value f| + sum over terms |c_ij d^(i,j) f|, the size
    of what has to cancel.
    """
    X, Y = grid.mesh
    F = f.jet(X, Y, op.order)
    ref = np.abs(value * F.value)
    for _, i, j, c in op.terms():
        coef = c(X, Y) if isinstance(op, DiffOp2) else c(X)
        ref = ref + np.abs(np.asarray(coef, dtype=float) * F.partial(i, j))
    d = apply(op, f, grid).values - value * F.value
    W = grid.weights
    l2 = math.sqrt(float(np.sum(W * d * d)) / float(np.sum(W * ref * ref)))
    return l2, float(np.max(np.abs(d)) / np.max(ref))


def ladder_fit(p: ModelParams, n: int, l: int, direction: str, grid: Grid2D) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of the one-step ladder image on its two targets.

    down: eta psi(k; n, l) against psi(k+1; n-1, l+1), psi(k+1; n, l-1)
    up:   eta+ psi(k+1; n, l) against psi(k; n+1, l-1), psi(k; n, l+1)
    Returns the coefficient pair and the relative misfit of the fit.
    """
    (n1, l1), (n2, l2) = coeffs.ladder_targets(n, l, direction)
    if direction == "down":
        src_p, dst_p, op = p, p.with_k(p.k + 1), build_operator("eta", p)
    else:
        src_p, dst_p, op = p.with_k(p.k + 1), p, build_operator("eta_dagger", p)
    img = apply(op, psi_state(src_p, n, l), grid).values.ravel()
    sw = np.sqrt(grid.weights.ravel())
    cols = []
    for nn, ll in ((n1, l1), (n2, l2)):
        valid = nn >= 0 and ll >= 0
        cols.append(grid.sample(psi_state(dst_p, nn, ll)).values.ravel() if valid else np.zeros_like(img))
    A = np.stack(cols, axis=1) * sw[:, None]
    b = img * sw
    keep = [i for i in range(2) if np.any(A[:, i])]
    c = np.zeros(2)
    if keep:
        sol, *_ = np.linalg.lstsq(A[:, keep], b, rcond=None)
        c[keep] = sol
    misfit = np.linalg.norm(A @ c - b) / max(np.linalg.norm(b), 1.0)
    return c, float(misfit)


# --- combinatorics oracles --------------------------------------------------

def lattice_path_count(l: int, nu: int, mu: int) -> int:
    """Exhaustive count of nu-step +-1 paths from height l that never go below 0
    and end at l + nu - 2 mu."""
    count = 0
    for steps in range(1 << nu):
        h, ok = l, True
        for s in range(nu):
            h += 1 if (steps >> s) & 1 else -1
            if h < 0:
                ok = False
                break
        if ok and h == l + nu - 2 * mu:
            count += 1
    return count


def random_constants(cls: str, rng: np.random.Generator) -> dict[str, float]:
    """Constants a, b, c, d, g for which 1/sqrt(M) has no zero on [0.1, 3]."""
    a, b, g = rng.uniform(-1, 1, 3)
    if cls == "trigonometric":
        # c sin qx + d cos qx stays positive on [0.1, 3] for q = 0.4 when d > 0, c > 0
        c, d = rng.uniform(0.2, 1.0, 2)
    else:
        c, d = rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)
        if cls == "hyperbolic":
            d = abs(c) + rng.uniform(0.1, 1.0)
    return {"a": float(a), "b": float(b), "c": float(c), "d": float(d), "g": float(g)}


# --- suites -----------------------------------------------------------------

def identity_rows(names, p: ModelParams, grid_probes: int) -> Iterator[dict]:
    cgrid = check_grid(p)
    probes = analytic_probes(p)
    pgrid = probe_grid(p) if grid_probes else None
    gprobes = [cutoff_probe(pgrid, seed) for seed in range(grid_probes)] if pgrid else []
    for name in names:
        for f in probes:
            yield verify_identity(name, p, f, cgrid).to_dict()
        for g in gprobes:
            yield verify_identity(name, p, g).to_dict()


def eigen_rows(p: ModelParams, n_max: int = 5) -> Iterator[dict]:
    grid = check_grid(p)
    q, k = p.q, p.k
    H, L, R, eta = (build_operator(s, p) for s in ("H", "L", "R", "eta"))
    for N in range(n_max + 1):
        for n, l in level_states(N):
            f = psi_state(p, n, l)
            E = energy_level(p, N)
            yield _row("eigen_H", f.label, *operator_residual(H, f, E, grid), ANALYTIC_THRESHOLD,
                       eigenvalue=E)
            Lv = (l + 1) ** 2 * q * q
            yield _row("eigen_L", f.label, *operator_residual(L, f, Lv, grid), ANALYTIC_THRESHOLD,
                       eigenvalue=Lv)
        for N0 in range(0, N + 1, 2):
            f = Psi_state(p, N, N0)
            nu = N - N0
            Rv = q * q * nu * (nu + 2 * k)
            yield _row("eigen_R", f.label, *operator_residual(R, f, Rv, grid), ANALYTIC_THRESHOLD,
                       eigenvalue=Rv)
            yield _row("eigen_H_Psi", f.label, *operator_residual(H, f, energy_level(p, N), grid),
                       ANALYTIC_THRESHOLD, eigenvalue=energy_level(p, N))
            if nu == 0:
                yield _row("eta_annihilates_Psi", f.label, *operator_residual(eta, f, 0.0, grid),
                           ANALYTIC_THRESHOLD)
    for s in (1, 3, 5):
        f = zero_mode_state(p, s)
        yield _row("eta_annihilates_zero_mode", f.label, *operator_residual(eta, f, 0.0, grid),
                   ANALYTIC_THRESHOLD)


def ladder_rows(p: ModelParams, n_max: int = 3, l_max: int = 3) -> Iterator[dict]:
    grid = check_grid(p)
    for direction in ("down", "up"):
        for n in range(n_max + 1):
            for l in range(l_max + 1):
                c, misfit = ladder_fit(p, n, l, direction, grid)
                ref = np.array(coeffs.ladder_coeffs(p.k, n, l, direction, p.q))
                err = float(np.max(np.abs(c - ref)))
                yield _row("ladder_coefficients", f"{direction}[n={n},l={l},k={p.k:g}]",
                           misfit, err, ANALYTIC_THRESHOLD, fitted=c.tolist(), closed_form=ref.tolist())


def cross_route_rows(p: ModelParams, n0_max: int = 6) -> Iterator[dict]:
    """Psi_{N0,N0} built from zero modes equals the X-route state up to scale."""
    grid = check_grid(p)
    for N0 in range(0, n0_max + 1, 2):
        a = grid.sample(zero_mode_combination(p, N0)).values
        b = grid.sample(Psi_state(p, N0, N0)).values
        scale = float(np.sum(grid.weights * a * b) / np.sum(grid.weights * b * b))
        d = a / scale - b
        yield _row("zero_mode_route", f"Psi[N={N0},N0={N0},k={p.k:g}]",
                   math.sqrt(float(np.sum(grid.weights * d * d) / np.sum(grid.weights * b * b))),
                   float(np.max(np.abs(d)) / np.max(np.abs(b))), ANALYTIC_THRESHOLD, scale=scale)


def massgen_rows(p: ModelParams, seed: int = 0) -> Iterator[dict]:
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.1, 3.0, 100)
    y = rng.uniform(-1.0, 1.0, 100)
    for cls in MASS_CLASSES:
        consts = random_constants(cls, rng)
        sol = mass_class_solution(cls, consts, q=None if cls == "rational" else 0.4, domain=(0.1, 3.0))
        res = constraint_residuals(sol, x, y)
        worst = float(np.max(list(res.values())))
        yield _row("mass_class_constraints", f"{cls}{consts}", worst, worst, MASSGEN_THRESHOLD,
                   residuals=res)
    q, k, v0 = p.q, p.k, p.v0
    fam = hyperbolic_family(q, -q * k, 0.0, 0.0, q * q * v0)
    xs, ys = rng.uniform(0.1, 3.0 / q, 100), rng.uniform(-0.9, 0.9, 100) * p.half_width
    H = build_operator("H", p)
    ref = H.c_0(xs, ys)
    d = fam.V_eff(xs, ys) - ref
    rel = float(np.max(np.abs(d)) / np.max(np.abs(ref)))
    yield _row("hyperbolic_family_potential", f"F=-qk,G=0,J=0,K=q^2v0[q={q:g},k={k:g},v0={v0:g}]",
               rel, rel, 1e-12)
    fres = fam.residuals(xs, ys)
    worst = float(np.max(list(fres.values())))
    yield _row("hyperbolic_family_constraints", "F=-qk,G=0", worst, worst, MASSGEN_THRESHOLD * 100,
               residuals=fres)
    yield from one_dim_rows()


def one_dim_rows() -> Iterator[dict]:
    """R = eta+ eta equals H - lambda for a one-dimensional intertwiner."""
    sol = one_dim_susy(lambda x: np.sinh(x) + 0.5 * np.tanh(x), 0.7, lambda x: 1.0 / (1.0 + x * x))
    grid = Grid2D.gauss_legendre(ModelParams(), 3.0, panels_x=6, panels_y=1, order=8, x_min=0.1)
    f = AnalyticState("gauss-probe", lambda x, y: np.exp(-(x - 1.0) ** 2) * (1.0 + 0.0 * y))
    eta, etad = sol.eta(), sol.eta_dagger()
    for partner in (False, True):
        Hop = sol.hamiltonian(partner)
        lhs = apply(etad, apply(eta, f)) if not partner else apply(eta, apply(etad, f))
        rhs = linear_combination([1.0, -sol.lam], [apply(Hop, f), f])
        a, b = grid.sample(lhs).values, grid.sample(rhs).values
        l2, sup = _compare(a, b, grid.sample(apply(Hop, f)).values, grid)
        yield _row("one_dim_R_equals_H_minus_lambda", "partner" if partner else "base", l2, sup,
                   ANALYTIC_THRESHOLD)


def _compare(a: np.ndarray, b: np.ndarray, ref: np.ndarray, grid: Grid2D) -> tuple[float, float]:
    W = grid.weights
    d = a - b
    return (math.sqrt(float(np.sum(W * d * d) / np.sum(W * ref * ref))),
            float(np.max(np.abs(d)) / np.max(np.abs(ref))))


def coeff_rows(ks=(0.7, 1.0, 2.5), n_max: int = 8) -> Iterator[dict]:
    for k in ks:
        for N in range(n_max + 1):
            T = coeffs.transform_matrix(k, N)
            r = T.orthogonality_residual()
            yield _row("transform_orthogonality", f"Z[N={N},k={k:g}]", r, r, COEFF_THRESHOLD)
            gen, closed = coeffs.Z_row(k, N, 0), coeffs.Z_row_closed(k, N)
            e = float(np.max(np.abs(gen - closed)))
            yield _row("general_vs_closed_row", f"Z[N={N},N0=0,k={k:g}]", e, e, 1e-12)
    worst, where = 0, ""
    for l in range(11):
        for nu in range(11):
            for mu in range(nu + 1):
                if coeffs.x_factor(l, nu, mu) != lattice_path_count(l, nu, mu):
                    worst, where = worst + 1, where or f"l={l},nu={nu},mu={mu}"
    yield _row("x_factor_lattice_paths", where or "l<=10,nu<=10", worst, worst, 0.5,
               mismatches=worst)
    for k in ks:
        e = max(abs(coeffs.S_sum(k, N0, "direct") - coeffs.S_sum(k, N0)) / max(1.0, abs(coeffs.S_sum(k, N0)))
                for N0 in range(0, 21, 2))
        yield _row("S_sum_direct_vs_closed", f"N0<=20,k={k:g}", e, e, 1e-12)


def run_suite(suite: str, p: ModelParams = ModelParams(), grid_probes: int = 3) -> list[dict]:
    """Rows of the named suite; ``all`` runs every suite once."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    names = [s for s in SUITE_IDENTITIES if suite in ("all", s)]
    rows: list[dict] = []
    for s in names:
        rows.extend(identity_rows(SUITE_IDENTITIES[s], p, grid_probes))
        if s == "susy":
            rows.extend(eigen_rows(p))
            rows.extend(ladder_rows(p))
            rows.extend(cross_route_rows(p))
        elif s == "massgen":
            rows.extend(massgen_rows(p))
        elif s == "coeffs":
            rows.extend(coeff_rows())
    return rows
