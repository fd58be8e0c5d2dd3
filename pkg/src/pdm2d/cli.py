"""Command-line front end.

Exit codes: 0 success, 1 usage or invalid parameters, 2 a verification
check failed, 3 a numerical failure (non-convergence, linear algebra).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import coeffs, export
from .errors import DomainError, VerificationError
from .grid import Grid2D
from .massgen import MASS_CLASSES, constraint_residuals, mass_class_solution, recover_C
from .model import (ModelParams, Psi_state, SusyLabels, QuantumNumbers, degeneracy, energy_level,
                    psi_state, zero_mode_state)
from .oracle import (PT_MIN_GRID, FdConfig, cluster_multiplicities, exact_levels, fd_eigs_2d, fd_eigs_pt,
                     pt_exact, pt_to_energy)
from .suites import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command line; carries the usage text of the parser that failed."""

    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _model_args(sp):
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--v0", type=float, default=0.0)


def _output_args(sp, default_format: str):
    sp.add_argument("--output", help="file to write (stdout when omitted)")
    sp.add_argument("--format", choices=("csv", "json"), default=default_format)


def _grid_args(sp):
    sp.add_argument("--nx", type=int, default=200, help="x nodes")
    sp.add_argument("--ny", type=int, default=64, help="y nodes")
    sp.add_argument("--x-max", type=float, default=6.0, help="x extent in units of 1/q")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdm2d", description="Exactly solvable 2D position-dependent-mass model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="energy levels and degeneracies")
    _model_args(sp)
    sp.add_argument("--nmax", type=int, default=5)
    _output_args(sp, "csv")

    sp = sub.add_parser("wavefunction", help="a state sampled on a uniform grid")
    _model_args(sp)
    sp.add_argument("--basis", choices=("sep", "susy"), default="sep")
    sp.add_argument("--n", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--N0", type=int)
    sp.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"), help="shorthand for --nx --ny")
    _grid_args(sp)
    sp.add_argument("--derivatives", action="store_true", help="add first and second derivatives")
    _output_args(sp, "csv")

    sp = sub.add_parser("zero-modes", help="zero modes omega_s on a uniform grid")
    _model_args(sp)
    sp.add_argument("--s-list", default="1,3,5", help="comma-separated positive s values")
    _grid_args(sp)
    sp.add_argument("--output-dir", help="directory for one CSV per s (stdout when omitted)")
    sp.add_argument("--format", choices=("csv",), default="csv")

    sp = sub.add_parser("basis-transform", help="matrix between the two eigenbases of a level")
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--N", type=int, required=True)
    _output_args(sp, "json")

    sp = sub.add_parser("verify", help="run residual checks")
    _model_args(sp)
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--grid-probes", type=int, default=3, help="cutoff grid probes per identity")
    _output_args(sp, "json")

    sp = sub.add_parser("oracle", help="finite-difference eigenvalues against closed forms")
    _model_args(sp)
    sp.add_argument("--mode", choices=("pt", "2d"), default="2d")
    sp.add_argument("--l", type=int, default=0, help="pt: angular index")
    sp.add_argument("--n-grid", type=int, default=2000, help="pt: interior nodes")
    sp.add_argument("--n-eigs", type=int, default=None)
    sp.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"), help="2d: interior nodes")
    sp.add_argument("--x-max", type=float, default=5.0, help="2d: truncation in units of 1/q")
    sp.add_argument("--solver", choices=("dense", "lanczos"), default="dense")
    sp.add_argument("--lanczos-max-iter", type=int, default=1000)
    sp.add_argument("--no-separate-y", action="store_true", help="2d: solve the full matrix")
    sp.add_argument("--timings", action="store_true", help="include runtimes (output not reproducible)")
    _output_args(sp, "csv")

    sp = sub.add_parser("mass-class", help="mass class solution and its constraint residuals")
    sp.add_argument("--class", dest="cls", choices=MASS_CLASSES, required=True)
    sp.add_argument("--constants", default="a=1,b=0,c=0,d=1,g=0", help="a=..,b=..,c=..,d=..,g=..")
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--domain", default="0.1,3", help="lo,hi (write --domain=-1,1 for a negative lo)")
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    _output_args(sp, "json")
    return parser


# --- helpers ----------------------------------------------------------------

def _params(args) -> ModelParams:
    return ModelParams(args.q, args.k, args.v0)


def _require(cond: bool, message: str):
    if not cond:
        raise DomainError(message)


def _emit(args, text: str):
    if args.output:
        export.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _table(args, header, rows, meta) -> str:
    if args.format == "json":
        return export.json_text({"meta": meta, "columns": list(header),
                                 "rows": [list(r) for r in rows]})
    return export.csv_text(header, rows, meta)


def _sample_grid(p: ModelParams, args) -> Grid2D:
    nx, ny = args.grid if getattr(args, "grid", None) else (args.nx, args.ny)
    _require(nx >= 4 and ny >= 4, f"grid needs at least 4 nodes per axis, got {nx}x{ny}")
    _require(args.x_max > 0, f"--x-max must be positive, got {args.x_max}")
    return Grid2D.uniform_grid(p, nx, ny, args.x_max / p.q)


def _state_rows(state, grid: Grid2D, derivatives: bool):
    X, Y = grid.mesh
    d = state(X, Y)
    cols = [X.ravel(), Y.ravel(), d.value.ravel()]
    header = ["x", "y", "value"]
    if derivatives:
        header += ["dx", "dy", "dxx", "dxy", "dyy"]
        cols += [d.dx.ravel(), d.dy.ravel(), d.dxx.ravel(), d.dxy.ravel(), d.dyy.ravel()]
    return header, list(zip(*cols))


# --- commands ---------------------------------------------------------------

def cmd_spectrum(args) -> int:
    p = _params(args)
    _require(args.nmax >= 0, f"--nmax must be nonnegative, got {args.nmax}")
    rows = [(N, energy_level(p, N), degeneracy(N)) for N in range(args.nmax + 1)]
    _emit(args, _table(args, ("N", "E_N", "degeneracy"), rows, {"command": "spectrum", **p.to_dict()}))
    return EXIT_OK


def cmd_wavefunction(args) -> int:
    p = _params(args)
    if args.basis == "sep":
        _require(args.n is not None and args.l is not None, "--basis sep needs --n and --l")
        qn = QuantumNumbers(args.n, args.l)
        state, labels = psi_state(p, qn.n, qn.l), {"n": qn.n, "l": qn.l}
    else:
        _require(args.N is not None and args.N0 is not None, "--basis susy needs --N and --N0")
        sl = SusyLabels(args.N, args.N0)
        state, labels = Psi_state(p, sl.N, sl.N0), {"N": sl.N, "N0": sl.N0}
    grid = _sample_grid(p, args)
    header, rows = _state_rows(state, grid, args.derivatives)
    meta = {"command": "wavefunction", **p.to_dict(), "basis": args.basis, **labels, "grid": grid.to_dict()}
    _emit(args, _table(args, header, rows, meta))
    return EXIT_OK


def _s_list(text: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise DomainError(f"--s-list must be comma-separated numbers, got {text!r}") from None
    _require(bool(vals) and all(v > 0 for v in vals), f"--s-list needs positive values, got {text!r}")
    return vals


def cmd_zero_modes(args) -> int:
    p = _params(args)
    s_vals = _s_list(args.s_list)
    grid = _sample_grid(p, args)
    if args.output_dir:
        _require(os.path.isdir(args.output_dir), f"--output-dir {args.output_dir!r} is not a directory")
    texts = []
    for s in s_vals:
        header, rows = _state_rows(zero_mode_state(p, s), grid, False)
        meta = {"command": "zero-modes", **p.to_dict(), "s": s, "grid": grid.to_dict()}
        texts.append((s, export.csv_text(header, rows, meta)))
    for s, text in texts:
        if args.output_dir:
            export.write_atomic(os.path.join(args.output_dir, f"omega_s{s:g}.csv"), text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_basis_transform(args) -> int:
    _require(args.N >= 0, f"--N must be nonnegative, got {args.N}")
    ModelParams(k=args.k)
    T = coeffs.transform_matrix(args.k, args.N)
    if args.format == "json":
        _emit(args, export.json_text(T.to_dict()))
    else:
        header = ["N0"] + [f"n={n};l={l}" for n, l in T.col_labels]
        rows = [[r, *row] for r, row in zip(T.row_labels, T.entries)]
        _emit(args, export.csv_text(header, rows, {"command": "basis-transform", "N": T.N, "k": T.k,
                                                   "orthogonality_residual": T.orthogonality_residual()}))
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    _require(args.grid_probes >= 0, "--grid-probes must be nonnegative")
    rows = run_suite(args.suite, p, args.grid_probes)
    _emit(args, export.json_text(rows) if args.format == "json" else export.csv_text(
        ("identity", "probe", "mode", "residual_L2", "residual_sup", "threshold", "pass"),
        [(r["identity"], r["probe"], r["mode"], r["residual_L2"], r["residual_sup"], r["threshold"],
          "PASS" if r["pass"] else "FAIL") for r in rows],
        {"command": "verify", "suite": args.suite, **p.to_dict()}))
    failed = [r for r in rows if not r["pass"]]
    for r in failed:
        print(f"FAIL {r['identity']} [{r['probe']}] L2={r['residual_L2']:.3g} "
              f"sup={r['residual_sup']:.3g}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def _oracle_pt(args, p: ModelParams):
    _require(args.n_grid >= PT_MIN_GRID, f"--n-grid must be at least {PT_MIN_GRID}")
    _require(args.l >= 0, "--l must be nonnegative")
    n_eigs = args.n_eigs or 4
    t0 = time.perf_counter()
    vals = fd_eigs_pt(p, args.l, args.n_grid, n_eigs)
    dt = time.perf_counter() - t0
    rows = []
    for n, v in enumerate(vals):
        ex = pt_exact(p.k, args.l, n)
        rows.append((n, args.l, v, ex, abs(v - ex) / abs(ex), pt_to_energy(p, v),
                     energy_level(p, 2 * n + args.l)))
    header = ("index", "l", "eigenvalue", "closed_form", "relative_error", "energy", "energy_closed_form")
    meta = {"command": "oracle", "mode": "pt", **p.to_dict(), "grid": {"n_grid": args.n_grid},
            "solver": "tridiagonal"}
    if p.k < 0.5:
        meta["note"] = "k < 1/2: the discrete problem selects the other boundary branch"
    return header, rows, meta, {"eigensolve": dt}


def _oracle_2d(args, p: ModelParams):
    nx, ny = args.grid if args.grid else (240, 96)
    cfg = FdConfig(nx=nx, ny=ny, x_max=args.x_max, n_eigs=args.n_eigs or 6, solver=args.solver,
                   separate_y=not args.no_separate_y, lanczos_max_iter=args.lanczos_max_iter)
    res = fd_eigs_2d(p, cfg, full=True)
    if res.lanczos_converged is False:
        raise VerificationError(f"Lanczos did not converge in {res.lanczos_iterations} iterations")
    ex = exact_levels(p, cfg.n_eigs)
    rows = [(i, v, e, abs(v - e) / abs(e)) for i, (v, e) in enumerate(zip(res.eigenvalues, ex))]
    meta = {"command": "oracle", "mode": "2d", **p.to_dict(),
            "grid": {"nx": nx, "ny": ny, "hx": res.meta["hx"], "hy": res.meta["hy"]},
            "x_max_over_q": cfg.x_max, "solver": cfg.solver, "separate_y": cfg.separate_y,
            "multiplicities": cluster_multiplicities(res.eigenvalues)}
    if res.lanczos_iterations is not None:
        meta["lanczos_iterations"] = res.lanczos_iterations
    return ("index", "eigenvalue", "closed_form", "relative_error"), rows, meta, {"total": res.runtime_s}


def cmd_oracle(args) -> int:
    p = _params(args)
    header, rows, meta, times = (_oracle_pt if args.mode == "pt" else _oracle_2d)(args, p)
    if not all(math.isfinite(float(v)) for r in rows for v in r[2:]):
        raise VerificationError("oracle produced non-finite eigenvalues")
    if args.timings:
        meta["runtime_s"] = times
    _emit(args, _table(args, header, rows, meta))
    return EXIT_OK


def _constants(text: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        _require(bool(sep) and key.strip() in "abcdg" and len(key.strip()) == 1,
                 f"--constants entries look like a=1.5 with names a,b,c,d,g; got {part!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise DomainError(f"constant {key.strip()} is not a number: {val!r}") from None
    return {s: out.get(s, 0.0) for s in "abcdg"}


def cmd_mass_class(args) -> int:
    consts = _constants(args.constants)
    try:
        lo, hi = (float(v) for v in args.domain.split(","))
    except ValueError:
        raise DomainError(f"--domain must be lo,hi; got {args.domain!r}") from None
    _require(math.isfinite(lo) and math.isfinite(hi), "--domain must be finite for sampling")
    _require(args.points >= 1, "--points must be positive")
    sol = mass_class_solution(args.cls, consts, q=args.q, domain=(lo, hi))
    rng = np.random.default_rng(args.seed)
    x = rng.uniform(lo, hi, args.points)
    y = rng.uniform(-1.0, 1.0, args.points)
    res = constraint_residuals(sol, x, y)
    report = {**sol.to_dict(), "points": args.points, "seed": args.seed, "residuals": res,
              "max_residual": float(np.max(list(res.values())))}
    try:
        report["C_recovered"] = recover_C(sol, x, y)
    except DomainError:
        report["C_recovered"] = None
    xs = np.linspace(lo, hi, 11)
    report["samples"] = [{"x": float(a), "M": float(sol.M(a))} for a in xs]
    if args.format == "json":
        _emit(args, export.json_text(report))
    else:
        _emit(args, export.csv_text(("x", "M"), [(s["x"], s["M"]) for s in report["samples"]],
                                    {k: v for k, v in report.items() if k != "samples"}))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "zero-modes": cmd_zero_modes,
    "basis-transform": cmd_basis_transform,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "mass-class": cmd_mass_class,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        return COMMANDS[args.command](args)
    except UsageError as e:
        sys.stderr.write(e.usage)
        print(f"pdm2d: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and friends
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    except (VerificationError, np.linalg.LinAlgError, ArithmeticError) as e:
        print(f"pdm2d: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ValueError) as e:
        print(f"pdm2d: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"pdm2d: cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
