"""Masses and potentials admitting a first-order intertwining operator.

Covers the reduction of the symmetrized PDM kinetic operator to the form
-d_i (1/M) d_i + V_eff, the three one-variable mass classes solving the
first-order constraint system in two dimensions, the hyperbolic family of
potentials, and the one-dimensional construction where the integral of
motion collapses to H - lambda.

All callables here are jet-generic ``fn(x, y)`` (numpy operations only), so
exact derivatives come from :mod:`pdm2d.jets`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError
from .jets import Jet, variables
from .operators import DiffOp1, DiffOp2, first_order_operator, schrodinger_operator

__all__ = [
    "AmbiguityParams",
    "effective_potential",
    "von_roos_kinetic",
    "MassClassSolution",
    "MASS_CLASSES",
    "mass_class_solution",
    "constraint_residuals",
    "recover_C",
    "intertwining_residuals",
    "HyperbolicFamily",
    "hyperbolic_family",
    "OneDimSolution",
    "one_dim_susy",
]

MASS_CLASSES = ("hyperbolic", "rational", "trigonometric")


def _jets(fn: Callable, x, y, order: int) -> Jet:
    X, Y = variables(x, y, order)
    out = fn(X, Y)
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), X.shape), order, X.shape)
    return out


# --- ordering ambiguity -----------------------------------------------------

@dataclass(frozen=True)
class AmbiguityParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if abs(self.alpha + self.beta + self.gamma + 1.0) > 1e-12:
            raise DomainError(f"need alpha + beta + gamma = -1, got {self.alpha + self.beta + self.gamma!r}")

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float) -> "AmbiguityParams":
        return cls(alpha, beta, -1.0 - alpha - beta)


def effective_potential(M: Callable, V: Callable, ap: AmbiguityParams, x, y=0.0):
    """V + (beta+1) Lap M / (2 M^2) - [alpha(alpha+beta+1) + beta + 1] |grad M|^2 / M^3."""
    Mj = _jets(M, x, y, 2)
    m = Mj.value
    if np.any(m <= 0):
        raise DomainError("mass must be positive at the evaluation points")
    lap = Mj.partial(2, 0) + Mj.partial(0, 2)
    grad2 = Mj.partial(1, 0) ** 2 + Mj.partial(0, 1) ** 2
    a, b = ap.alpha, ap.beta
    v = _jets(V, x, y, 0).value
    return v + 0.5 * (b + 1) * lap / m**2 - (a * (a + b + 1) + b + 1) * grad2 / m**3


def von_roos_kinetic(M: Callable, ap: AmbiguityParams, f: Callable, x, y):
    """-(1/2)[M^a d_i M^b d_i M^c + M^c d_i M^b d_i M^a] f at points, by exact jets."""
    Mj, Fj = _jets(M, x, y, 2), _jets(f, x, y, 2)
    if np.any(Mj.value <= 0):
        raise DomainError("mass must be positive at the evaluation points")

    def sandwich(outer, inner):
        g = Mj ** inner * Fj
        total = 0.0
        for i, j in ((1, 0), (0, 1)):
            h = (Mj ** ap.beta).truncate(1) * g.diff(i, j)
            total = total + h.diff(i, j).value
        return (Mj ** outer).value * total

    return -0.5 * (sandwich(ap.alpha, ap.gamma) + sandwich(ap.gamma, ap.alpha))


# --- mass classes -----------------------------------------------------------

@dataclass(frozen=True)
class MassClassSolution:
    """One-variable mass M(x) with the intertwining coefficients A1, A2.

    ``w`` is 1/sqrt(M) and ``f`` the y factor of A1; both enter the
    separation constant C through f''/f = -w''/w = C.
    """

    cls: str
    constants: Mapping[str, float]
    q: float | None
    domain: tuple[float, float]
    C: float
    w: Callable
    f: Callable
    A1: Callable
    A2: Callable

    def M(self, x, y=0.0):
        return 1.0 / self.w(x, y) ** 2

    def to_dict(self) -> dict:
        return {"class": self.cls, "constants": dict(self.constants), "q": self.q,
                "domain": list(self.domain), "C": self.C}


def _denominator_roots(cls: str, c: float, d: float, q: float | None, lo: float, hi: float) -> list[float]:
    """Zeros of w = 1/sqrt(M) inside [lo, hi]."""
    if c == 0 and d == 0:
        return [lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0)]
    if cls == "rational":
        roots = [-d / c] if c != 0 else []
    elif cls == "hyperbolic":
        roots = [math.atanh(-d / c) / q] if c != 0 and abs(d) < abs(c) else []
    else:
        # c sin qx + d cos qx = rho sin(qx + phi)
        phi = math.atan2(d, c)
        period = math.pi / q
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return [-phi / q]
        first = math.ceil((lo * q + phi) / math.pi)
        roots = [(m * math.pi - phi) / q for m in range(first, first + int((hi - lo) / period) + 2)]
    return [r for r in roots if lo <= r <= hi]


def mass_class_solution(cls: str, constants: Mapping[str, float], q: float | None = None,
                        domain: tuple[float, float] = (-math.inf, math.inf)) -> MassClassSolution:
    """General one-variable mass solving the first-order constraints.

    ``constants`` holds a, b, c, d, g.  The mass is rejected if 1/sqrt(M)
    vanishes somewhere in ``domain`` (M is then infinite or undefined there).
    """
    if cls not in MASS_CLASSES:
        raise ValueError(f"unknown mass class {cls!r}; expected one of {', '.join(MASS_CLASSES)}")
    missing = {"a", "b", "c", "d", "g"} - set(constants)
    if missing:
        raise ValueError(f"missing constants: {', '.join(sorted(missing))}")
    a, b, c, d, g = (float(constants[s]) for s in "abcdg")
    lo, hi = domain
    if not lo < hi:
        raise DomainError(f"empty domain {domain!r}")
    if cls != "rational":
        if q is None or not q > 0:
            raise DomainError(f"class {cls} needs q > 0")
    else:
        q = None
    bad = _denominator_roots(cls, c, d, q, lo, hi)
    if bad:
        raise DomainError(f"mass is not positive and finite on the domain: 1/sqrt(M) = 0 at x = {bad[0]!r}")

    if cls == "hyperbolic":
        C = -q * q

        def w(x, y):
            return c * np.sinh(x * q) + d * np.cosh(x * q) + y * 0.0

        def f(x, y):
            return a * np.sin(y * q) + b * np.cos(y * q) + x * 0.0

        def A2(x, y):
            return (-a * np.cos(y * q) + b * np.sin(y * q)) * (c * np.cosh(x * q) + d * np.sinh(x * q)) + g
    elif cls == "rational":
        C = 0.0

        def w(x, y):
            return c * x + d + y * 0.0

        def f(x, y):
            return a * y + b + x * 0.0

        def A2(x, y):
            return -0.5 * a * c * (x * x - y * y) - a * d * x + b * c * y + g
    else:
        C = q * q

        def w(x, y):
            return c * np.sin(x * q) + d * np.cos(x * q) + y * 0.0

        def f(x, y):
            return a * np.sinh(y * q) + b * np.cosh(y * q) + x * 0.0

        def A2(x, y):
            return (a * np.cosh(y * q) + b * np.sinh(y * q)) * (c * np.cos(x * q) - d * np.sin(x * q)) + g

    def A1(x, y):
        return f(x, y) * w(x, y)

    return MassClassSolution(cls, {"a": a, "b": b, "c": c, "d": d, "g": g}, q, (lo, hi), C, w, f, A1, A2)


def constraint_residuals(sol: MassClassSolution, x, y) -> dict[str, float]:
    """Max-abs residuals over the points of:

    first-order constraints (dxA1 + (A1 dxM + A2 dyM)/2M, dyA1 + dxA2,
    dxA1 - dyA2), harmonicity of A1 and A2, and the separation relations
    f'' - C f = 0 and w'' + C w = 0 (multiplied through to avoid dividing by
    zeros of f).
    """
    M = lambda X, Y: 1.0 / sol.w(X, Y) ** 2  # noqa: E731
    Mj, A1, A2 = _jets(M, x, y, 2), _jets(sol.A1, x, y, 2), _jets(sol.A2, x, y, 2)
    fj, wj = _jets(sol.f, x, y, 2), _jets(sol.w, x, y, 2)
    d = lambda J, i, j: J.partial(i, j)  # noqa: E731
    m = Mj.value
    res = {
        "first_order_xx": d(A1, 1, 0) + (A1.value * d(Mj, 1, 0) + A2.value * d(Mj, 0, 1)) / (2 * m),
        "first_order_xy": d(A1, 0, 1) + d(A2, 1, 0),
        "first_order_yy": d(A1, 1, 0) - d(A2, 0, 1),
        "laplacian_A1": d(A1, 2, 0) + d(A1, 0, 2),
        "laplacian_A2": d(A2, 2, 0) + d(A2, 0, 2),
        "separation_f": d(fj, 0, 2) - sol.C * fj.value,
        "separation_w": d(wj, 2, 0) + sol.C * wj.value,
    }
    return {k: float(np.max(np.abs(v))) for k, v in res.items()}


def recover_C(sol: MassClassSolution, x, y) -> float:
    """Median of f''/f and -w''/w over points where both factors are not small."""
    fj, wj = _jets(sol.f, x, y, 2), _jets(sol.w, x, y, 2)
    mask = (np.abs(fj.value) > 1e-3) & (np.abs(wj.value) > 1e-3)
    if not np.any(mask):
        raise DomainError("f and 1/sqrt(M) are too small at all points to recover C")
    ratios = np.concatenate([(fj.partial(0, 2) / fj.value)[mask], (-wj.partial(2, 0) / wj.value)[mask]])
    return float(np.median(ratios))


# --- intertwining constraints -----------------------------------------------

def intertwining_residuals(M: Callable, A1: Callable, A2: Callable, B: Callable,
                           V: Callable, V1: Callable, x, y) -> dict[str, np.ndarray]:
    """Pointwise residuals of the three conditions for eta H = H1 eta with
    eta = A1 dx + A2 dy + B, H = -d(1/M)d + V, H1 = -d(1/M)d + V1."""
    Mj = _jets(M, x, y, 2)
    A = (_jets(A1, x, y, 2), _jets(A2, x, y, 2))
    Bj = _jets(B, x, y, 2)
    Vj, V1j = _jets(V, x, y, 1), _jets(V1, x, y, 0)
    m = Mj.value
    dM = (Mj.partial(1, 0), Mj.partial(0, 1))
    ddM = ((Mj.partial(2, 0), Mj.partial(1, 1)), (Mj.partial(1, 1), Mj.partial(0, 2)))
    dA = [(Ai.partial(1, 0), Ai.partial(0, 1)) for Ai in A]
    lapA = [Ai.partial(2, 0) + Ai.partial(0, 2) for Ai in A]
    dB = (Bj.partial(1, 0), Bj.partial(0, 1))
    lapB = Bj.partial(2, 0) + Bj.partial(0, 2)
    dV = (Vj.partial(1, 0), Vj.partial(0, 1))
    gap = Vj.value - V1j.value
    a = [Ai.value for Ai in A]
    adm = (a[0] * dM[0] + a[1] * dM[1]) / m

    out: dict[str, np.ndarray] = {}
    for i in range(2):
        for j in range(i, 2):
            out[f"symmetric_{'xy'[i]}{'xy'[j]}"] = dA[j][i] + dA[i][j] + (adm if i == j else 0.0)
    for i in range(2):
        r = a[i] * gap + lapA[i] / m + 2.0 / m * dB[i]
        for j in range(2):
            r = r + a[j] * (ddM[i][j] / m**2 - 2.0 * dM[i] * dM[j] / m**3) - dA[i][j] * dM[j] / m**2
        out[f"potential_gap_{'xy'[i]}"] = r
    out["potential_gradient"] = (a[0] * dV[0] + a[1] * dV[1] + Bj.value * gap + lapB / m
                                 - (dB[0] * dM[0] + dB[1] * dM[1]) / m**2)
    return out


@dataclass(frozen=True)
class HyperbolicFamily:
    """M = sech^2 qx, A1 = cosh qx sin qy, A2 = -sinh qx cos qy,
    B = (q sinh qx + F csch qx) sin qy + G, and, for G = 0, the potential pair."""

    q: float
    F: float
    G: float = 0.0
    J: float = 0.0
    K: float = 0.0

    def M(self, x, y):
        return 1.0 / np.cosh(x * self.q) ** 2 + y * 0.0

    def A1(self, x, y):
        return np.cosh(x * self.q) * np.sin(y * self.q)

    def A2(self, x, y):
        return -np.sinh(x * self.q) * np.cos(y * self.q)

    def B(self, x, y):
        q = self.q
        return (np.sinh(x * q) * q + self.F / np.sinh(x * q)) * np.sin(y * q) + self.G

    @property
    def separable(self) -> bool:
        return self.G == 0

    def _V(self, x, y, shift: float, const: float):
        q, F = self.q, self.F
        return (-(q * q) * np.cosh(x * q) ** 2 + F * (shift + F) / np.sinh(x * q) ** 2
                + self.J * np.log(np.cosh(x * q) / np.cos(y * q)) + const)

    def V_trial(self, x, y):
        """The G = 0 potential, used to probe the separability route when G != 0."""
        return self._V(x, y, self.q, self.K)

    def V1_trial(self, x, y):
        return self._V(x, y, -self.q, self.K - 2 * self.q * self.F)

    def V_eff(self, x, y):
        if not self.separable:
            raise DomainError("no effective potential is derived for G != 0")
        return self.V_trial(x, y)

    def V1_eff(self, x, y):
        if not self.separable:
            raise DomainError("no effective potential is derived for G != 0")
        return self.V1_trial(x, y)

    # operators built from the family
    def hamiltonian(self, partner: bool = False) -> DiffOp2:
        return schrodinger_operator(self.M, self.V1_eff if partner else self.V_eff,
                                    "H1[family]" if partner else "H[family]")

    def intertwiner(self, dagger: bool = False) -> DiffOp2:
        return first_order_operator(self.A1, self.A2, self.B, "eta[family]", dagger=dagger)

    def residuals(self, x, y) -> dict[str, float]:
        """Max-abs residuals of the constraint set at the points.

        For G != 0 the G = 0 trial potentials are used, so the residuals of
        the potential conditions and of the separability equation measure
        how far the G = 0 solution is from solving the G != 0 system.
        """
        q, F, G = self.q, self.F, self.G
        out = {k: float(np.max(np.abs(v))) for k, v in intertwining_residuals(
            self.M, self.A1, self.A2, self.B, self.V_trial, self.V1_trial, x, y).items()}
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        Bj, Vj = _jets(self.B, x, y, 1), _jets(self.V_trial, x, y, 1)
        gap = self.V_trial(x, y) - self.V1_trial(x, y)
        ch, sh = np.cosh(q * x), np.sinh(q * x)
        sn, cs = np.sin(q * y), np.cos(q * y)
        # the routes are multiplied through by their denominators so that points
        # on sin(qy) = 0 or cos(qy) = 0 stay finite
        out["gap_from_dxB"] = float(np.max(np.abs(sn * gap - (2 * q * q * ch**2 * sn - 2 * ch * Bj.partial(1, 0)))))
        out["gap_from_dyB"] = float(np.max(np.abs(
            sh * cs * gap - (-2 * q * q * ch**2 * sh * cs + 2 * ch * ch * Bj.partial(0, 1)))))
        lhs = ch * sh**3 * sn * Vj.partial(1, 0) - cs * sh**4 * Vj.partial(0, 1)
        rhs = -2 * q * (q * q * ch**2 * sh**4 * sn + F * (q + F) * ch**2 * sn + F * G * sh * ch**2)
        out["separability"] = float(np.max(np.abs(lhs - rhs)))
        return out


def hyperbolic_family(q: float, F: float, G: float = 0.0, J: float = 0.0, K: float = 0.0) -> HyperbolicFamily:
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    return HyperbolicFamily(q, F, G, J, K)


# --- one dimension ----------------------------------------------------------

@dataclass(frozen=True)
class OneDimSolution:
    """A = M^(-1/2), V_eff = -(AB)' + B^2 + lambda, V1_eff = V_eff - A(A'' - 2B').

    Callables take x only (jet-generic).
    """

    M: Callable
    B: Callable
    lam: float
    A: Callable = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "A", lambda x: self.M(x) ** -0.5)

    def _d(self, fn: Callable, x, order: int) -> Jet:
        return _jets(lambda X, Y: fn(X), x, 0.0, order)

    def V_eff(self, x):
        if isinstance(x, Jet):
            return self._V_jet(x, partner=False)
        B = self._d(self.B, x, 0)
        AB = self._d(lambda X: self.A(X) * self.B(X), x, 1)
        return -AB.partial(1, 0) + B.value**2 + self.lam

    def V1_eff(self, x):
        if isinstance(x, Jet):
            return self._V_jet(x, partner=True)
        A, B = self._d(self.A, x, 2), self._d(self.B, x, 1)
        return self.V_eff(x) - A.value * (A.partial(2, 0) - 2 * B.partial(1, 0))

    def _V_jet(self, X: Jet, partner: bool) -> Jet:
        # X is the x coordinate jet; re-expanding two orders higher keeps the
        # derivatives exact up to X.order
        K = X.order
        x0 = X.value
        Xh, _ = variables(x0, np.zeros_like(x0), K + 2)
        A, B = self.A(Xh), self.B(Xh)
        V = -(A * B).diff(1, 0).truncate(K) + (B * B).truncate(K) + self.lam
        if partner:
            V = V - A.truncate(K) * (A.diff(2, 0) - 2 * B.diff(1, 0).truncate(K))
        return V

    def hamiltonian(self, partner: bool = False) -> DiffOp1:
        inv = lambda x: 1.0 / self.M(x)  # noqa: E731
        dinv = lambda x: _derivative_1d(inv, x)  # noqa: E731
        return DiffOp1("H1[1d]" if partner else "H[1d]", c_xx=lambda x: -inv(x), c_x=lambda x: -dinv(x),
                       c_0=self.V1_eff if partner else self.V_eff)

    def eta(self) -> DiffOp1:
        return DiffOp1("eta[1d]", c_x=self.A, c_0=self.B)

    def eta_dagger(self) -> DiffOp1:
        dA = lambda x: _derivative_1d(self.A, x)  # noqa: E731
        return DiffOp1("eta_dagger[1d]", c_x=lambda x: -self.A(x), c_0=lambda x: self.B(x) - dA(x))


def _derivative_1d(fn: Callable, x):
    if isinstance(x, Jet):
        K = x.order
        Xh, _ = variables(x.value, np.zeros_like(x.value), K + 1)
        return fn(Xh).diff(1, 0)
    X, _ = variables(x, np.zeros_like(np.asarray(x, dtype=float)), 1)
    return fn(X).partial(1, 0)


def one_dim_susy(B: Callable, lam: float, M: Callable) -> OneDimSolution:
    """One-dimensional intertwining data from a mass M(x), a function B(x) and lambda."""
    return OneDimSolution(M, B, float(lam))
