"""Closed-form spectrum and eigenfunctions of the semi-infinite-layer model.

The Hamiltonian is

    H(k) = -d_x cosh^2(qx) d_x - cosh^2(qx) d_y^2 - q^2 cosh^2(qx)
           + q^2 k (k - 1) csch^2(qx) + q^2 v0

on D = {x > 0, |y| < pi / (2q)} with Dirichlet walls.  Two orthonormal
eigenbases are provided: the separable states psi(n, l) and the states
Psi(N, N0) that also diagonalize the second-order integral of motion R.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import coeffs
from .errors import DomainError
from .fields import AnalyticState, Derivs
from .special import JacobiIndex, jacobi, jacobi_recurrence, log_factorial, log_gamma

__all__ = [
    "ModelParams",
    "QuantumNumbers",
    "SusyLabels",
    "energy_level",
    "degeneracy",
    "level_states",
    "eval_chi",
    "eval_phi",
    "eval_psi",
    "eval_zero_mode",
    "eval_Psi",
    "psi_state",
    "Psi_state",
    "zero_mode_state",
    "zero_mode_combination",
    "phi_norm",
    "PTMap",
    "pt_map",
]


@dataclass(frozen=True)
class ModelParams:
    q: float = 1.0
    k: float = 1.0
    v0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.q) and self.q > 0):
            raise DomainError(f"q must be positive, got {self.q!r}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise DomainError(f"k must be positive, got {self.k!r}")
        if not math.isfinite(self.v0):
            raise DomainError(f"v0 must be finite, got {self.v0!r}")

    @property
    def half_width(self) -> float:
        """pi / (2q): the walls sit at y = +-half_width."""
        return math.pi / (2.0 * self.q)

    def with_k(self, k: float) -> "ModelParams":
        return replace(self, k=k)

    def to_dict(self) -> dict:
        return {"q": self.q, "k": self.k, "v0": self.v0}


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int

    def __post_init__(self):
        if self.n < 0 or self.l < 0:
            raise DomainError(f"quantum numbers must be nonnegative, got n={self.n}, l={self.l}")

    @property
    def N(self) -> int:
        return 2 * self.n + self.l


@dataclass(frozen=True)
class SusyLabels:
    N: int
    N0: int

    def __post_init__(self):
        if self.N0 < 0 or self.N0 % 2 or self.N0 > self.N:
            raise DomainError(f"need even N0 with 0 <= N0 <= N, got N={self.N}, N0={self.N0}")

    @property
    def nu(self) -> int:
        return self.N - self.N0


def energy_level(p: ModelParams, N: int) -> float:
    if N < 0:
        raise DomainError(f"level must be nonnegative, got {N}")
    return p.q**2 * ((N + 2) * (N + 2 * p.k + 1) + p.v0)


def degeneracy(N: int) -> int:
    if N < 0:
        raise DomainError(f"level must be nonnegative, got {N}")
    return N // 2 + 1


def level_states(N: int) -> list[tuple[int, int]]:
    """The (n, l) pairs with 2n + l = N, ordered by n."""
    return [(n, N - 2 * n) for n in range(N // 2 + 1)]


# --- y factor ---------------------------------------------------------------

def _check_y(p: ModelParams, y):
    if np.any(np.abs(y) > p.half_width * (1 + 1e-14)):
        raise DomainError(f"|y| must not exceed pi/(2q) = {p.half_width}")


def _chi_fn(p: ModelParams, l: int) -> Callable:
    c, w = math.sqrt(2 * p.q / math.pi), (l + 1) * p.q
    if l % 2 == 0:
        return lambda y: np.cos(w * y) * c
    return lambda y: np.sin(w * y) * c


def _chi_derivs(p: ModelParams, l: int, y):
    c, w = math.sqrt(2 * p.q / math.pi), (l + 1) * p.q
    if l % 2 == 0:
        v, d1 = c * np.cos(w * y), -c * w * np.sin(w * y)
    else:
        v, d1 = c * np.sin(w * y), c * w * np.cos(w * y)
    return v, d1, -w * w * v


def eval_chi(p: ModelParams, l: int, y):
    """(chi_l, chi_l', chi_l'') at y; chi_l is the l-th wall mode in y."""
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    y = np.asarray(y, dtype=float)
    _check_y(p, y)
    return _chi_derivs(p, l, y)


# --- x factor ---------------------------------------------------------------

def phi_norm(p: ModelParams, n: int, l: int) -> float:
    k = p.k
    log_sq = (math.log(2 * p.q * (2 * n + l + k + 1.5)) + log_factorial(n)
              + log_gamma(n + l + k + 1.5) - log_factorial(n + l + 1) - log_gamma(n + k + 0.5))
    return math.exp(0.5 * log_sq)


def _envelope_derivs(q: float, k: float, m: float, x):
    """f = tanh(qx)^k sech(qx)^m with f', f''."""
    t = np.tanh(q * x)
    s2 = 1.0 / np.cosh(q * x) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        f = t**k * np.sqrt(s2) ** m
        g = q * (k * s2 / t - m * t)
        dg = -q * q * (k * s2 * (1 + t * t) / (t * t) + m * s2)
        f1 = f * g
        f2 = f * (g * g + dg)
    return f, f1, f2


def _phi_fn(p: ModelParams, n: int, l: int) -> Callable:
    q, k = p.q, p.k
    norm = phi_norm(p, n, l)

    def fn(x):
        t = np.tanh(x * q)
        return norm * t**k * (1.0 / np.cosh(x * q)) ** (l + 2) * jacobi_recurrence(
            n, k - 0.5, l + 1.0, 1.0 - 2.0 * t * t)

    return fn


def _phi_derivs(p: ModelParams, n: int, l: int, x):
    q, k = p.q, p.k
    norm = phi_norm(p, n, l)
    f, f1, f2 = _envelope_derivs(q, k, l + 2, x)
    t = np.tanh(q * x)
    s2 = 1.0 / np.cosh(q * x) ** 2
    z = 1.0 - 2.0 * t * t
    z1 = -4.0 * q * t * s2
    z2 = -4.0 * q * q * s2 * (s2 - 2.0 * t * t)
    idx = JacobiIndex(n, k - 0.5, l + 1.0)
    P, P1, P2 = (jacobi(idx, z, order) for order in (0, 1, 2))
    with np.errstate(invalid="ignore"):
        v = norm * f * P
        d1 = norm * (f1 * P + f * P1 * z1)
        d2 = norm * (f2 * P + 2.0 * f1 * P1 * z1 + f * (P2 * z1 * z1 + P1 * z2))
    return v, d1, d2


def eval_phi(p: ModelParams, n: int, l: int, x):
    """(phi, phi', phi'') of the normalized x factor at x > 0."""
    QuantumNumbers(n, l)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    return _phi_derivs(p, n, l, x)


# --- separable states -------------------------------------------------------

def _check_xy(p: ModelParams, x, y):
    if np.any(np.asarray(x) < 0):
        raise DomainError("x must be nonnegative (domain x > 0)")
    _check_y(p, np.asarray(y))


def psi_state(p: ModelParams, n: int, l: int) -> AnalyticState:
    """psi_{n,l} = phi_{n,l}(x) chi_l(y) as an :class:`AnalyticState`."""
    QuantumNumbers(n, l)
    phi, chi = _phi_fn(p, n, l), _chi_fn(p, l)

    def derivs(x, y):
        a, a1, a2 = _phi_derivs(p, n, l, x)
        b, b1, b2 = _chi_derivs(p, l, y)
        return Derivs(a * b, a1 * b, a * b1, a2 * b, a1 * b1, a * b2)

    return AnalyticState(f"psi[n={n},l={l},k={p.k:g}]", lambda x, y: phi(x) * chi(y), derivs)


def eval_psi(p: ModelParams, qn: QuantumNumbers, x, y) -> Derivs:
    _check_xy(p, x, y)
    return psi_state(p, qn.n, qn.l)(x, y)


# --- zero modes -------------------------------------------------------------

def zero_mode_state(p: ModelParams, s: float) -> AnalyticState:
    """omega_s = tanh(qx)^k sech(qx)^(s+1) cos(qy)^s (unnormalized)."""
    if not s > 0:
        raise DomainError(f"zero-mode index s must be positive, got {s!r}")
    q, k = p.q, p.k

    def fn(x, y):
        return np.tanh(x * q) ** k * (1.0 / np.cosh(x * q)) ** (s + 1) * np.cos(y * q) ** s

    def derivs(x, y):
        f, f1, f2 = _envelope_derivs(q, k, s + 1, x)
        C, S = np.cos(q * y), np.sin(q * y)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = C**s
            g1 = -s * q * C ** (s - 1) * S
            tail = (s - 1) * C ** (s - 2) * S * S if s != 1 else 0.0
            g2 = -s * q * q * (g - tail)
        return Derivs(f * g, f1 * g, f * g1, f2 * g, f1 * g1, f * g2)

    return AnalyticState(f"omega[s={s:g},k={k:g}]", fn, derivs)


def eval_zero_mode(p: ModelParams, s: float, x, y) -> Derivs:
    state = zero_mode_state(p, s)
    _check_xy(p, x, y)
    return state(x, y)


def zero_mode_combination(p: ModelParams, N0: int) -> AnalyticState:
    """sum_s a_s omega_s over odd s <= N0 + 1 with a_{N0+1} = 1 (unnormalized)."""
    a = coeffs.a_coeffs(p.k, N0)
    return AnalyticState.combine(f"zero-combination[N0={N0},k={p.k:g}]",
                                 list(a.values()), [zero_mode_state(p, s) for s in a])


# --- R-diagonal states ------------------------------------------------------

def Psi_state(p: ModelParams, N: int, N0: int) -> AnalyticState:
    """Psi_{N,N0} = sum_n Z_{N0; n, N-2n} psi_{n, N-2n}."""
    SusyLabels(N, N0)
    Z = coeffs.Z_row(p.k, N, N0)
    states = [psi_state(p, n, l) for n, l in level_states(N)]
    return AnalyticState.combine(f"Psi[N={N},N0={N0},k={p.k:g}]", Z, states)


def eval_Psi(p: ModelParams, sl: SusyLabels, x, y) -> Derivs:
    _check_xy(p, x, y)
    return Psi_state(p, sl.N, sl.N0)(x, y)


# --- Poschl-Teller map ------------------------------------------------------

class PTMap(NamedTuple):
    z_of_x: Callable
    kappa: float
    lam: float
    pt_energy: float


def pt_map(p: ModelParams, n: int, l: int) -> PTMap:
    """Map of the x equation onto the trigonometric Poschl-Teller problem."""
    q = p.q

    def z_of_x(x):
        return 2.0 * np.arctan(np.exp(q * np.asarray(x, dtype=float))) - math.pi / 2

    E = energy_level(p, 2 * n + l)
    return PTMap(z_of_x, p.k, l + 1.5, (E - q * q * p.v0) / q**2 + (p.k - 0.5) ** 2)
