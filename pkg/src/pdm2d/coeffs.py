"""Coefficient families connecting the separable and the R-diagonal bases.

Conventions
-----------
``psi(k; n, l)`` is the separable eigenfunction with N = 2n + l and
``Psi(k; N, N0)`` the simultaneous eigenfunction of H and R with
nu = N - N0.  Gamma-function ratios are evaluated in log space and
exponentiated once.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .special import log_factorial, log_gamma

__all__ = [
    "x_factor",
    "x_factor_binomial",
    "x_factor_ground",
    "phase_exponent",
    "a_coeffs",
    "X_coeff",
    "X_coeff_recursive",
    "X_vector",
    "S_sum",
    "Y_coeff",
    "Nbar",
    "Z_row",
    "Z_row_chain",
    "Z_row_closed",
    "ladder_coeffs",
    "ladder_targets",
    "TransformMatrix",
    "transform_matrix",
]

lg = log_gamma
lf = log_factorial


def _check_level(N: int, N0: int) -> int:
    if N0 < 0 or N0 % 2 or N0 > N:
        raise DomainError(f"invalid labels N={N}, N0={N0}: N0 must be even with 0 <= N0 <= N")
    return N - N0


# --- lattice-path factor ----------------------------------------------------

@lru_cache(maxsize=None)
def x_factor(l: int, nu: int, mu: int) -> int:
    """Number of nu-step +-1 paths from height l to l + nu - 2 mu staying >= 0.

    Evaluated with the recursion over nu; the base case nu = 0 has a single
    empty path.
    """
    if mu < 0 or mu > nu or l < 0:
        return 0
    if nu == 0:
        return 1
    if mu == 0:
        return x_factor(l, nu - 1, 0)
    if mu == nu:
        return 0 if l == nu - 1 else x_factor(l, nu - 1, nu - 1)
    gate = 0 if 2 * mu == l + nu + 1 else 1
    return gate * x_factor(l, nu - 1, mu - 1) + x_factor(l, nu - 1, mu)


def x_factor_binomial(l: int, nu: int, mu: int) -> int:
    """Closed form valid when l >= nu: a binomial coefficient."""
    if l < nu:
        raise DomainError("binomial closed form requires l >= nu")
    return math.comb(nu, mu) if 0 <= mu <= nu else 0


def x_factor_ground(nu: int, mu: int) -> int:
    """Closed form for paths starting at height zero (ballot numbers)."""
    if mu < 0 or mu > nu // 2:
        return 0
    num = math.factorial(nu) * (nu - 2 * mu + 1)
    den = math.factorial(mu) * math.factorial(nu - mu + 1)
    q, r = divmod(num, den)
    assert r == 0
    return q


def phase_exponent(nu: int, N: int, mu: int) -> Fraction:
    """Exponent nu (N + (nu + 1)/2) + mu of the sign of Y, kept exact."""
    return nu * (N + Fraction(nu + 1, 2)) + mu


# --- zero-mode combination --------------------------------------------------

def a_coeffs(k: float, N0: int) -> dict[int, float]:
    """Coefficients a_s (odd s <= N0 + 1) of the zero-mode eigen-combination.

    Normalized by a_{N0+1} = 1.
    """
    if N0 < 0 or N0 % 2:
        raise DomainError(f"N0 must be a nonnegative even integer, got {N0}")
    out = {}
    for s in range(1, N0 + 2, 2):
        h = (N0 + 1 - s) // 2
        sign = -1.0 if h % 2 else 1.0
        log_mag = (lf(N0 + 1) + lg((N0 + s) / 2 + k + 1) - (N0 + 1 - s) * math.log(2.0)
                   - lf(s) - lf(h) - lg(N0 + k + 1.5))
        out[s] = sign * math.exp(log_mag)
    return out


# --- X: zero modes in the separable basis -----------------------------------

def X_coeff(k: float, N0: int, n: int) -> float:
    if N0 < 0 or N0 % 2 or not 0 <= n <= N0 // 2:
        raise DomainError(f"X coefficient out of range: N0={N0}, n={n}")
    log_sq = (lf(N0 + 1) + lg(k + 1) + lg(n + k + 0.5) + lg(N0 - n + k + 1.5)
              - N0 * math.log(2.0) - lf(n) - lf(N0 - n + 1) - lg(N0 / 2 + k + 1)
              - lg(k + 0.5) - lg((N0 + 3) / 2 + k))
    return math.exp(0.5 * log_sq)


def X_coeff_recursive(k: float, N0: int, n: int) -> float:
    """Same coefficient via the ratio to X_{N0/2,0} and its own closed form."""
    if N0 < 0 or N0 % 2 or not 0 <= n <= N0 // 2:
        raise DomainError(f"X coefficient out of range: N0={N0}, n={n}")
    h = N0 // 2
    log_ratio_sq = (lf(h) + lf(h + 1) + lg(N0 - n + k + 1.5) + lg(n + k + 0.5)
                    - lf(n) - lf(N0 - n + 1) - lg((N0 + 3) / 2 + k) - lg((N0 + 1) / 2 + k))
    log_top_sq = (lf(N0 + 1) + lg((N0 + 1) / 2 + k) + lg(k + 1)
                  - N0 * math.log(2.0) - lf(h) - lf(h + 1) - lg(k + 0.5) - lg(h + k + 1))
    return math.exp(0.5 * (log_ratio_sq + log_top_sq))


def X_vector(k: float, N0: int) -> np.ndarray:
    return np.array([X_coeff(k, N0, n) for n in range(N0 // 2 + 1)])


def S_sum(k: float, N0: int, method: str = "closed") -> float:
    """Sum_{n <= N0/2} Gamma(N0-n+k+3/2) Gamma(n+k+1/2) / (n! (N0-n+1)!).

    ``method`` is ``"closed"``, ``"direct"`` (half range) or ``"full"``
    (half of the symmetric sum over 0..N0+1).
    """
    if method == "closed":
        return math.exp(lg(N0 + 2 * k + 2) + 2 * lg(k + 0.5) - math.log(2.0)
                        - lf(N0 + 1) - lg(2 * k + 1))

    def term(n):
        return math.exp(lg(N0 - n + k + 1.5) + lg(n + k + 0.5) - lf(n) - lf(N0 - n + 1))

    if method == "direct":
        return math.fsum(term(n) for n in range(N0 // 2 + 1))
    if method == "full":
        return 0.5 * math.fsum(term(n) for n in range(N0 + 2))
    raise ValueError(f"unknown method {method!r}")


# --- Y: iterated raising operators ------------------------------------------

def Y_coeff(k: float, n: int, l: int, nu: int, mu: int, q: float = 1.0) -> float:
    """Coefficient of psi(k; n+mu, l+nu-2mu) in the nu-fold raising of psi(k+nu; n, l)."""
    if not 0 <= mu <= nu:
        raise DomainError(f"need 0 <= mu <= nu, got mu={mu}, nu={nu}")
    paths = x_factor(l, nu, mu)
    if paths == 0:
        return 0.0
    N = 2 * n + l
    e = phase_exponent(nu, N, mu)
    if e.denominator != 1:
        raise ArithmeticError(f"non-integer phase exponent {e} for nu={nu}, N={N}, mu={mu}")
    sign = -1.0 if int(e) % 2 else 1.0
    log_sq = (lf(n + mu) + lf(n + l + nu - mu + 1) + lg(n + nu + k + 0.5)
              + lg(n + l + nu + k + 1.5) - lf(n) - lf(n + l + 1)
              - lg(n + mu + k + 0.5) - lg(n + l + nu - mu + k + 1.5))
    return sign * q**nu * paths * math.exp(0.5 * log_sq)


def Nbar(k: float, N: int, N0: int, q: float = 1.0) -> float:
    nu = _check_level(N, N0)
    return q ** (-nu) * math.exp(0.5 * (lg(2 * k + nu) - lf(nu) - lg(2 * k + 2 * nu)))


# --- Z: the transformation matrix -------------------------------------------

def Z_row_chain(k: float, N: int, N0: int) -> np.ndarray:
    """Expansion coefficients of Nbar eta+(k) ... eta+(k+nu-1) Psi(k+nu)_{N0,N0}.

    Assembled from Nbar > 0, X > 0 and the ladder coefficients Y, i.e. the
    phase produced by applying the raising chain literally.
    """
    nu = _check_level(N, N0)
    row = np.zeros(N // 2 + 1)
    nb = Nbar(k, N, N0)
    for n in range(N // 2 + 1):
        lo, hi = max(0, n + N0 - N), min(N0 // 2, n)
        acc = [X_coeff(k + nu, N0, m) * Y_coeff(k, m, N0 - 2 * m, nu, n - m)
               for m in range(lo, hi + 1)]
        row[n] = nb * math.fsum(acc)
    return row


def Z_row(k: float, N: int, N0: int) -> np.ndarray:
    """Z_{N0; n, N-2n} for n = 0..floor(N/2) in the library's sign convention.

    The convention is (-1)^nu times :func:`Z_row_chain`, which makes every
    N0 = 0 row coincide with the closed form :func:`Z_row_closed` including
    its sign; rows with nu = 0 keep positive X.
    """
    nu = _check_level(N, N0)
    row = Z_row_chain(k, N, N0)
    return -row if nu % 2 else row


def Z_row_closed(k: float, N: int) -> np.ndarray:
    """Closed form of the N0 = 0 row."""
    row = np.zeros(N // 2 + 1)
    for n in range(N // 2 + 1):
        sign = -1.0 if (N * (N + 3) // 2 + n) % 2 else 1.0
        log_sq = (lf(N) + lg(N / 2 + k) + lg((N + 1) / 2 + k) + lg(N + k + 1.5)
                  - N * math.log(2.0) - lf(n) - lf(N - n + 1) - lg(N + k)
                  - lg(n + k + 0.5) - lg(N - n + k + 1.5))
        row[n] = sign * (N - 2 * n + 1) * math.exp(0.5 * log_sq)
    return row


@dataclass
class TransformMatrix:
    """Rows: even N0 <= N.  Columns: n = 0..floor(N/2), i.e. psi(n, N-2n)."""

    N: int
    k: float
    entries: np.ndarray
    row_labels: list[int] = field(default_factory=list)
    col_labels: list[tuple[int, int]] = field(default_factory=list)

    def orthogonality_residual(self) -> float:
        Z = self.entries
        eye = np.eye(Z.shape[0])
        return float(max(np.abs(Z.T @ Z - eye).max(), np.abs(Z @ Z.T - eye).max()))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "rows": [{"N0": r} for r in self.row_labels],
            "columns": [{"n": n, "l": l} for n, l in self.col_labels],
            "entries": [[float(v) for v in row] for row in self.entries],
            "orthogonality_residual": self.orthogonality_residual(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def transform_matrix(k: float, N: int) -> TransformMatrix:
    rows = list(range(0, N + 1, 2))
    Z = np.array([Z_row(k, N, N0) for N0 in rows])
    cols = [(n, N - 2 * n) for n in range(N // 2 + 1)]
    return TransformMatrix(N=N, k=float(k), entries=Z, row_labels=rows, col_labels=cols)


# --- single-step ladder action ----------------------------------------------

def ladder_targets(n: int, l: int, direction: str) -> tuple[tuple[int, int], tuple[int, int]]:
    """(n, l) labels multiplying the two coefficients of :func:`ladder_coeffs`."""
    if direction == "down":
        return (n - 1, l + 1), (n, l - 1)
    if direction == "up":
        return (n + 1, l - 1), (n, l + 1)
    raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def ladder_coeffs(k: float, n: int, l: int, direction: str, q: float = 1.0) -> tuple[float, float]:
    """Coefficients of the one-step action of eta (down) or eta^dagger (up).

    down: eta(k) psi(k; n, l) = c1 psi(k+1; n-1, l+1) + c2 psi(k+1; n, l-1)
    up:   eta(k)^dagger psi(k+1; n, l) = c1 psi(k; n+1, l-1) + c2 psi(k; n, l+1)
    """
    if n < 0 or l < 0:
        raise DomainError(f"n and l must be nonnegative, got n={n}, l={l}")
    N = 2 * n + l
    gate = 0.0 if l == 0 else 1.0
    if direction == "down":
        sign = -1.0 if N % 2 else 1.0
        c1 = -math.sqrt(n * (n + l + k + 1.5))
        c2 = gate * math.sqrt((n + k + 0.5) * (n + l + 1))
    elif direction == "up":
        sign = -1.0 if (N + 1) % 2 else 1.0
        c1 = -gate * math.sqrt((n + 1) * (n + l + k + 1.5))
        c2 = math.sqrt((n + k + 0.5) * (n + l + 2))
    else:
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")
    return sign * q * c1 + 0.0, sign * q * c2 + 0.0
