"""Functions on the plane that can be sampled with exact partial derivatives."""
from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

from .jets import Jet, variables


class Derivs(NamedTuple):
    value: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    dxx: np.ndarray
    dxy: np.ndarray
    dyy: np.ndarray

    def __add__(self, other):  # noqa: D105 - elementwise, not tuple concat
        return Derivs(*(a + b for a, b in zip(self, other)))

    def scale(self, c) -> "Derivs":
        return Derivs(*(c * a for a in self))


def derivs_from_jet(J: Jet) -> Derivs:
    return Derivs(J.partial(0, 0), J.partial(1, 0), J.partial(0, 1),
                  J.partial(2, 0), J.partial(1, 1), J.partial(0, 2))


class Field:
    """Anything exposing ``jet(x, y, order)``."""

    label = "field"

    def jet(self, x, y, order: int) -> Jet:
        raise NotImplementedError

    def __call__(self, x, y) -> Derivs:
        return derivs_from_jet(self.jet(x, y, 2))

    def values(self, x, y) -> np.ndarray:
        return self.jet(x, y, 0).value

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


class AnalyticState(Field):
    """A closed-form function with an explicit second-order derivative route.

    ``fn(x, y)`` must be written with numpy operations only, so that it accepts
    both arrays and :class:`Jet` coordinates; ``derivs(x, y)`` returns the
    hand-derived :class:`Derivs`.  The two routes are independent and are
    cross-checked in the test-suite.
    """

    def __init__(self, label: str, fn: Callable, derivs: Callable | None = None):
        self.label = label
        self.fn = fn
        self._derivs = derivs

    def jet(self, x, y, order: int) -> Jet:
        X, Y = variables(x, y, order)
        out = self.fn(X, Y)
        if not isinstance(out, Jet):  # constant-in-(x,y) function
            out = Jet.constant(out, order, X.shape)
        return out

    def __call__(self, x, y) -> Derivs:
        if self._derivs is None:
            return super().__call__(x, y)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self._derivs(x, y)

    def values(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.asarray(self.fn(x, y), dtype=float) * np.ones_like(x)

    @classmethod
    def combine(cls, label: str, coeffs: Sequence[float],
                states: Sequence["AnalyticState"]) -> "AnalyticState":
        """Fixed linear combination sum_i coeffs[i] * states[i]."""
        coeffs = [float(c) for c in coeffs]
        states = list(states)

        def fn(x, y):
            out = 0.0
            for c, s in zip(coeffs, states):
                out = s.fn(x, y) * c + out
            return out

        def derivs(x, y):
            total = None
            for c, s in zip(coeffs, states):
                d = s(x, y).scale(c)
                total = d if total is None else total + d
            return total

        return cls(label, fn, derivs)


class JetField(Field):
    """Field defined directly by a jet-producing callable."""

    def __init__(self, label: str, jet_fn: Callable[[np.ndarray, np.ndarray, int], Jet]):
        self.label = label
        self._jet_fn = jet_fn

    def jet(self, x, y, order: int) -> Jet:
        return self._jet_fn(x, y, order)
