"""Input validation helpers shared by the functional core and the estimators."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational, Real

import numpy as np

from .exceptions import DomainError, OrderingError


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, ``"p/q"`` strings or floats to a Fraction.

    Floats are converted exactly (``Fraction(0.1)`` is not 1/10); pass strings
    when the decimal value is what you mean.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, Real):
        if not np.isfinite(value):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(float(value))
    raise TypeError(f"cannot interpret {value!r} as a rational")


def check_exponent(a) -> float:
    a = float(a)
    if not np.isfinite(a) or a <= 1.0:
        raise DomainError(f"exponent a must satisfy a > 1, got {a}")
    return a


def check_length(value, name: str = "L") -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a positive finite length, got {value}")
    return value


def check_count(n, minimum: int, name: str = "N") -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_positions(x, L: float) -> np.ndarray:
    """Return ``x`` as a float array after checking 0 < x_1 < ... < x_N <= L."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise OrderingError(f"positions must be one-dimensional, got shape {x.shape}")
    if x.size < 2:
        raise OrderingError("a configuration needs at least two particles")
    if not np.all(np.isfinite(x)):
        raise OrderingError("positions must be finite")
    if x[0] <= 0.0 or x[-1] > L:
        raise OrderingError(f"positions must lie in (0, {L}]")
    if np.any(np.diff(x) <= 0.0):
        raise OrderingError("positions must be strictly increasing")
    if x[0] + L - x[-1] <= 0.0:
        raise OrderingError("wraparound gap vanished")
    return x


def check_position_matrix(X, L: float) -> np.ndarray:
    """2-D variant of :func:`check_positions`, one configuration per row."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise OrderingError(f"expected a 2-D array of positions, got shape {X.shape}")
    for row in X:
        check_positions(row, L)
    return X


def wrap(x, L: float) -> np.ndarray:
    """Reduce positions modulo L into the half-open arc (0, L]."""
    y = np.mod(np.asarray(x, dtype=float), L)
    return np.where(y <= 0.0, y + L, y)
