"""Domain types, force field, equilibrium residual and energy on the circle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .exceptions import CirculationError, DomainError, OrderingError
from .validation import as_fraction, check_exponent, check_length, check_positions, wrap


@dataclass(frozen=True)
class InteractionLaw:
    """Pair repulsion f(r) = r**-a with potential V(r) = r**(1-a) / (a-1)."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", check_exponent(self.a))

    def force(self, r):
        return np.power(r, -self.a)

    def potential(self, r):
        return np.power(r, 1.0 - self.a) / (self.a - 1.0)

    def slope(self, r):
        """Derivative f'(r) = -a r**(-a-1)."""
        return -self.a * np.power(r, -self.a - 1.0)


@dataclass(frozen=True)
class RingGeometry:
    L: float

    def __post_init__(self):
        object.__setattr__(self, "L", check_length(self.L))


class PiecewiseForce:
    """Left-continuous piecewise-constant force on the circle (0, L].

    ``values[j]`` acts on the arc ``(breakpoints[j], breakpoints[j+1]]``.
    Breakpoints and values are kept as Fractions so that circulation and
    partition checks are exact; evaluation at float positions uses their
    nearest doubles.
    """

    def __init__(self, breakpoints: Sequence, values: Sequence, overrides: Mapping | None = None):
        bps = tuple(as_fraction(b) for b in breakpoints)
        vals = tuple(as_fraction(v) for v in values)
        if len(bps) < 2 or bps[0] != 0:
            raise ValueError("breakpoints must start at 0 and contain at least one piece")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise ValueError(f"need {len(bps) - 1} piece values, got {len(vals)}")
        ovr = {}
        for k, v in (overrides or {}).items():
            k = as_fraction(k)
            if k not in bps[1:]:
                raise ValueError(f"override at {k} is not a breakpoint in (0, L]")
            ovr[k] = as_fraction(v)
        self.breakpoints = bps
        self.values = vals
        self.overrides = dict(sorted(ovr.items()))
        self._edges = np.array([float(b) for b in bps[1:]])
        self._vals = np.array([float(v) for v in vals])
        self._ovr_x = np.array([float(k) for k in self.overrides])
        self._ovr_v = np.array([float(v) for v in self.overrides.values()])

    @classmethod
    def constant(cls, L, value=0):
        return cls([0, L], [value])

    @classmethod
    def two_piece(cls, L, M, F1, F2, overrides=None):
        """F1 on (0, M], F2 on (M, L]."""
        return cls([0, M, L], [F1, F2], overrides)

    @property
    def L(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def geometry(self) -> RingGeometry:
        return RingGeometry(float(self.L))

    @property
    def n_pieces(self) -> int:
        return len(self.values)

    def piece_index(self, x) -> np.ndarray:
        """Index j of the arc (b_j, b_{j+1}] containing each position."""
        y = wrap(x, float(self.L))
        return np.minimum(np.searchsorted(self._edges, y, side="left"), self.n_pieces - 1)

    def edge_room(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Clockwise and counter-clockwise distance from each position to the ends of its arc."""
        y = wrap(x, float(self.L))
        if self.n_pieces == 1 and not self.overrides:
            # a single arc has no edges: 0 and L are the same point
            inf = np.full(y.shape, np.inf)
            return inf, inf
        j = self.piece_index(y)
        lower = np.concatenate([[0.0], self._edges])
        return self._edges[j] - y, y - lower[j]

    def __call__(self, x) -> np.ndarray:
        y = wrap(x, float(self.L))
        out = self._vals[np.minimum(np.searchsorted(self._edges, y, side="left"), self.n_pieces - 1)]
        if self._ovr_x.size:
            hit = y[..., None] == self._ovr_x
            rows = hit.any(axis=-1)
            if np.any(rows):
                out = np.array(out, copy=True)
                out[rows] = self._ovr_v[hit[rows].argmax(axis=-1)]
        return out

    def circulation(self) -> Fraction:
        return sum((v * (b1 - b0) for v, b0, b1 in zip(self.values, self.breakpoints, self.breakpoints[1:])), Fraction(0))

    def potential(self, x) -> np.ndarray:
        """W(x) = -integral_0^x F, so that F = -W'. Needs zero circulation to be periodic."""
        if self.circulation() != 0:
            raise CirculationError(f"circulation {self.circulation()} != 0; the potential is multivalued")
        y = wrap(x, float(self.L))
        starts = np.array([float(b) for b in self.breakpoints[:-1]])
        widths = np.diff([float(b) for b in self.breakpoints])
        cum = np.concatenate([[0.0], np.cumsum(self._vals * widths)])
        j = np.minimum(np.searchsorted(self._edges, y, side="left"), self.n_pieces - 1)
        return -(cum[j] + self._vals[j] * (y - starts[j]))

    def without_overrides(self) -> "PiecewiseForce":
        return PiecewiseForce(self.breakpoints, self.values)

    def to_dict(self) -> dict:
        return {
            "breakpoints": [str(b) for b in self.breakpoints],
            "values": [str(v) for v in self.values],
            "overrides": {str(k): str(v) for k, v in self.overrides.items()},
        }

    def __eq__(self, other):
        if not isinstance(other, PiecewiseForce):
            return NotImplemented
        return (self.breakpoints, self.values, self.overrides) == (other.breakpoints, other.values, other.overrides)

    def __hash__(self):
        return hash((self.breakpoints, self.values, tuple(self.overrides.items())))

    def __repr__(self):
        return f"PiecewiseForce(breakpoints={[str(b) for b in self.breakpoints]}, values={[str(v) for v in self.values]}, overrides={ {str(k): str(v) for k, v in self.overrides.items()} })"


@dataclass(frozen=True)
class Configuration:
    geometry: RingGeometry
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = check_positions(self.positions, self.geometry.L).copy()
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @classmethod
    def equidistant(cls, L: float, N: int, anchor: float | None = None) -> "Configuration":
        L = float(L)
        gaps = np.full(N, L / N)
        return from_gaps(GapVector(RingGeometry(L), L / N if anchor is None else anchor, gaps))

    @property
    def N(self) -> int:
        return self.positions.size

    @property
    def L(self) -> float:
        return self.geometry.L

    def gaps(self) -> np.ndarray:
        """Clockwise gaps x_{k+1} - x_k, last one wrapping through L."""
        x = self.positions
        return np.append(np.diff(x), x[0] + (self.L - x[-1]))


@dataclass(frozen=True)
class GapVector:
    geometry: RingGeometry
    anchor: float
    gaps: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gaps, dtype=float)
        L = self.geometry.L
        if g.ndim != 1 or g.size < 2:
            raise OrderingError("need at least two gaps")
        if np.any(g <= 0.0) or not np.all(np.isfinite(g)):
            raise OrderingError("all gaps must be positive")
        if abs(g.sum() - L) > 1e-12 * L:
            raise OrderingError(f"gaps sum to {g.sum()!r}, expected {L!r}")
        # anchor = x_1 must leave x_N = anchor + L - gaps[-1] inside (0, L]
        if not (0.0 < self.anchor <= L) or self.anchor > g[-1] * (1 + 1e-12):
            raise OrderingError("anchor must satisfy 0 < anchor <= last (wraparound) gap")
        g.setflags(write=False)
        object.__setattr__(self, "gaps", g)
        object.__setattr__(self, "anchor", float(self.anchor))


@dataclass(frozen=True)
class ResidualVector:
    values: np.ndarray = field(repr=False)
    norm: float
    relative_norm: float


def pair_force(law: InteractionLaw, r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("pair force needs r > 0 (particles collided or lost their order)")
    out = law.force(r)
    return float(out) if out.ndim == 0 else out


def to_gaps(config: Configuration) -> GapVector:
    return GapVector(config.geometry, float(config.positions[0]), config.gaps())


def from_gaps(gaps: GapVector) -> Configuration:
    g = gaps.gaps
    x = gaps.anchor + np.concatenate([[0.0], np.cumsum(g[:-1])])
    # clamp the last point back onto L when roundoff pushes it just past
    x[-1] = min(x[-1], gaps.geometry.L)
    return Configuration(gaps.geometry, x)


def residual_values(x: np.ndarray, L: float, field: PiecewiseForce, law: InteractionLaw) -> np.ndarray:
    """Residual for an ordered (possibly unwrapped) position array."""
    d = np.append(np.diff(x), x[0] + L - x[-1])
    fd = law.force(d)
    return np.roll(fd, 1) + field(x) - fd


def residual(config: Configuration, field: PiecewiseForce, law: InteractionLaw) -> ResidualVector:
    """r_k = f(x_k - x_{k-1}) + F(x_k) - f(x_{k+1} - x_k) with cyclic neighbours."""
    if float(field.L) != config.L:
        raise ValueError("field and configuration live on circles of different length")
    d = config.gaps()
    fd = law.force(d)
    r = np.roll(fd, 1) + field(config.positions) - fd
    norm = float(np.max(np.abs(r)))
    return ResidualVector(r, norm, norm / float(np.max(fd)))


def energy_values(x: np.ndarray, L: float, field: PiecewiseForce, law: InteractionLaw) -> float:
    d = np.append(np.diff(x), x[0] + L - x[-1])
    return float(np.sum(law.potential(d)) + np.sum(field.potential(x)))


def energy(config: Configuration, field: PiecewiseForce, law: InteractionLaw) -> float:
    """Sum of pair potentials plus external potential; its negative gradient is the residual."""
    return energy_values(config.positions, config.L, field, law)


def force_sum(config: Configuration, field: PiecewiseForce) -> tuple[float, tuple[int, ...]]:
    """Total external force and the number of particles on each piece."""
    counts = np.bincount(field.piece_index(config.positions), minlength=field.n_pieces)
    return float(np.sum(field(config.positions))), tuple(int(c) for c in counts)
