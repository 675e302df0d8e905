"""Equilibrium of a chain on a segment with pinned endpoints and constant force.

Interior balance telescopes to f(gap_k) = f(gap_1) + (k-1) F, so the whole
chain is fixed by the first gap, which is found from the length constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .model import InteractionLaw
from .validation import check_count, check_length

_MAX_ITER = 200
_EXT = np.longdouble


def ladder_gaps(first_gap, offsets, a) -> np.ndarray:
    """Gaps with f(gap_k) = f(first_gap) + offsets[k] for f(r) = r**-a."""
    a = _EXT(a)
    return np.power(_EXT(first_gap) ** -a + np.asarray(offsets, dtype=_EXT), -1 / a)


def solve_ladder(length: float, offsets: np.ndarray, a: float, lower: float | None = None) -> float:
    """Largest gap G such that sum_k (G**-a + offsets[k])**(-1/a) == length.

    ``offsets`` must be nonnegative with at least one zero. The length defect
    is strictly increasing in G, so bisection keeps a valid bracket while a
    Newton step does the actual work. Arithmetic is carried out in extended
    precision; the result is returned as an extended-precision scalar.
    """
    offsets = np.asarray(offsets, dtype=_EXT)
    length = _EXT(length)
    a = _EXT(a)
    n = offsets.size
    if n < 1 or offsets.min() != 0.0 or np.any(offsets < 0):
        raise ValueError("offsets must be nonnegative and contain a zero")

    def defect(g):
        gaps = ladder_gaps(g, offsets, a)
        return gaps.sum() - length, gaps

    hi = length
    lo = length / n if lower is None else _EXT(lower)
    s_lo, _ = defect(lo)
    while s_lo > 0.0:
        lo /= 10.0
        s_lo, _ = defect(lo)
    s_hi, _ = defect(hi)
    assert s_lo <= 0.0 <= s_hi, "length defect failed to bracket the root"

    g = lo if -s_lo < s_hi else hi
    best = None
    for _ in range(_MAX_ITER):
        s, gaps = defect(g)
        if best is None or abs(s) < abs(best[1]):
            best = (g, s)
        if s == 0.0:
            break
        if s < 0.0:
            lo = g
        else:
            hi = g
        # dS/dG = sum (gap_k / G)**(a+1)
        ds = np.sum(np.power(gaps / g, a + 1))
        g_new = g - s / ds
        if not (lo < g_new < hi):
            g_new = (lo + hi) / 2
        if g_new == g or hi - lo <= 2 * np.spacing(hi):
            break
        g = g_new
    return best[0]


@dataclass(frozen=True)
class SegmentProblem:
    """Chain of ``n_points`` particles on [0, length] with both ends pinned."""

    length: float
    n_points: int
    force: float
    law: InteractionLaw

    def __post_init__(self):
        object.__setattr__(self, "length", check_length(self.length, "length"))
        object.__setattr__(self, "n_points", check_count(self.n_points, 3, "n_points"))
        object.__setattr__(self, "force", float(self.force))

    @property
    def mean_gap(self) -> float:
        return self.length / (self.n_points - 1)

    @property
    def q(self) -> float:
        return self.mean_gap ** self.law.a * self.force


@dataclass(frozen=True)
class SegmentSolution:
    problem: SegmentProblem
    gaps: np.ndarray = field(repr=False)
    deltas: np.ndarray = field(repr=False)
    q: float
    ladder: np.ndarray = field(repr=False)
    length_defect: float
    residual_norm: float

    @property
    def positions(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.gaps)])

    @property
    def first_gap(self) -> float:
        return float(self.gaps[0])

    @property
    def last_gap(self) -> float:
        return float(self.gaps[-1])


def interior_residual(positions, force: float, law: InteractionLaw) -> np.ndarray:
    """Balance of interior particles f(x_k - x_{k-1}) + F - f(x_{k+1} - x_k), k = 2..N-1."""
    fd = law.force(np.diff(np.asarray(positions, dtype=float)))
    return fd[:-1] + force - fd[1:]


def solve_exact(problem: SegmentProblem, lower: float | None = None) -> SegmentSolution:
    if problem.force < 0.0:
        raise DomainError("solve_exact needs F >= 0; reverse the segment orientation for negative force")
    a = problem.law.a
    n_gaps = problem.n_points - 1
    ladder = np.arange(n_gaps) * problem.force
    g1 = solve_ladder(problem.length, ladder, a, lower=lower)
    gaps_ext = ladder_gaps(g1, ladder, a)
    mean = problem.mean_gap
    gaps = gaps_ext.astype(float)
    deltas = (gaps_ext / (_EXT(problem.length) / n_gaps) - 1).astype(float)
    fd = problem.law.force(gaps)
    res = fd[:-1] + problem.force - fd[1:]
    return SegmentSolution(
        problem=problem,
        gaps=gaps,
        deltas=deltas,
        q=problem.q,
        ladder=ladder * mean ** a,
        length_defect=float(gaps_ext.sum() - _EXT(problem.length)),
        residual_norm=float(np.max(np.abs(res))) if res.size else 0.0,
    )


def perturbative_deltas(problem: SegmentProblem) -> tuple[float, float]:
    """Two-term expansions of the first and last relative gap deviations."""
    inv_a = 1.0 / problem.law.a
    n = problem.n_points
    q = problem.q
    first = inv_a * q * (n / 2 - 1)
    second = inv_a * (inv_a + 1) / 12 * q * q * (n - 2) * (n - 3)
    return first + second, -first + second


def endpoint_feasibility(sol: SegmentSolution, F_at_0: float, F_at_L: float) -> bool:
    """End particles must be pressed into the walls, never pulled off them."""
    f = sol.problem.law.force
    return bool(F_at_0 - f(sol.first_gap) <= 0.0 and F_at_L + f(sol.last_gap) >= 0.0)
