"""Circle equilibria built by gluing segment equilibria.

Two segments that overlap by one gap at each end cover the circle; when the
end gaps of both segments agree and the overlap lengths add up to the
circumference, the union is an equilibrium on the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, least_squares

from .exceptions import (
    CommensurabilityError,
    InfeasibleTargetError,
    NotEquilibriumError,
    ParityError,
    PartitionImbalanceError,
)
from .model import Configuration, GapVector, InteractionLaw, PiecewiseForce, RingGeometry, from_gaps, residual
from .segment import SegmentProblem, SegmentSolution, ladder_gaps, perturbative_deltas, solve_exact, solve_ladder
from .validation import as_fraction, check_count

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class SymmetricSpec:
    """+F on (0, L/2], -F on (L/2, L] with N particles, optionally through ``target``."""

    L: float
    F: float
    N: int
    law: InteractionLaw
    target: float | None = None

    def __post_init__(self):
        if self.F <= 0:
            raise ValueError("symmetric construction needs F > 0")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if self.N % 2:
            raise ParityError(f"N = {self.N} is odd: no equilibrium exists for the mirror-symmetric field")
        if self.target is not None and not (0.0 < self.target <= self.L):
            raise ValueError(f"target must lie in (0, {self.L}]")

    @property
    def M(self) -> float:
        return self.L / 2

    def field(self) -> PiecewiseForce:
        F = as_fraction(self.F)
        return PiecewiseForce.two_piece(as_fraction(self.L), as_fraction(self.L) / 2, F, -F)


@dataclass(frozen=True)
class GlueParams:
    m: float
    b: float
    segment: SegmentSolution = field(repr=False)
    iterations: int = 0

    @property
    def length_defect(self) -> float:
        return 2 * self.m - self.segment.first_gap - self.segment.last_gap

    def feasible(self) -> bool:
        d1, dl = self.segment.first_gap, self.segment.last_gap
        return 0 < self.b < d1 and self.b < self.m < dl + self.b


def _overlap_segment(spec: SymmetricSpec, m: float) -> SegmentSolution:
    return solve_exact(SegmentProblem(spec.M + m, spec.N // 2 + 2, spec.F, spec.law))


def solve_overlap(spec: SymmetricSpec, tol: float = 1e-15, max_iter: int = 400) -> GlueParams:
    """Overlap m with 2m = first + last gap of the segment on [0, M + m].

    Damped fixed-point iteration from m = M/N with a bisection fallback.
    """
    m = spec.M / spec.N
    seg = _overlap_segment(spec, m)
    it = 0
    for it in range(1, max_iter + 1):
        target = 0.5 * (seg.first_gap + seg.last_gap)
        if abs(target - m) <= tol * spec.L:
            break
        m = m + 0.5 * (target - m)
        seg = _overlap_segment(spec, m)
    else:
        def h(mm):
            s = _overlap_segment(spec, mm)
            return 2 * mm - s.first_gap - s.last_gap

        m = brentq(h, 0.0, spec.M, xtol=tol * spec.L, rtol=4 * np.finfo(float).eps)
        seg = _overlap_segment(spec, m)
    return GlueParams(m=m, b=0.5 * seg.first_gap, segment=seg, iterations=it)


def symmetric_circle_gaps(glue: GlueParams) -> np.ndarray:
    """Clockwise gaps starting after x_1; the last entry wraps through L."""
    d = glue.segment.gaps
    half = d.size - 1  # N/2
    return np.concatenate([d[1 : half + 1], d[half - 1 : 0 : -1], d[:1]])


def _normalized(gaps: np.ndarray, L: float) -> np.ndarray:
    return gaps * (L / gaps.sum())


def _in_arcs(x: np.ndarray, L: float, M: float, n_first: int) -> bool:
    return bool(x[0] > 0 and x[n_first - 1] <= M and x[n_first] > M and x[-1] <= L)


def construct_symmetric(spec: SymmetricSpec, verify: bool = True) -> Configuration:
    L, M, N = float(spec.L), float(spec.M), spec.N
    glue = solve_overlap(spec)
    gaps = _normalized(symmetric_circle_gaps(glue), L)
    x = from_gaps(GapVector(RingGeometry(L), glue.segment.first_gap - glue.b, gaps)).positions

    if spec.target is not None:
        t = float(spec.target)
        dist = np.mod(t - x + L / 2, L) - L / 2
        for k in np.argsort(np.abs(dist), kind="stable")[:2]:
            shifted = t + (x - x[k])
            if _in_arcs(shifted, L, M, N // 2):
                x = shifted
                break
        else:
            raise InfeasibleTargetError(
                f"no particle of the symmetric equilibrium can be moved onto x = {t} "
                "without a particle leaving its arc"
            )

    config = Configuration(RingGeometry(L), x)
    if verify:
        _verify_symmetric(config, spec)
    return config


def _verify_symmetric(config: Configuration, spec: SymmetricSpec) -> None:
    res = residual(config, spec.field(), spec.law)
    if res.relative_norm >= RESIDUAL_TOL:
        raise NotEquilibriumError(f"constructed configuration has relative residual {res.relative_norm:.3e}")
    if not _in_arcs(config.positions, config.L, spec.M, spec.N // 2):
        raise NotEquilibriumError("constructed configuration does not put N/2 particles on each arc")


def two_piece_gaps(L, F1, F2, N1: int, N2: int, law: InteractionLaw) -> np.ndarray:
    """The unique gap vector balancing N1 particles under F1 followed by N2 under F2.

    Requires F1*N1 + F2*N2 == 0. Gap k (0-based) sits after particle k+1; the
    last one wraps through L.
    """
    forces = np.concatenate([np.full(N1, float(F1)), np.full(N2, float(F2))])
    c = np.cumsum(forces)
    c[-1] = 0.0
    offsets = c - c.min()
    G = solve_ladder(float(L), offsets, law.a)
    return _normalized(ladder_gaps(G, offsets, law.a).astype(float), float(L))


def placement_window(L, M, gaps: np.ndarray, N1: int) -> tuple[float, float]:
    """Admissible x_1 range (lo, hi] keeping particles 1..N1 in (0, M], the rest in (M, L]."""
    P = np.concatenate([[0.0], np.cumsum(gaps[:-1])])  # x_{j+1} - x_1
    M = float(M)
    lo = max(0.0, M - P[N1])
    hi = min(float(gaps[-1]), M - P[N1 - 1])
    return lo, hi


def construct_two_piece(L, M, F1, F2, N1: int, N2: int, law: InteractionLaw, where: float = 0.5) -> Configuration:
    """Equilibrium for the partition (N1, N2), placed at fraction ``where`` of its window."""
    gaps = two_piece_gaps(L, F1, F2, N1, N2, law)
    lo, hi = placement_window(L, M, gaps, N1)
    if not lo < hi:
        raise NotEquilibriumError(f"partition ({N1}, {N2}) cannot be placed: window ({lo:.3e}, {hi:.3e}] is empty")
    anchor = lo + where * (hi - lo) if where > 0 else np.nextafter(lo, hi)
    return from_gaps(GapVector(RingGeometry(float(L)), anchor, gaps))


@dataclass(frozen=True)
class GlueReport:
    M1: Fraction
    M2: Fraction
    F1: Fraction
    F2: Fraction
    N1: int
    N2: int
    a: float
    m1: float
    m2: float
    infeasibility: float
    constraint_residuals: tuple[float, float, float]
    m_A: float
    m_B: float
    m_A_twoterm: float
    m_B_twoterm: float
    compatibility: tuple[float, float]
    c1: float
    c4: float
    d1: float
    d4: float
    placement_window: tuple[float, float]
    circle_gaps: np.ndarray = field(repr=False)

    @property
    def L(self) -> Fraction:
        return self.M1 + self.M2

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.N1, self.N2)

    @property
    def placement_feasible(self) -> bool:
        lo, hi = self.placement_window
        return lo < hi

    def to_dict(self) -> dict:
        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            elif isinstance(v, tuple):
                v = list(v)
            out[k] = v
        out["gamma"] = str(self.gamma)
        out["placement_feasible"] = self.placement_feasible
        return out


def _oriented(length: float, n_points: int, force: float, law: InteractionLaw) -> SegmentSolution:
    # a negative force is a positive one seen in the reverse direction
    return solve_exact(SegmentProblem(length, n_points, abs(force), law))


def _check_glue_inputs(M1, M2, F1, F2, N1, N2):
    if not (F1 > 0 > F2):
        raise ValueError("glue_probe needs F1 > 0 > F2")
    if F1 * N1 + F2 * N2 != 0:
        raise PartitionImbalanceError(f"F1*N1 + F2*N2 = {F1 * N1 + F2 * N2} != 0")
    if M1 / M2 != Fraction(N1, N2):
        raise CommensurabilityError(f"M1/M2 = {M1 / M2} differs from N1/N2 = {Fraction(N1, N2)}")


def glue_probe(M1, M2, F1, F2, N1: int, N2: int, law: InteractionLaw) -> GlueReport:
    M1, M2, F1, F2 = (as_fraction(v) for v in (M1, M2, F1, F2))
    N1, N2 = check_count(N1, 1, "N1"), check_count(N2, 1, "N2")
    _check_glue_inputs(M1, M2, F1, F2, N1, N2)
    L = float(M1 + M2)
    m1f, m2f, f1, f2 = float(M1), float(M2), float(F1), float(F2)
    a = law.a

    def segments(m):
        s1 = _oriented(m1f + m[0], N1 + 2, f1, law)
        s2 = _oriented(m2f + m[1], N2 + 2, f2, law)
        return s1, s2

    def constraints(m):
        s1, s2 = segments(m)
        return np.array([
            s1.first_gap - s2.first_gap,
            s1.last_gap - s2.last_gap,
            m1f + m[0] + m2f + m[1] - s1.first_gap - s1.last_gap - L,
        ]) / L

    x0 = np.full(2, L / (N1 + N2))
    fit = least_squares(constraints, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    m1, m2 = (float(v) for v in fit.x)
    r = constraints(fit.x) * L
    s1, s2 = segments(fit.x)
    u = np.concatenate([s1.gaps, s2.gaps[-2:0:-1]])

    # shifts b with x_N = L - b that keep x_1 > 0, x_N <= L and x_{N1} <= M1 < x_{N1+1}
    window = (max(0.0, m1 - s1.last_gap), min(s1.first_gap, m1))

    M1_hat = m1f + m1

    def M2_hat(m):
        return (M1_hat + m) * (N2 + 1) / (N1 + 1)

    def exact_eq(which):
        g1 = s1.first_gap if which == 0 else s1.last_gap

        def g(m):
            s = _oriented(M2_hat(m), N2 + 2, f2, law)
            return g1 - (s.first_gap if which == 0 else s.last_gap)

        return _root(g, -0.5 * M1_hat, M1_hat)

    d1_hat = perturbative_deltas(SegmentProblem(M1_hat, N1 + 2, f1, law))

    def twoterm_eq(which):
        def g(m):
            d2 = perturbative_deltas(SegmentProblem(M2_hat(m), N2 + 2, abs(f2), law))
            return M1_hat * (d1_hat[which] - d2[which]) / (1 + d2[which]) - m

        return _root(g, -0.5 * M1_hat, M1_hat)

    ratio = N1 / (N1 + 1)
    c1 = -f1 / 2 * ratio * (M1_hat * ratio) ** (a - 1)
    c4 = -f1 / (2 * a) * ratio ** a * M1_hat ** a
    d1 = -f1 / 2 * m1f ** (a - 1)
    d4 = -f1 / (2 * a) * m1f ** a

    return GlueReport(
        M1=M1, M2=M2, F1=F1, F2=F2, N1=N1, N2=N2, a=a,
        m1=m1, m2=m2,
        infeasibility=float(np.linalg.norm(r)),
        constraint_residuals=tuple(float(v) for v in r),
        m_A=exact_eq(0), m_B=exact_eq(1),
        m_A_twoterm=twoterm_eq(0), m_B_twoterm=twoterm_eq(1),
        compatibility=(2 * m1f / a, 2 * m2f / a),
        c1=c1, c4=c4, d1=d1, d4=d4,
        placement_window=window,
        circle_gaps=u,
    )


def _root(g, lo, hi) -> float:
    try:
        return float(brentq(g, lo, hi, xtol=1e-300, rtol=8 * np.finfo(float).eps, maxiter=500))
    except ValueError:
        return float("nan")


def _pinned(length: float, n_points: int, force: float, law: InteractionLaw) -> np.ndarray:
    """Clockwise gaps of a pinned segment; negative force flips the orientation."""
    sol = solve_exact(SegmentProblem(length, n_points, abs(force), law))
    return sol.gaps if force >= 0 else sol.gaps[::-1]


def repair_gap_points(L, M, F1, F2, N1: int, N2: int, law: InteractionLaw) -> tuple[PiecewiseForce, Configuration]:
    """Equilibrium with particles pinned at M and L, balanced by overriding F there.

    N1 counts the particles in (0, M] (the one at M included), N2 those in
    (M, L] (the one at L included).
    """
    L, M, F1, F2 = (as_fraction(v) for v in (L, M, F1, F2))
    N1, N2 = check_count(N1, 2, "N1"), check_count(N2, 2, "N2")
    if not 0 < M < L:
        raise ValueError("need 0 < M < L")
    g1 = _pinned(float(M), N1 + 1, float(F1), law)
    g2 = _pinned(float(L - M), N2 + 1, float(F2), law)
    x1 = np.cumsum(g1)
    x2 = float(M) + np.cumsum(g2)
    x1[-1], x2[-1] = float(M), float(L)
    x = np.concatenate([x1, x2])

    f = law.force
    at_M = f(g2[0]) - f(g1[-1])
    at_L = f(g1[0]) - f(g2[-1])
    field_ = PiecewiseForce.two_piece(L, M, F1, F2, overrides={M: Fraction(float(at_M)), L: Fraction(float(at_L))})
    return field_, Configuration(RingGeometry(float(L)), x)
