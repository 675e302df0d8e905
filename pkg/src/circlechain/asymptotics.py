"""N-sweeps of the gap deviation from L/N and the fine-scale deviation profile."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circle import SymmetricSpec, construct_symmetric, solve_overlap
from .exceptions import NotConstructibleError, NotEquilibriumError
from .existence import Verdict, verdict
from .model import Configuration, InteractionLaw, PiecewiseForce, residual
from .segment import perturbative_deltas
from .validation import as_fraction

EQUILIBRIUM_TOL = 1e-8
FIT_SKIP = 2


@dataclass(frozen=True)
class SweepRow:
    N: int
    D: float
    D2: float
    predicted: float
    slope_so_far: float = float("nan")
    config: Configuration | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.D < 0:
            raise ValueError("deviation must be nonnegative")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    slope: float
    intercept: float

    @property
    def Ns(self) -> np.ndarray:
        return np.array([r.N for r in self.rows])

    @property
    def D(self) -> np.ndarray:
        return np.array([r.D for r in self.rows])

    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.D) < 0))


def gap_deviation(config: Configuration) -> np.ndarray:
    """Relative deviations N * gap / L - 1, one per gap."""
    return config.N * config.gaps() / config.L - 1.0


def _predicted(spec: SymmetricSpec) -> float:
    if spec.F == 0:
        return 0.0
    glue = solve_overlap(spec)
    problem = glue.segment.problem
    d1, dl = perturbative_deltas(problem)
    scale = problem.mean_gap * spec.N / float(spec.L)
    return float(max(abs((1 + d1) * scale - 1), abs((1 + dl) * scale - 1)))


def _row(L, F, N: int, law: InteractionLaw) -> SweepRow:
    Lf, Ff = float(L), float(F)
    if as_fraction(F) == 0:
        config = Configuration.equidistant(Lf, N)
        pred = 0.0
    else:
        v = verdict(L, as_fraction(L) / 2, F, -as_fraction(F), N, law)
        if v.kind is not Verdict.CONSTRUCTIBLE_SYMMETRIC:
            raise NotConstructibleError(f"N = {N}: verdict {v.kind.value}, no symmetric equilibrium to sweep")
        spec = SymmetricSpec(Lf, Ff, N, law)
        config = construct_symmetric(spec)
        pred = _predicted(spec)
    dev = gap_deviation(config)
    return SweepRow(N=N, D=float(np.max(np.abs(dev))), D2=float(np.linalg.norm(dev)), predicted=pred, config=config)


def fit_slope(Ns, D, skip: int = FIT_SKIP) -> tuple[float, float]:
    """Least-squares slope and intercept of log D against log N, dropping the ``skip`` smallest N."""
    Ns, D = np.asarray(Ns, dtype=float), np.asarray(D, dtype=float)
    keep = np.argsort(Ns)[skip:]
    keep = keep[D[keep] > 0]
    if keep.size < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(np.log(Ns[keep]), np.log(D[keep]), 1)
    return float(slope), float(intercept)


def uniformity_sweep(L, F, Ns, law: InteractionLaw, threads: int = 1) -> SweepResult:
    """Symmetric family +F on (0, L/2], -F on (L/2, L] over the particle counts ``Ns``."""
    Ns = sorted(int(n) for n in Ns)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(lambda n: _row(L, F, n, law), Ns))
    else:
        rows = [_row(L, F, n, law) for n in Ns]
    out = []
    for i, r in enumerate(rows):
        s, _ = fit_slope([x.N for x in rows[: i + 1]], [x.D for x in rows[: i + 1]])
        out.append(SweepRow(r.N, r.D, r.D2, r.predicted, s, r.config))
    slope, intercept = fit_slope(Ns, [r.D for r in rows])
    return SweepResult(tuple(out), slope, intercept)


@dataclass(frozen=True)
class FineScaleProfile:
    deltas: np.ndarray
    predicted: np.ndarray
    max_abs: float
    scale: float

    @property
    def ratio(self) -> float:
        """max |delta| measured in units of N^-(a-1)."""
        return self.max_abs / self.scale


def linear_profile(config: Configuration, field: PiecewiseForce, law: InteractionLaw) -> np.ndarray:
    """First-order gap deviations implied by the balance equations.

    Linearizing f(gap_k) = f(gap_{k-1}) + F(x_k) about L/N gives
    delta_k = delta_{k-1} - F(x_k) (L/N)^a / a; the constant is fixed by the
    deviations summing to zero.
    """
    g = config.L / config.N
    Fx = field(config.positions)
    # gap k follows particle k; its balance involves particles 1..k
    steps = np.concatenate([[0.0], np.cumsum(Fx[1:])])
    d = -steps * g ** law.a / law.a
    return d - d.mean()


def fine_scale_report(config: Configuration, field: PiecewiseForce, law: InteractionLaw) -> FineScaleProfile:
    res = residual(config, field, law)
    if res.relative_norm > EQUILIBRIUM_TOL:
        raise NotEquilibriumError(f"relative residual {res.relative_norm:.3e} exceeds {EQUILIBRIUM_TOL:g}")
    deltas = gap_deviation(config)
    return FineScaleProfile(
        deltas=deltas,
        predicted=linear_profile(config, field, law),
        max_abs=float(np.max(np.abs(deltas))),
        scale=float(config.N) ** (1.0 - law.a),
    )
