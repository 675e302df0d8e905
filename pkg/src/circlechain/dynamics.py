"""Damped Newtonian relaxation of the chain, and its overdamped limit.

Second-order runs use a kick-drift-kick splitting with the damping applied
as an exact exponential factor on half steps; with zero damping this is
velocity Verlet. Particles keep their indices for the whole run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import CirculationError, OrderingError
from .model import Configuration, InteractionLaw, PiecewiseForce, RingGeometry, energy_values, residual_values
from .report import SolveReport, Status
from .segment import SegmentProblem
from .validation import wrap


class Mode(str, enum.Enum):
    SECOND_ORDER = "second_order"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class DynamicsParams:
    mass: float = 1.0
    damping: float | None = None
    dt: float | None = None
    t_max: float = np.inf
    max_steps: int = 200_000
    residual_tol: float = 1e-10
    velocity_tol: float | None = None
    mode: Mode = Mode.SECOND_ORDER
    min_dt: float = 1e-14
    sample_every: int = 100

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.damping is not None and self.damping < 0:
            raise ValueError("damping must be nonnegative")


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    velocities: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    def append(self, t, x, v, rn, e):
        self.times.append(t)
        self.positions.append(x.copy())
        self.velocities.append(v.copy())
        self.residual_norms.append(rn)
        self.energies.append(e)

    def as_arrays(self) -> dict:
        return {k: np.array(getattr(self, k)) for k in ("times", "positions", "velocities", "residual_norms", "energies")}


def default_damping(gaps: np.ndarray, law: InteractionLaw, mass: float = 1.0) -> float:
    """Critical-damping estimate 2*sqrt(mass * max |f'(gap)|)."""
    return 2.0 * np.sqrt(mass * np.max(np.abs(law.slope(gaps))))


def default_dt(L: float, N: int, law: InteractionLaw, mass: float = 1.0) -> float:
    return 0.1 * np.sqrt(mass * (L / N) ** (law.a + 2))


class _System:
    """Force, gap and energy callbacks for the ring or a pinned segment."""

    def __init__(self, force, gaps, energy):
        self.force, self.gaps, self.energy = force, gaps, energy


def _ring(L, field_, law):
    try:
        field_.potential(np.array([float(field_.L)]))
        has_energy = True
    except CirculationError:
        has_energy = False

    def gaps(x):
        return np.append(np.diff(x), x[0] + L - x[-1])

    def energy(x):
        return energy_values(x, L, field_, law) if has_energy else np.nan

    return _System(lambda x: residual_values(x, L, field_, law), gaps, energy)


def _segment(problem: SegmentProblem):
    law, F, Ls = problem.law, problem.force, problem.length

    def full(x):
        return np.concatenate([[0.0], x, [Ls]])

    def gaps(x):
        return np.diff(full(x))

    def force(x):
        fd = law.force(gaps(x))
        return fd[:-1] + F - fd[1:]

    def energy(x):
        return float(np.sum(law.potential(gaps(x))) - F * np.sum(x))

    return _System(force, gaps, energy)


def _integrate(x0, system: _System, params: DynamicsParams, law: InteractionLaw):
    p = params
    x = np.array(x0, dtype=float)
    v = np.zeros_like(x)
    g0 = system.gaps(x)
    A = default_damping(g0, law, p.mass) if p.damping is None else p.damping
    dt = default_dt(float(np.sum(g0)), x.size, law, p.mass) if p.dt is None else p.dt
    if p.velocity_tol is not None:
        vtol = p.velocity_tol
    else:
        # velocity scale force / (mass * omega) of the stiffest pair at the start
        v_scale = float(np.max(law.force(g0))) / (2.0 * np.sqrt(p.mass * float(np.max(np.abs(law.slope(g0))))))
        vtol = p.residual_tol * v_scale

    traj = Trajectory()
    acc = system.force(x)
    t = 0.0
    status = Status.MAX_TIME
    steps = 0
    overdamped = p.mode is Mode.OVERDAMPED

    def rel_res(force, gaps):
        return float(np.max(np.abs(force)) / np.max(law.force(gaps)))

    while True:
        gaps = system.gaps(x)
        rel = rel_res(acc, gaps)
        vel = float(np.max(np.abs(acc if overdamped else v)))
        if steps % p.sample_every == 0:
            kinetic = 0.0 if overdamped else 0.5 * p.mass * float(v @ v)
            traj.append(t, x, v, rel, system.energy(x) + kinetic)
        if rel <= p.residual_tol and (overdamped or vel <= vtol):
            status = Status.CONVERGED
            break
        if steps >= p.max_steps or t >= p.t_max:
            break

        stiff = float(np.max(np.abs(law.slope(gaps))))
        if overdamped:
            # explicit Euler stability for the stiffest pair
            h = min(dt, 0.5 / stiff)
        else:
            # keep the stiffest local oscillation resolved when gaps close up
            h = min(dt, 0.2 / np.sqrt(4.0 * stiff / p.mass))
        while True:
            if overdamped:
                x_new = x + h * acc
                v_new = acc
            else:
                decay = np.exp(-0.5 * A * h / p.mass)
                v_half = v * decay + 0.5 * h * acc / p.mass
                x_new = x + h * v_half
            new_gaps = system.gaps(x_new)
            if np.all(new_gaps > 0.25 * gaps):
                break
            h *= 0.5
            if h < p.min_dt:
                status = Status.DIVERGED
                break
        if status is Status.DIVERGED:
            break
        if not np.all(new_gaps > 0):
            raise OrderingError("accepted step reordered particles")
        acc_new = system.force(x_new)
        if not overdamped:
            v_new = (v_half + 0.5 * h * acc_new / p.mass) * np.exp(-0.5 * A * h / p.mass)
        x, v, acc = x_new, v_new, acc_new
        t += h
        steps += 1

    if steps % p.sample_every:
        kinetic = 0.0 if overdamped else 0.5 * p.mass * float(v @ v)
        traj.append(t, x, v, rel_res(acc, system.gaps(x)), system.energy(x) + kinetic)
    return x, acc, status, steps, A, dt, traj


def relax(init: Configuration, field: PiecewiseForce, law: InteractionLaw, params: DynamicsParams | None = None, **kw):
    """Integrate from rest until residual and velocity both settle."""
    params = params or DynamicsParams(**kw)
    L = init.L
    system = _ring(L, field, law)
    x, acc, status, steps, A, dt, traj = _integrate(init.positions, system, params, law)
    gaps = system.gaps(x)
    norm = float(np.max(np.abs(acc)))
    y = wrap(x, L)
    y = np.roll(y, -int(np.argmin(y)))
    config = Configuration(RingGeometry(L), y)
    counts = np.bincount(field.piece_index(y), minlength=field.n_pieces)
    report = SolveReport(
        status=status,
        config=config,
        residual_norm=norm,
        relative_residual=norm / float(np.max(law.force(gaps))),
        iterations=steps,
        gauge="none (free rotation)",
        partition=tuple(int(c) for c in counts),
        history=np.array(traj.residual_norms),
        extra={"damping": A, "dt": dt, "time": traj.times[-1], "mode": params.mode.value},
    )
    return report, traj


def relax_segment(problem: SegmentProblem, params: DynamicsParams | None = None, init=None, **kw):
    """Relax the interior particles of a pinned chain; returns (gaps, status, trajectory)."""
    params = params or DynamicsParams(**kw)
    if init is None:
        init = np.linspace(0.0, problem.length, problem.n_points)[1:-1]
    system = _segment(problem)
    x, acc, status, steps, A, dt, traj = _integrate(np.asarray(init, dtype=float), system, params, problem.law)
    return system.gaps(x), status, traj


def slow_mode_params(gap: float, n: int, law: InteractionLaw, mass: float = 1.0, ring: bool = False, **kw) -> DynamicsParams:
    """Parameters tuned for fast settling of a chain with mean gap ``gap``.

    ``n`` counts the moving particles. Damping is critical for the softest
    mode (pinned chain, or ring when ``ring`` is set) and the step resolves
    the stiffest one; both come from the pair stiffness |f'(gap)|.
    """
    k = float(abs(law.slope(gap)))
    w_max = 2.0 * np.sqrt(k / mass)
    w_min = w_max * (np.sin(np.pi / n) if ring else np.sin(np.pi / (2 * (n + 1))))
    return DynamicsParams(mass=mass, damping=2.0 * mass * w_min, dt=0.5 / w_max, **kw)
