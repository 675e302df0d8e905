"""Damped Newton iteration on the cyclic equilibrium system.

The Jacobian of the residual is cyclic tridiagonal and singular along a
uniform rotation. Pinning one particle removes that direction; ordering the
remaining unknowns cyclically from the particle after the pinned one turns
the reduced Jacobian into a plain tridiagonal matrix, solved in O(N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .model import Configuration, InteractionLaw, PiecewiseForce, RingGeometry
from .report import SolveReport, Status
from .validation import wrap


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 200
    pin: int = 0
    step_cap: float = 0.4
    min_step: float = 2.0 ** -40
    crawl_rtol: float = 1e-6
    crawl_patience: int = 8
    seed: int | None = None


def jacobian_bands(x: np.ndarray, L: float, law: InteractionLaw) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(lower, diagonal, upper) of the cyclic Jacobian.

    ``lower[k]`` is d r_k / d x_{k-1} and ``upper[k]`` is d r_k / d x_{k+1}
    (indices modulo N).
    """
    d = np.append(np.diff(x), x[0] + L - x[-1])
    s = law.slope(d)
    s_prev = np.roll(s, 1)
    return -s_prev, s_prev + s, -s


def dense_jacobian(x: np.ndarray, L: float, law: InteractionLaw) -> np.ndarray:
    lower, diag, upper = jacobian_bands(x, L, law)
    n = x.size
    J = np.diag(diag)
    idx = np.arange(n)
    J[idx, (idx - 1) % n] += lower
    J[idx, (idx + 1) % n] += upper
    return J


def _newton_step(x, r, L, law, pin):
    n = x.size
    lower, diag, upper = jacobian_bands(x, L, law)
    order = (pin + 1 + np.arange(n - 1)) % n
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = upper[order[:-1]]
    ab[1] = diag[order]
    ab[2, :-1] = lower[order[1:]]
    dx = np.zeros(n)
    dx[order] = solve_banded((1, 1), ab, -r[order])
    return dx


def solve(init: Configuration, field: PiecewiseForce, law: InteractionLaw, opts: NewtonOptions | None = None, **kw) -> SolveReport:
    opts = opts or NewtonOptions(**kw)
    L = init.L
    n = init.N
    pin = opts.pin % n
    x = init.positions.astype(float).copy()
    pieces = field.piece_index(x)
    # no particle changes arc during a solve, so F(x) is frozen unless overrides
    # make the value at a breakpoint differ from its arc
    Fx = None if field.overrides else field(x)

    def evaluate(y):
        d = np.append(np.diff(y), y[0] + L - y[-1])
        fd = law.force(d)
        r = np.roll(fd, 1) + (field(y) if Fx is None else Fx) - fd
        inf = float(np.max(np.abs(r)))
        # the 2-norm is the line-search merit: Newton steps descend on it
        return r, inf, inf / float(np.max(fd)), float(r @ r)

    r, norm, rel, merit = evaluate(x)
    history = [norm]
    status = Status.MAX_ITERATIONS
    it = 0
    crawl = 0
    while True:
        if rel < opts.tol:
            status = Status.CONVERGED
            break
        if it >= opts.max_iter:
            break
        free = np.delete(np.abs(r), pin)
        if float(np.max(free)) < opts.tol * norm / rel:
            # the reduced system is solved, so the Newton step vanishes while the
            # pinned particle stays out of balance: no root in this partition
            status = Status.STALLED
            break
        it += 1
        dx = _newton_step(x, r, L, law, pin)
        d = np.append(np.diff(x), x[0] + L - x[-1])
        room = opts.step_cap * np.minimum(d, np.roll(d, 1))
        big = np.abs(dx) > room
        t = min(1.0, float(np.min(room[big] / np.abs(dx[big])))) if np.any(big) else 1.0

        # largest steps before a gap closes or a particle leaves its arc;
        # halving past them needs no evaluation
        ahead, behind = field.edge_room(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_cross = np.min(np.where(dx > 0, ahead / dx, np.where(dx < 0, behind / -dx, np.inf)))
            ddx = np.append(np.diff(dx), dx[0] - dx[-1])
            t_order = np.min(np.where(ddx < 0, d / -ddx, np.inf))

        reason = None
        while t >= opts.min_step:
            if t >= t_order:
                reason = Status.ORDERING_VIOLATED
                t *= 0.5
                continue
            if t > t_cross:
                reason = Status.CROSSED_BREAKPOINT
                t *= 0.5
                continue
            y = x + t * dx
            gaps = np.append(np.diff(y), y[0] + L - y[-1])
            if np.any(gaps <= 0):
                reason = Status.ORDERING_VIOLATED
            elif np.any(field.piece_index(y) != pieces):
                reason = Status.CROSSED_BREAKPOINT
            else:
                r_new, norm_new, rel_new, merit_new = evaluate(y)
                if merit_new < merit or rel_new < opts.tol:
                    break
                reason = Status.STALLED
            t *= 0.5
        else:
            status = reason
            break
        # a step cut short by a breakpoint or a closing gap that barely lowers
        # the merit means the root lies outside the current partition
        crawl = crawl + 1 if reason is not None and merit - merit_new < opts.crawl_rtol * merit else 0
        x, r, norm, rel, merit = y, r_new, norm_new, rel_new, merit_new
        history.append(norm)
        if crawl >= opts.crawl_patience and rel >= opts.tol:
            status = reason
            break

    return _report(x, L, field, law, status, norm, rel, it, pin, history)


def _report(x, L, field, law, status, norm, rel, it, pin, history) -> SolveReport:
    y = wrap(x, L)
    # keep particle identities through wrapping; rotate so x_1 is the smallest
    shift = int(np.argmin(y))
    y = np.roll(y, -shift)
    config = Configuration(RingGeometry(L), y)
    counts = np.bincount(field.piece_index(y), minlength=field.n_pieces)
    return SolveReport(
        status=status,
        config=config,
        residual_norm=norm,
        relative_residual=rel,
        iterations=it,
        gauge=f"pinned x_{pin + 1}",
        partition=tuple(int(c) for c in counts),
        history=np.array(history),
    )


def random_ordered(L: float, N: int, rng: np.random.Generator, min_gap_fraction: float = 0.05) -> Configuration:
    """Uniform random ordered configuration with every gap at least a fraction of L/N."""
    # min-gap padding keeps starting points away from the r -> 0 singularity
    w = rng.dirichlet(np.ones(N))
    gaps = L * (min_gap_fraction / N + (1 - min_gap_fraction) * w)
    x = np.sort(wrap(rng.uniform(0, L) + np.concatenate([[0.0], np.cumsum(gaps[:-1])]), L))
    return Configuration(RingGeometry(L), x)


def multistart(field: PiecewiseForce, law: InteractionLaw, N: int, starts: int, seed: int = 0, opts: NewtonOptions | None = None) -> list[SolveReport]:
    rng = np.random.default_rng(seed)
    L = float(field.L)
    return [solve(random_ordered(L, N, rng), field, law, opts) for _ in range(starts)]
