from fractions import Fraction

import numpy as np

from circlechain.circle import SymmetricSpec, construct_symmetric, two_piece_gaps
from circlechain.model import Configuration, InteractionLaw, PiecewiseForce, RingGeometry, residual_values
from circlechain.newton import NewtonOptions, dense_jacobian, multistart, random_ordered, solve
from circlechain.report import Status

LAW2 = InteractionLaw(2)


def align(g, ref):
    return min(float(np.max(np.abs(np.roll(g, s) - ref))) for s in range(g.size))


def partitioned_start(rng, L, M, N1, N2):
    """Random ordered positions with N1 particles in (0, M] and N2 in (M, L]."""
    M = float(M)
    pad1, pad2 = 0.05 * M / N1, 0.05 * (L - M) / N2
    x1 = np.sort(rng.uniform(pad1, M - pad1, N1))
    x2 = np.sort(rng.uniform(M + pad2, L - pad2, N2))
    return Configuration(RingGeometry(L), np.concatenate([x1, x2]))


def test_equidistant_is_already_a_root():
    rep = solve(Configuration.equidistant(1, 8), PiecewiseForce.constant(1), LAW2)
    assert rep.status is Status.CONVERGED
    assert rep.iterations == 0
    assert rep.residual_norm == 0.0


def test_perturbed_symmetric_returns_to_constructor():
    s = SymmetricSpec(1.0, 0.2, 16, LAW2)
    c = construct_symmetric(s)
    rng = np.random.default_rng(0)
    x = c.positions + rng.uniform(-0.1, 0.1, 16) * np.min(c.gaps()) / 2
    rep = solve(Configuration(c.geometry, x), s.field(), LAW2)
    assert rep.converged
    assert align(rep.config.gaps(), c.gaps()) < 1e-9
    # symmetric equilibria form a one-parameter family, so match gaps rather than positions
    assert rep.partition == (8, 8)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    field = PiecewiseForce.constant(1)
    for a in (1.5, 2.0, 3.0):
        law = InteractionLaw(a)
        for _ in range(10):
            x = random_ordered(1.0, 9, rng).positions.copy()
            J = dense_jacobian(x, 1.0, law)
            h = 1e-7 * np.min(np.diff(x))
            fd = np.empty_like(J)
            for k in range(x.size):
                xp, xm = x.copy(), x.copy()
                xp[k] += h
                xm[k] -= h
                fd[:, k] = (residual_values(xp, 1.0, field, law) - residual_values(xm, 1.0, field, law)) / (2 * h)
            assert np.max(np.abs(fd - J)) <= 1e-6 * np.max(np.abs(J))


def test_jacobian_null_direction_is_rotation():
    x = random_ordered(1.0, 7, np.random.default_rng(1)).positions
    J = dense_jacobian(x, 1.0, LAW2)
    assert np.max(np.abs(J @ np.ones(7))) < 1e-9 * np.max(np.abs(J))


def test_gauge_choice_gives_same_equilibrium():
    s = SymmetricSpec(1.0, 0.2, 8, LAW2)
    init = random_ordered(1.0, 8, np.random.default_rng(4))
    r1 = solve(init, s.field(), LAW2, NewtonOptions(pin=0, max_iter=1000))
    r2 = solve(init, s.field(), LAW2, NewtonOptions(pin=1, max_iter=1000))
    if r1.converged and r2.converged:
        assert align(r1.config.gaps(), r2.config.gaps()) < 1e-10
    field0 = PiecewiseForce.constant(1)
    r1 = solve(init, field0, LAW2, NewtonOptions(pin=0))
    r2 = solve(init, field0, LAW2, NewtonOptions(pin=1))
    assert r1.converged and r2.converged
    assert align(r1.config.gaps(), r2.config.gaps()) < 1e-10


def test_late_steps_decrease_fast():
    s = SymmetricSpec(1.0, 0.2, 16, LAW2)
    c = construct_symmetric(s)
    x = c.positions + np.random.default_rng(2).uniform(-1, 1, 16) * 0.02 * np.min(c.gaps())
    rep = solve(Configuration(c.geometry, x), s.field(), LAW2)
    h = rep.history
    assert rep.converged and h.size >= 3
    tail = h[-3:]
    assert tail[1] <= tail[0] / 10 and tail[2] <= tail[1] / 10


def test_report_gauge_and_status_contract():
    rep = solve(Configuration.equidistant(1, 5), PiecewiseForce.constant(1), LAW2, NewtonOptions(pin=3))
    assert rep.gauge == "pinned x_4"
    d = rep.to_dict()
    assert d["status"] == "Converged"


def test_multistart_is_seeded():
    field = PiecewiseForce.constant(1)
    a = [r.config.positions for r in multistart(field, LAW2, 6, 3, seed=9)]
    b = [r.config.positions for r in multistart(field, LAW2, 6, 3, seed=9)]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_no_root_when_circulation_fails():
    # F1*N1 + F2*N2 = 0 holds but the unique gap vector cannot be placed
    field = PiecewiseForce.two_piece(1, Fraction(1, 2), 1, -3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        rep = solve(partitioned_start(rng, 1.0, 0.5, 6, 2), field, LAW2)
        assert not rep.converged
        assert rep.status in (Status.CROSSED_BREAKPOINT, Status.STALLED, Status.ORDERING_VIOLATED, Status.MAX_ITERATIONS)


def test_asymmetric_instance_only_converges_to_the_glued_gaps():
    M = Fraction(2, 3)
    field = PiecewiseForce.two_piece(1, M, 1, -2)
    ref = two_piece_gaps(1, 1, -2, 6, 3, LAW2)
    rng = np.random.default_rng(0)
    outcomes = []
    for _ in range(50):
        rep = solve(partitioned_start(rng, 1.0, M, 6, 3), field, LAW2)
        outcomes.append(rep.status)
        if rep.converged:
            assert rep.partition == (6, 3)
            assert align(rep.config.gaps(), ref) < 1e-9
    assert Status.ORDERING_VIOLATED not in outcomes
