from fractions import Fraction

import numpy as np
import pytest

from circlechain.circle import (
    SymmetricSpec,
    _overlap_segment,
    construct_symmetric,
    construct_two_piece,
    glue_probe,
    repair_gap_points,
    solve_overlap,
    symmetric_circle_gaps,
)
from circlechain.exceptions import (
    CommensurabilityError,
    InfeasibleTargetError,
    ParityError,
    PartitionImbalanceError,
)
from circlechain.model import InteractionLaw, PiecewiseForce, residual, to_gaps
from circlechain.newton import solve
from circlechain.segment import interior_residual

LAW2 = InteractionLaw(2)


def spec(N=8, F=0.2, a=2, target=None):
    return SymmetricSpec(1.0, F, N, InteractionLaw(a), target)


def test_symmetric_example():
    s = spec()
    c = construct_symmetric(s)
    res = residual(c, s.field(), s.law)
    assert res.relative_norm < 1e-10
    assert np.sum(c.positions <= 0.5) == 4
    g = c.gaps()
    for k in range(1, 4):
        assert abs(g[k - 1] - g[8 - k - 1]) < 1e-12


def test_symmetric_newton_refinement_is_still():
    s = spec()
    c = construct_symmetric(s)
    rep = solve(c, s.field(), s.law)
    assert rep.converged
    assert np.max(np.abs(rep.config.positions - c.positions)) < 1e-9


def test_odd_count_is_parity_error():
    with pytest.raises(ParityError):
        spec(N=7)


def test_target_lands_exactly():
    c = construct_symmetric(spec(target=0.37))
    assert 0.37 in c.positions


def test_target_shift_keeps_gaps():
    base = construct_symmetric(spec(N=16))
    for t in [0.05, 0.2, 0.37, 0.61, 0.93]:
        c = construct_symmetric(spec(N=16, target=t))
        g0, g1 = base.gaps(), c.gaps()
        matched = min(np.max(np.abs(np.roll(g1, s) - g0)) for s in range(16))
        assert matched < 1e-12
        again = construct_symmetric(spec(N=16, target=t))
        np.testing.assert_allclose(again.positions, c.positions, atol=1e-12)


def test_unreachable_target_is_reported():
    with pytest.raises(InfeasibleTargetError):
        construct_symmetric(spec(N=4, F=50, target=1.0))


def test_glue_parameters():
    s = spec(N=12)
    glue = solve_overlap(s)
    assert abs(glue.length_defect) < 1e-12
    assert glue.feasible()
    d = glue.segment.gaps
    assert d[0] == d.max()


def test_overlap_gaps_monotone_in_m():
    s = spec(N=10)
    ms = np.linspace(0.02, 0.2, 10)
    gaps = [_overlap_segment(s, m).gaps for m in ms]
    for lo, hi in zip(gaps, gaps[1:]):
        assert np.all(hi > lo)


def test_sub_blocks_are_segment_equilibria():
    s = spec(N=16)
    c = construct_symmetric(s)
    x = c.positions
    law = s.law
    scale = np.max(law.force(c.gaps()))
    for i in range(16):
        for j in range(i + 3, 17):
            block = x[i:j]
            F = s.F if block[-2] <= 0.5 else -s.F if block[1] > 0.5 else None
            if F is None:
                continue
            res = interior_residual(block, F, law)
            assert np.max(np.abs(res)) < 1e-10 * scale


def test_symmetric_glue_probe_matches_constructor():
    rep = glue_probe(Fraction(1, 2), Fraction(1, 2), 1, -1, 6, 6, LAW2)
    assert rep.infeasibility < 1e-10
    c = construct_symmetric(SymmetricSpec(1.0, 1.0, 12, LAW2))
    g = c.gaps()
    u = rep.circle_gaps
    # the glued chain lists N1+1 segment gaps and N2-1 reversed ones: N+1 entries around a circle of N gaps
    inner = u[1:-1]
    best = min(np.max(np.abs(np.roll(g, s)[: inner.size] - inner)) for s in range(12))
    assert best < 1e-9


def test_glue_probe_preconditions():
    with pytest.raises(PartitionImbalanceError):
        glue_probe(Fraction(1, 2), Fraction(1, 2), 1, -1, 6, 5, LAW2)
    with pytest.raises(CommensurabilityError):
        glue_probe(Fraction(1, 3), Fraction(2, 3), 1, -1, 6, 6, LAW2)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_asymmetric_family_glues_at_finite_size(n):
    # unequal arc counts still glue here: the probe residual vanishes and the
    # unique two-piece gap vector fits its arcs
    rep = glue_probe(Fraction(2, 3), Fraction(1, 3), 1, -2, 2 * n, n, LAW2)
    assert rep.gamma == 2
    assert rep.compatibility == pytest.approx((2 / 3, 1 / 3))
    assert rep.infeasibility < 1e-10
    assert rep.placement_feasible
    c = construct_two_piece(1, Fraction(2, 3), 1, -2, 2 * n, n, LAW2)
    field = PiecewiseForce.two_piece(1, Fraction(2, 3), 1, -2)
    assert residual(c, field, LAW2).relative_norm < 1e-10


def test_repair_example():
    field, c = repair_gap_points(1, Fraction(3, 5), 1, Fraction(-3, 2), 6, 4, LAW2)
    res = residual(c, field, LAW2)
    assert res.relative_norm < 1e-10
    bare = residual(c, field.without_overrides(), LAW2)
    assert bare.norm > 1e-3 * np.max(LAW2.force(c.gaps()))


def test_repair_symmetric_overrides_match():
    field, c = repair_gap_points(1, Fraction(1, 2), 1, -1, 5, 5, LAW2)
    v = list(field.overrides.values())
    assert abs(float(v[0]) - float(v[1])) < 1e-12 * max(abs(float(v[0])), 1)
    assert residual(c, field, LAW2).relative_norm < 1e-10


def test_two_piece_constructor():
    c = construct_two_piece(1, Fraction(1, 2), 1, -1, 4, 4, LAW2)
    field = PiecewiseForce.two_piece(1, Fraction(1, 2), 1, -1)
    assert residual(c, field, LAW2).relative_norm < 1e-10
    g = to_gaps(c).gaps
    np.testing.assert_allclose(np.sort(g), np.sort(symmetric_circle_gaps(solve_overlap(spec(N=8, F=1))) / 1.0), atol=1e-12)
