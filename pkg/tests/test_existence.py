from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circlechain.circle import SymmetricSpec, construct_symmetric, construct_two_piece
from circlechain.existence import Verdict, circulation, unique_partition, verdict
from circlechain.model import InteractionLaw, PiecewiseForce, force_sum, residual

LAW2 = InteractionLaw(2)


@pytest.mark.parametrize(
    "M, F1, F2, expected",
    [(Fraction(1, 2), 1, -1, 0), (Fraction(2, 3), 1, -2, 0), (Fraction(1, 2), 1, -3, -1)],
)
def test_circulation_examples(M, F1, F2, expected):
    assert circulation(PiecewiseForce.two_piece(1, M, F1, F2)) == expected


@pytest.mark.parametrize(
    "F1, F2, N, expected",
    [(2, -1, 9, (3, 6)), (1, -1, 7, None), (3, -2, 7, None), (3, -2, 10, (4, 6))],
)
def test_unique_partition_examples(F1, F2, N, expected):
    assert unique_partition(F1, F2, N) == expected


@settings(max_examples=200, deadline=None)
@given(
    p1=st.integers(1, 9), q1=st.integers(1, 9),
    p2=st.integers(1, 9), q2=st.integers(1, 9),
    N=st.integers(2, 60),
)
def test_partition_is_the_only_balanced_split(p1, q1, p2, q2, N):
    F1, F2 = Fraction(p1, q1), -Fraction(p2, q2)
    balanced = [(n1, N - n1) for n1 in range(1, N) if F1 * n1 + F2 * (N - n1) == 0]
    part = unique_partition(F1, F2, N)
    assert len(balanced) <= 1
    assert part == (balanced[0] if balanced else None)


def test_symmetric_verdict_and_construction():
    v = verdict(1, Fraction(1, 2), 1, -1, 10, LAW2)
    assert v.kind is Verdict.CONSTRUCTIBLE_SYMMETRIC
    assert v.partition == (5, 5)
    c = construct_symmetric(SymmetricSpec(1.0, 1.0, 10, LAW2))
    assert residual(c, PiecewiseForce.two_piece(1, Fraction(1, 2), 1, -1), LAW2).relative_norm < 1e-10


def test_parity_verdict():
    v = verdict(1, Fraction(1, 2), 1, -1, 9, LAW2)
    assert v.kind is Verdict.IMPOSSIBLE_PARITY
    assert v.kind.impossible


def test_circulation_verdict():
    v = verdict(1, Fraction(1, 2), 1, -3, 8, LAW2)
    assert v.kind is Verdict.IMPOSSIBLE_CIRCULATION
    assert "circulation" in v.failed


def test_unequal_counts_glue_at_small_size():
    # gamma = 2 here, yet the unique gap vector fits its arcs: an equilibrium exists
    v = verdict(1, Fraction(2, 3), 1, -2, 9, LAW2)
    assert v.partition == (6, 3)
    assert v.gamma == 2
    assert "gamma" in v.failed
    assert v.kind is Verdict.CONSTRUCTIBLE_GLUED
    c = construct_two_piece(1, Fraction(2, 3), 1, -2, 6, 3, LAW2)
    field = PiecewiseForce.two_piece(1, Fraction(2, 3), 1, -2)
    assert residual(c, field, LAW2).relative_norm < 1e-10
    assert force_sum(c, field) == (0.0, (6, 3))


def test_repair_escape_hatch():
    v = verdict(1, Fraction(1, 2), 1, -1, 9, LAW2, allow_repair=True)
    assert v.kind is Verdict.REPAIRABLE_ONLY
    assert "ImpossibleParity" in v.failed


def test_certify_attaches_glue_report():
    v = verdict(1, Fraction(1, 2), 1, -1, 12, LAW2, certify=True)
    assert v.glue is not None and v.glue.infeasibility < 1e-10
    assert v.to_dict()["glue"]["gamma"] == "1"


def test_verdict_is_reproducible():
    a = verdict(1, Fraction(2, 3), 1, -2, 12, LAW2).to_dict()
    b = verdict(Fraction(1), Fraction(2, 3), Fraction(1), Fraction(-2), 12, LAW2).to_dict()
    assert a == b


def test_constructible_verdicts_yield_equilibria():
    for M, F1, F2 in [(Fraction(1, 2), 1, -1), (Fraction(1, 3), 2, -1), (Fraction(3, 4), 1, -3)]:
        field = PiecewiseForce.two_piece(1, M, F1, F2)
        for N in range(2, 13):
            v = verdict(1, M, F1, F2, N, LAW2)
            if v.kind.constructible:
                c = construct_two_piece(1, M, F1, F2, *v.partition, LAW2)
                assert residual(c, field, LAW2).relative_norm < 1e-10
                lo, hi = v.window
                assert lo < hi
