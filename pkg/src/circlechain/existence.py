"""Exact-arithmetic existence oracle for two-piece fields.

Balance of the total external force gives F1*N1 + F2*N2 = 0 for every N, so
at most one partition can carry an equilibrium. For that partition the gap
vector is unique; whether it fits the arcs is decided by the placement window
of :func:`circlechain.circle.placement_window`. The asymptotic obstructions
(zero circulation, M1/M2 = N1/N2, gamma != 1) are reported alongside.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .circle import GlueReport, glue_probe, placement_window, two_piece_gaps
from .model import InteractionLaw, PiecewiseForce
from .validation import as_fraction, check_count

#: placement windows narrower than this (relative to L) are not trusted either way
WINDOW_TOL = 1e-12


class Verdict(str, enum.Enum):
    CONSTRUCTIBLE_SYMMETRIC = "ConstructibleSymmetric"
    CONSTRUCTIBLE_GLUED = "ConstructibleGlued"
    REPAIRABLE_ONLY = "RepairableOnly"
    IMPOSSIBLE_PARITY = "ImpossibleParity"
    IMPOSSIBLE_CIRCULATION = "ImpossibleCirculation"
    IMPOSSIBLE_NO_PARTITION = "ImpossibleNoPartition"
    IMPOSSIBLE_ASYMMETRIC = "ImpossibleAsymmetric"
    INCONCLUSIVE = "Inconclusive"

    @property
    def impossible(self) -> bool:
        return self.value.startswith("Impossible")

    @property
    def constructible(self) -> bool:
        return self.value.startswith("Constructible")


@dataclass(frozen=True)
class ExistenceVerdict:
    kind: Verdict
    circulation: Fraction
    partition: tuple[int, int] | None = None
    gamma: Fraction | None = None
    failed: tuple[str, ...] = ()
    asymptotic_regime: bool = False
    window: tuple[float, float] | None = None
    glue: GlueReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "circulation": str(self.circulation),
            "partition": list(self.partition) if self.partition else None,
            "gamma": None if self.gamma is None else str(self.gamma),
            "failed": list(self.failed),
            "asymptotic_regime": self.asymptotic_regime,
            "window": None if self.window is None else list(self.window),
            "glue": None if self.glue is None else self.glue.to_dict(),
        }


def circulation(field: PiecewiseForce) -> Fraction:
    return field.circulation()


def unique_partition(F1, F2, N: int) -> tuple[int, int] | None:
    """Positive integers N1 + N2 = N with F1*N1 + F2*N2 = 0, if any."""
    F1, F2 = as_fraction(F1), as_fraction(F2)
    N = check_count(N, 1)
    if F1 == F2 or (F1 > 0) == (F2 > 0) or F1 == 0 or F2 == 0:
        return None
    n1 = -F2 * N / (F1 - F2)
    if n1.denominator != 1 or not 0 < n1 < N:
        return None
    return int(n1), N - int(n1)


def verdict(L, M, F1, F2, N: int, law: InteractionLaw, certify: bool = False, allow_repair: bool = False) -> ExistenceVerdict:
    """Decide existence of an equilibrium for F1 on (0, M], F2 on (M, L] with N particles.

    ``certify`` attaches a gluing report when the partition satisfies the
    commensurability prefilter. ``allow_repair`` turns impossible verdicts
    into RepairableOnly, since overriding F at M and L always balances a
    chain with particles pinned there.
    """
    L, M, F1, F2 = (as_fraction(v) for v in (L, M, F1, F2))
    N = check_count(N, 2)
    if not 0 < M < L:
        raise ValueError("need 0 < M < L")
    M1, M2 = M, L - M
    circ = F1 * M1 + F2 * M2
    part = unique_partition(F1, F2, N)

    if part is None:
        kind = Verdict.IMPOSSIBLE_PARITY if F1 == -F2 and N % 2 else Verdict.IMPOSSIBLE_NO_PARTITION
        return _finish(ExistenceVerdict(kind, circ, failed=("force_balance",)), allow_repair)

    N1, N2 = part
    gamma = Fraction(N1, N2)
    failed = []
    if circ != 0:
        failed.append("circulation")
    if not (M1 / M2 == -F2 / F1 == gamma):
        failed.append("commensurability")
    if gamma != 1:
        failed.append("gamma")

    gaps = two_piece_gaps(L, F1, F2, N1, N2, law)
    lo, hi = placement_window(L, M, gaps, N1)
    glue = None
    if certify and "commensurability" not in failed and F1 > 0 > F2:
        glue = glue_probe(M1, M2, F1, F2, N1, N2, law)
    base = dict(circulation=circ, partition=part, gamma=gamma, failed=tuple(failed), window=(lo, hi), glue=glue)

    if abs(hi - lo) <= WINDOW_TOL * float(L):
        return ExistenceVerdict(Verdict.INCONCLUSIVE, **base)
    if lo < hi:
        symmetric = gamma == 1 and M1 == M2
        kind = Verdict.CONSTRUCTIBLE_SYMMETRIC if symmetric else Verdict.CONSTRUCTIBLE_GLUED
        return ExistenceVerdict(kind, **base)
    if circ != 0:
        kind = Verdict.IMPOSSIBLE_CIRCULATION
    elif gamma != 1:
        kind = Verdict.IMPOSSIBLE_ASYMMETRIC
    else:
        kind = Verdict.INCONCLUSIVE
    return _finish(ExistenceVerdict(kind, asymptotic_regime=gamma != 1, **base), allow_repair)


def _finish(v: ExistenceVerdict, allow_repair: bool) -> ExistenceVerdict:
    if allow_repair and v.kind.impossible:
        return ExistenceVerdict(
            Verdict.REPAIRABLE_ONLY, v.circulation, v.partition, v.gamma,
            v.failed + (v.kind.value,), v.asymptotic_regime, v.window, v.glue,
        )
    return v
