"""scikit-learn style wrappers around the functional core.

Rows of ``X`` are configurations: strictly increasing positions in (0, L].
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import dynamics, newton
from .circle import SymmetricSpec, construct_symmetric
from .model import Configuration, GapVector, InteractionLaw, PiecewiseForce, RingGeometry, from_gaps
from .segment import SegmentProblem, solve_exact
from .validation import check_position_matrix


class GapTransformer(TransformerMixin, BaseEstimator):
    """Positions to clockwise gaps and back."""

    def __init__(self, L: float = 1.0):
        self.L = L

    def fit(self, X, y=None):
        check_position_matrix(X, self.L)
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_position_matrix(X, self.L)
        return np.column_stack([np.diff(X, axis=1), X[:, 0] + self.L - X[:, -1]])

    def inverse_transform(self, G, anchors=None):
        """Rebuild positions; x_1 defaults to the wrap gap, which puts x_N at L."""
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if anchors is None:
            anchors = G[:, -1]
        geo = RingGeometry(float(self.L))
        return np.array([from_gaps(GapVector(geo, float(b), g)).positions for b, g in zip(anchors, G)])


class EquilibriumRelaxer(TransformerMixin, BaseEstimator):
    """Maps initial configurations to nearby equilibria of a fixed field."""

    def __init__(self, field: PiecewiseForce | None = None, a: float = 2.0, method: str = "newton",
                 tol: float = 1e-12, max_iter: int = 200, damping: float | None = None):
        self.field = field
        self.a = a
        self.method = method
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping

    def _field(self):
        return self.field if self.field is not None else PiecewiseForce.constant(1)

    def fit(self, X=None, y=None):
        if self.method not in ("newton", "relax"):
            raise ValueError(f"method must be 'newton' or 'relax', got {self.method!r}")
        self.law_ = InteractionLaw(self.a)
        self.field_ = self._field()
        return self

    def transform(self, X):
        check_is_fitted(self, "law_")
        L = float(self.field_.L)
        X = check_position_matrix(X, L)
        geo = RingGeometry(L)
        self.reports_ = []
        for row in X:
            init = Configuration(geo, row)
            if self.method == "newton":
                rep = newton.solve(init, self.field_, self.law_, tol=self.tol, max_iter=self.max_iter)
            else:
                rep, _ = dynamics.relax(init, self.field_, self.law_, residual_tol=self.tol, damping=self.damping)
            self.reports_.append(rep)
        return np.array([r.config.positions for r in self.reports_])


class SymmetricEquilibrium(BaseEstimator):
    """Equilibrium of the mirror-symmetric two-piece field; ``predict`` pins it through targets."""

    def __init__(self, L: float = 1.0, F: float = 0.2, N: int = 8, a: float = 2.0):
        self.L = L
        self.F = F
        self.N = N
        self.a = a

    def fit(self, X=None, y=None):
        self.spec_ = SymmetricSpec(self.L, self.F, self.N, InteractionLaw(self.a))
        self.positions_ = construct_symmetric(self.spec_).positions
        self.gaps_ = np.append(np.diff(self.positions_), self.positions_[0] + self.L - self.positions_[-1])
        return self

    def predict(self, targets):
        check_is_fitted(self, "spec_")
        rows = []
        for t in np.atleast_1d(np.asarray(targets, dtype=float)):
            spec = SymmetricSpec(self.L, self.F, self.N, self.spec_.law, target=float(t))
            rows.append(construct_symmetric(spec).positions)
        return np.array(rows)


class SegmentEquilibrium(BaseEstimator):
    """Pinned-chain equilibrium on [0, length]."""

    def __init__(self, length: float = 1.0, n_points: int = 10, F: float = 0.1, a: float = 2.0):
        self.length = length
        self.n_points = n_points
        self.F = F
        self.a = a

    def fit(self, X=None, y=None):
        sol = solve_exact(SegmentProblem(self.length, self.n_points, self.F, InteractionLaw(self.a)))
        self.solution_ = sol
        self.gaps_ = sol.gaps
        self.deltas_ = sol.deltas
        self.positions_ = sol.positions
        return self
