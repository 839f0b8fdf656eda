"""scikit-learn style front end.

Weight grids are treated as data: each row of ``X`` is a pair
``(lambda1, lambda2)`` and ``transform`` maps it to the fidelity pair
``(f1, f2)`` of the corresponding optimal (or best Gaussian) cloner. This
lets sweeps sit inside pipelines, ``GridSearchCV`` over ``cutoff`` and the
rest of the usual tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cloner_models import DEFAULT_CUTOFF, best_gaussian_objective, tradeoff_sweep
from .fock_core import FockOperator
from .spectral import power_iteration

__all__ = [
    "check_weight_grid",
    "check_hermitian_psd",
    "OptimalClonerTradeoff",
    "GaussianClonerTradeoff",
    "DominantEigensolver",
]


def check_weight_grid(X) -> np.ndarray:
    """Validate an ``(n_samples, 2)`` array of nonnegative, non-null weight rows."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"weight grids have 2 columns (lambda1, lambda2), got {X.shape[1]}")
    if np.any(X < 0):
        raise ValueError("weights must be nonnegative")
    if np.any(X.sum(axis=1) == 0):
        raise ValueError("each weight row needs at least one positive entry")
    return X


def check_hermitian_psd(A, tol: float = 1e-10) -> np.ndarray:
    """Return ``A`` as a square array after checking Hermiticity and ``min eig >= -tol``."""
    if isinstance(A, FockOperator):
        A = A.matrix
    A = check_array(A, dtype=None, ensure_2d=True)
    if A.shape[0] != A.shape[1]:
        raise ValueError("operator must be square")
    if np.max(np.abs(A - A.conj().T)) > tol:
        raise ValueError("operator is not Hermitian")
    if np.linalg.eigvalsh(0.5 * (A + A.conj().T))[0] < -tol:
        raise ValueError("operator is not positive semidefinite")
    return A


class OptimalClonerTradeoff(TransformerMixin, BaseEstimator):
    """Map weight rows to optimal single-clone fidelity pairs.

    Parameters
    ----------
    cutoff : int
        Per-mode photon cutoff of the two-mode ancilla space.
    tol : float
        Residual tolerance of the power iteration.
    max_iter : int
        Iteration budget per weight row.
    """

    def __init__(self, cutoff=DEFAULT_CUTOFF, tol=1e-10, max_iter=100_000):
        self.cutoff = cutoff
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_weight_grid(X)
        if int(self.cutoff) < 1:
            raise ValueError("cutoff must be positive")
        self.n_features_in_ = X.shape[1]
        self.points_ = self._solve(X)
        return self

    def _solve(self, X):
        pts = tradeoff_sweep(X, cutoff=int(self.cutoff), tol=self.tol, max_iter=self.max_iter)
        # tradeoff_sweep sorts by f1; restore row order
        lookup = {}
        for p in pts:
            lookup.setdefault((p.lam1, p.lam2), p)
        return [lookup[(float(a), float(b))] for a, b in X]

    def transform(self, X):
        check_is_fitted(self, "points_")
        X = check_weight_grid(X)
        return np.array([[p.f1, p.f2] for p in self._solve(X)])

    def score(self, X, y=None):
        """Mean optimal objective ``lambda1 f1 + lambda2 f2`` over the rows."""
        check_is_fitted(self, "points_")
        X = check_weight_grid(X)
        return float(np.mean([p.objective for p in self._solve(X)]))


class GaussianClonerTradeoff(TransformerMixin, BaseEstimator):
    """Map weight rows to the best Gaussian cloner's fidelity pair (closed form)."""

    def fit(self, X, y=None):
        X = check_weight_grid(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_weight_grid(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            _, point = best_gaussian_objective(tuple(row))
            out[i] = point.f1, point.f2
        return out


class DominantEigensolver(BaseEstimator):
    """Power-iteration estimator for the top eigenpair of a Hermitian PSD operator.

    Arbitrary operators give no guarantee that the first basis state overlaps
    the dominant eigenspace, so the start vector is drawn from ``seed``.
    """

    def __init__(self, tol=1e-10, max_iter=100_000, seed=0):
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed

    def fit(self, A, y=None):
        m = check_hermitian_psd(A)
        rng = np.random.default_rng(self.seed)
        start = rng.standard_normal(m.shape[0])
        res = power_iteration(
            A if isinstance(A, FockOperator) else m, start=start, tol=self.tol, max_iter=self.max_iter, seed=self.seed
        )
        self.eigenvalue_ = res.eigenvalue
        self.eigenvector_ = res.eigenvector.amplitudes
        self.n_iter_ = res.iterations
        self.residual_ = res.residual
        self.degenerate_ = res.degenerate
        return self
