"""scikit-learn style wrappers around the functional core.

``fit`` takes a :class:`~wergodic.measures.FiniteMeasure`; ``transform`` takes
a ``(n_samples, |G|)`` array whose rows are functions on the group and
returns the fitted operator applied to each row. Complex input is allowed,
which rules out ``sklearn.utils.check_array`` for the rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ergodic import weighted_cesaro
from .measures import FiniteMeasure
from .spectral import ergodic_projection, regular_matrix, spectrum
from .weights import WeightSequence, make_weight


def check_measure(mu) -> FiniteMeasure:
    if not isinstance(mu, FiniteMeasure):
        raise TypeError(f"expected a FiniteMeasure, got {type(mu).__name__}")
    if not np.all(np.isfinite(mu.coeffs)):
        raise ValueError("measure has non-finite coefficients")
    return mu


def check_function_rows(X, n_features: int) -> np.ndarray:
    """Coerce ``X`` to a 2-D complex array with ``n_features`` columns."""
    X = np.asarray(X)
    if X.dtype == object or not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise ValueError("function rows must be numeric")
    X = np.atleast_2d(X).astype(complex)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array, got {X.ndim} dimensions")
    if X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, estimator was fitted with {n_features}")
    if not np.all(np.isfinite(X)):
        raise ValueError("function rows contain NaN or infinity")
    return X


class _OperatorTransformer(TransformerMixin, BaseEstimator):
    """Applies the fitted matrix ``operator_`` to each row."""

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_function_rows(X, self.n_features_in_)
        return X @ self.operator_.T


class ErgodicProjector(_OperatorTransformer):
    """Mean ergodic projection of ``xi * lambda(mu)``.

    Fitted attributes: ``operator_`` (the projection matrix), ``rank_``,
    ``eigenvalue_`` (``conj(xi)``, the eigenvalue it projects onto),
    ``limit_measure_`` (the idempotent measure with ``lambda(theta) = operator_``)
    and ``discrepancy_`` (algebraic vs iterative route).
    """

    def __init__(self, xi: complex = 1.0, mode: str = "both"):
        self.xi = xi
        self.mode = mode

    def fit(self, X, y=None):
        mu = check_measure(X)
        data = ergodic_projection(mu, self.xi, mode=self.mode)
        self.operator_ = data.projection
        self.rank_ = data.rank
        self.eigenvalue_ = data.eigenvalue
        self.limit_measure_ = data.limit_measure(mu.group)
        self.discrepancy_ = data.discrepancy
        self.n_features_in_ = mu.group.order
        return self


class WeightedCesaroAverager(_OperatorTransformer):
    """Convolution by the weighted Cesaro average ``(1/n) sum a_i mu^i`` at ``n = n_max``.

    ``weight`` is a :class:`~wergodic.weights.WeightSequence` or a config-style
    mapping. Fitted attributes: ``average_`` (the averaged measure),
    ``operator_``, ``checkpoints_`` and ``trajectory_``.
    """

    def __init__(self, weight=None, n_max: int = 1000):
        self.weight = weight
        self.n_max = n_max

    def fit(self, X, y=None):
        mu = check_measure(X)
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max!r}")
        w = self.weight if isinstance(self.weight, WeightSequence) else make_weight(self.weight)
        traj = weighted_cesaro(mu, w, int(self.n_max))
        self.trajectory_ = traj
        self.checkpoints_ = np.array(traj.checkpoints)
        self.average_ = traj.last
        self.operator_ = regular_matrix(traj.last).matrix
        self.n_features_in_ = mu.group.order
        return self


class ConvolutionSpectrum(BaseEstimator):
    """Spectrum of ``lambda(mu)``; fit only.

    Fitted attributes: ``eigenvalues_``, ``spectral_radius_``,
    ``unitary_eigenvalues_`` and ``report_``.
    """

    def __init__(self, tol_unit: float | None = None):
        self.tol_unit = tol_unit

    def fit(self, X, y=None):
        mu = check_measure(X)
        rep = spectrum(mu, tol_unit=self.tol_unit)
        self.report_ = rep
        self.eigenvalues_ = rep.eigenvalues
        self.spectral_radius_ = rep.spectral_radius
        self.unitary_eigenvalues_ = np.array(rep.unitary_eigenvalues)
        self.n_features_in_ = mu.group.order
        return self
