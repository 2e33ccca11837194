"""scikit-learn transformers over truth tables and vertex sets.

Rows of ``X`` are 0/1 vectors of length ``2**n``: a truth table for
:class:`ComplexityMeasures`, a membership vector for
:class:`InducedSubgraphProfile`. Both compose with pipelines, grid search
and ``get_params``/``set_params`` like any other transformer.
"""
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import boolfn, cube

_MEASURES = ("s", "bs", "deg")


def check_cube_rows(X, n=None):
    """Validate a 2-D 0/1 array whose width is a power of two; return it as uint8.

    ``n``, when given, pins the expected width to ``2**n``.
    """
    X = check_array(X, dtype=None, ensure_2d=True, ensure_all_finite=True)
    width = X.shape[1]
    if width & (width - 1):
        raise ValueError(f"row length must be a power of two, got {width}")
    if n is not None and width != 1 << n:
        raise ValueError(f"expected rows of length {1 << n}, got {width}")
    if not np.isin(X, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    return X.astype(np.uint8)


def check_truth_tables(X, n=None):
    return check_cube_rows(X, n)


def _width_to_n(width):
    return width.bit_length() - 1


class ComplexityMeasures(TransformerMixin, BaseEstimator):
    """Map truth tables to their sensitivity, block sensitivity and degree.

    Parameters
    ----------
    measures : tuple of str, default=("s", "bs", "deg")
        Which measures to emit, in column order.
    """

    def __init__(self, measures=_MEASURES):
        self.measures = measures

    def fit(self, X, y=None):
        unknown = set(self.measures) - set(_MEASURES)
        if unknown or not self.measures:
            raise ValueError(f"measures must be a non-empty subset of {_MEASURES}, got {self.measures!r}")
        X = check_truth_tables(X)
        self.n_features_in_ = X.shape[1]
        self.n_variables_ = _width_to_n(X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "n_variables_")
        X = check_truth_tables(X, self.n_variables_)
        m = boolfn.batch_measures(X, self.n_variables_, with_bs="bs" in self.measures)
        return np.column_stack([getattr(m, name) for name in self.measures]).astype(np.int64)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(list(self.measures), dtype=object)


class InducedSubgraphProfile(TransformerMixin, BaseEstimator):
    """Map vertex sets of ``Q^n`` to degree statistics of the induced subgraphs.

    Columns are ``size, delta_h, delta_complement, gamma``; with
    ``spectral=True`` a final ``lambda`` column holds the spectral
    certificate for rows of size ``2**(n-1) + 1`` and NaN elsewhere.
    """

    def __init__(self, spectral=False, tol=1e-9):
        self.spectral = spectral
        self.tol = tol

    def fit(self, X, y=None):
        X = check_cube_rows(X)
        self.n_features_in_ = X.shape[1]
        self.n_ = _width_to_n(X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "n_")
        X = check_cube_rows(X, self.n_)
        degs = cube.side_degrees(X, self.n_)
        inside = X.astype(bool)
        delta_h = np.where(inside, degs, 0).max(axis=1)
        delta_c = np.where(~inside, degs, 0).max(axis=1)
        cols = [X.sum(axis=1), delta_h, delta_c, np.maximum(delta_h, delta_c)]
        out = np.column_stack(cols).astype(np.float64 if self.spectral else np.int64)
        if not self.spectral:
            return out
        target = (1 << (self.n_ - 1)) + 1 if self.n_ else -1
        lam = np.full(X.shape[0], math.nan)
        for row in np.flatnonzero(X.sum(axis=1) == target):
            lam[row] = cube.spectral_certificate(cube.VertexSet(self.n_, X[row]), tol=self.tol)
        return np.column_stack([out, lam])

    def get_feature_names_out(self, input_features=None):
        names = ["size", "delta_h", "delta_complement", "gamma"]
        return np.asarray(names + (["lambda"] if self.spectral else []), dtype=object)
