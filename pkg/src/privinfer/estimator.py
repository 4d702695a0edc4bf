"""scikit-learn style wrapper around one published query.

``fit`` plays the server. It draws the perturbation and publishes the query
for the fixed +-1 ``weights``, and that query can then serve any number of
users. ``transform`` plays the user and returns the ``t`` inner products
``v'_i x^T`` per sample. ``predict`` completes the server's decode.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .approx import GammaSpec, count_gamma_members, decode_coefficients, sample_gamma, server_query
from .bounds import error_bound, log2_int
from .exact import SchemeParams
from .exceptions import LengthMismatchError
from .gf2 import SignVector, solve_B

__all__ = ["PrivateInnerProduct"]


class PrivateInnerProduct(TransformerMixin, RegressorMixin, BaseEstimator):
    """Approximate ``X @ weights`` through the private query/answer protocol.

    Parameters
    ----------
    weights : array-like of shape (n_features,)
        The server's model, entries in {+1, -1}.
    n_blocks : int
        Privacy parameter ``t``; must divide ``n_features`` and be the
        order of ``hadamard`` (a power of two when ``hadamard`` is None).
    h : int
        Perturbation budget. ``h=0`` gives the exact scheme.
    hadamard : array-like of shape (n_blocks, n_blocks), optional
    family : {"le", "lemma"}
    random_state : int, numpy Generator or None

    Attributes
    ----------
    query_ : SignVector
        Published syndrome, ``n_features - n_blocks`` bits.
    shift_ : SignVector
        Shift vector both parties derive from ``query_``.
    coef_ : ndarray of shape (n_blocks,)
        Decoding coefficients applied to the user's answers.
    error_bound_ : float
        Worst-case absolute error for unit-norm samples.
    mi_bits_ : float
        Leakage ``I(W; Q)`` of the published query, in bits.
    """

    def __init__(self, weights=None, n_blocks=1, h=0, hadamard=None, family="le", random_state=None):
        self.weights = weights
        self.n_blocks = n_blocks
        self.h = h
        self.hadamard = hadamard
        self.family = family
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n = X.shape[1]
        if self.weights is None:
            raise ValueError("weights must be provided")
        w = SignVector.from_signs(np.asarray(self.weights).ravel())
        if w.n != n:
            raise LengthMismatchError(f"weights have length {w.n}, X has {n} features")
        params = SchemeParams(n, int(self.n_blocks), int(self.h), self.hadamard)
        spec = GammaSpec.from_params(params, self.family)
        rng = np.random.default_rng(self.random_state)
        g = sample_gamma(spec, rng)
        self.params_ = params
        self.query_ = server_query(w, g, params.M, spec)
        self.shift_ = solve_B(params.M, self.query_)
        self.coef_ = decode_coefficients(w, self.shift_, params.C)
        self.error_bound_ = error_bound(params.h, n)
        self.mi_bits_ = n - params.t - log2_int(count_gamma_members(spec))
        self.n_features_in_ = n
        return self

    def _answer_matrix(self) -> np.ndarray:
        return (self.params_.C.entries * self.shift_.to_array()).astype(np.float64)

    def transform(self, X):
        """User answers ``v'_i x^T``, shape (n_samples, n_blocks)."""
        check_is_fitted(self, "query_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise LengthMismatchError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self._answer_matrix().T

    def predict(self, X):
        return self.transform(X) @ self.coef_
