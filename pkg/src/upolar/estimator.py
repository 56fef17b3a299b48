"""scikit-learn style wrapper: fit builds the code, transform encodes, predict decodes."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds import design_delta
from .codec import decode_batch, encode_batch
from .construction import attach_fast_stage, build_general


class UniversalPolarCode(BaseEstimator):
    """Two-stage universal polar code for the class of channels with capacity >= g/(b+g).

    Parameters
    ----------
    n, K : slow-stage depth and chain length.
    b, g : one-level transform with b degraded and g improved outputs.
    m : fast stage length is 2**m.
    delta : erasure probability used to pick the fast-stage information set;
        None takes the worst-case entropy bound after n slow levels.
    margin : extra fraction of fast indices left frozen.
    precision : "double" or "single" arithmetic in the decoder.
    """

    def __init__(self, n=4, K=8, b=1, g=1, m=10, delta=None, margin=0.02, precision="double"):
        self.n = n
        self.K = K
        self.b = b
        self.g = g
        self.m = m
        self.delta = delta
        self.margin = margin
        self.precision = precision

    def fit(self, X=None, y=None):
        """Build the plan and fast stage. ``X`` and ``y`` are ignored."""
        if self.precision not in ("single", "double"):
            raise ValueError(f"precision must be 'single' or 'double', got {self.precision!r}")
        delta = self.delta
        if delta is None:
            delta = design_delta(self.g / (self.b + self.g), self.n)
        self.plan_ = build_general(self.b, self.g, self.n, self.K)
        self.spec_ = attach_fast_stage(self.plan_, self.m, delta, self.margin)
        self.delta_ = float(delta)
        self.n_info_ = self.spec_.n_info
        self.length_ = self.spec_.length
        self.rate_ = self.spec_.rate
        return self

    def transform(self, X):
        """Encode rows of information bits into codewords."""
        check_is_fitted(self, "spec_")
        X = check_array(X, dtype=None)
        if X.shape[1] != self.n_info_:
            raise ValueError(f"expected {self.n_info_} information bits per row, got {X.shape[1]}")
        return encode_batch(self.spec_, X)

    def predict(self, X):
        """Decode rows of channel LLRs into information bits."""
        check_is_fitted(self, "spec_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.length_:
            raise ValueError(f"expected {self.length_} LLRs per row, got {X.shape[1]}")
        dtype = np.float32 if self.precision == "single" else np.float64
        info, _ = decode_batch(self.spec_, X, dtype=dtype)
        return info

    def score(self, X, y):
        """Fraction of rows decoded without a block error."""
        y = check_array(y, dtype=None)
        return float(np.mean(np.all(self.predict(X) == y, axis=1)))
