"""scikit-learn wrapper: rows of (v, T/l, Omega T) in, (Im value, error) out."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .numerics import QuadratureSpec
from .violation import ViolationPath, config_from_triple, trace_e, trace_e_dimensionless

FEATURES = ("v", "t_over_ell", "omega_t")


class ViolationTransformer(TransformerMixin, BaseEstimator):
    """Stateless transformer evaluating Tr(rho_phi E) for each parameter row.

    ``fit`` only validates the input shape. ``transform`` returns an
    ``(n, 2)`` array of ``[Im(value), error_estimate]``.

    Parameters
    ----------
    path : {"ei2d", "reduced3d", "dimensionless", "mc"}
    abs_tol, rel_tol, max_subdivisions, truncation_sigma
        forwarded to :class:`QuadratureSpec`.
    mc_samples, mc_seed
        Monte-Carlo controls, used only when ``path="mc"``.
    """

    def __init__(self, path="ei2d", abs_tol=1e-12, rel_tol=1e-8, max_subdivisions=2000,
                 truncation_sigma=12.0, mc_samples=10**6, mc_seed=0):
        self.path = path
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.max_subdivisions = max_subdivisions
        self.truncation_sigma = truncation_sigma
        self.mc_samples = mc_samples
        self.mc_seed = mc_seed

    def _check_rows(self, X):
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns {FEATURES}, got {X.shape[1]}")
        v, tl, wt = X.T
        if np.any((v < 0) | (v >= 1)):
            raise ValueError("v must lie in [0, 1)")
        if np.any(tl <= 0):
            raise ValueError("t_over_ell must be > 0")
        if np.any(wt < 0):
            raise ValueError("omega_t must be >= 0")

    def fit(self, X, y=None):
        ViolationPath(self.path)
        X = validate_data(self, X, dtype=np.float64)
        self._check_rows(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        self._check_rows(X)
        quad = QuadratureSpec(self.abs_tol, self.rel_tol, self.max_subdivisions, self.truncation_sigma)
        path = ViolationPath(self.path)
        out = np.empty((X.shape[0], 2))
        for i, (v, tl, wt) in enumerate(X):
            if path is ViolationPath.DIMENSIONLESS_2D:
                res = trace_e_dimensionless(v, tl, wt, quad)
            else:
                res = trace_e(config_from_triple(v, tl, wt), path, quad=quad,
                              samples=self.mc_samples, seed=self.mc_seed)
            out[i] = res.imag, res.error_estimate
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["im_value", "err"], dtype=object)
