"""scikit-learn style wrappers.

``fit`` builds a design, ``transform`` folds amplitudes into residues and
``inverse_transform`` (alias ``predict``) reconstructs amplitudes from
possibly noisy residues.

>>> enc = LayeredRCRT(rho=5, K=1, m_max=136).fit()
>>> enc.gammas_
(5, 7)
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .codec import AUTO, decode_full_batch, decode_layered_batch, fold_batch
from .exceptions import DomainError
from .flat import DesignRequest, design_flat, design_flat_heuristic
from .layered import design_layered
from .numtheory import to_fraction

__all__ = ["LayeredRCRT", "FlatRCRT"]


def _amplitudes(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single amplitude column, got {X.shape[1]} columns")
        X = X[:, 0]
    if np.any(X < 0):
        raise ValueError("amplitudes must be non-negative")
    return X


def _request(est, L, X):
    """Resolve rho from the parameters, or from the data maximum when only
    m_max is given."""
    if est.rho is not None:
        n_th = None if est.n_th is None else to_fraction(est.n_th)
        m_max = to_fraction(est.m_max) if n_th is None else None
        return DesignRequest(L, n_th=n_th, m_max=m_max, rho=est.rho)
    if est.n_th is not None:
        return DesignRequest(L, n_th=est.n_th, m_max=est.m_max)
    if X is None:
        raise DomainError("give rho or n_th, or fit on data to size the range")
    top = _amplitudes(X).max(initial=0.0)
    return DesignRequest(L, n_th=math.floor(top) + 1, m_max=est.m_max)


class _RCRTBase(TransformerMixin, BaseEstimator):
    def transform(self, X):
        check_is_fitted(self, "design_")
        x = _amplitudes(X)
        if np.any(x >= self.range_):
            raise ValueError(f"amplitudes must lie below the dynamic range {self.range_}")
        residues, _ = fold_batch(x, self.design_)
        return residues

    def folding(self, X):
        """True folding integers of amplitudes X."""
        check_is_fitted(self, "design_")
        return fold_batch(_amplitudes(X), self.design_)[1]

    def _residues(self, R):
        check_is_fitted(self, "design_")
        R = check_array(R, dtype=np.float64)
        if R.shape[1] != len(self.gammas_):
            raise ValueError(f"expected {len(self.gammas_)} residue columns, got {R.shape[1]}")
        return R

    def predict(self, R):
        return self.inverse_transform(R)

    def _more_tags(self):
        return {"requires_fit": True, "X_types": ["1darray", "2darray"]}


class LayeredRCRT(_RCRTBase):
    """Two moduli with ``K`` robust layers; ``layer`` selects the decoding
    range (``"auto"`` is the full range)."""

    def __init__(self, rho=None, K=1, m_max=1.0, n_th=None, layer=AUTO):
        self.rho = rho
        self.K = K
        self.m_max = m_max
        self.n_th = n_th
        self.layer = layer

    def fit(self, X=None, y=None):
        req = _request(self, 2, X)
        self.design_ = design_layered(req.rho, self.K, req.m_max)
        self.gammas_ = self.design_.gammas
        self.moduli_ = np.array(self.design_.moduli)
        self.breakpoints_ = np.array([float(p) for p in self.design_.breakpoints])
        self.tolerances_ = np.array([float(t) for t in self.design_.tolerances])
        self.range_ = float(self.design_.full_range)
        self.n_features_in_ = 1
        return self

    def decode(self, R, layer=None):
        """Recovered folding integers, shape ``(n, 2)``."""
        R = self._residues(R)
        return decode_layered_batch(self.design_, R, self.layer if layer is None else layer)[0]

    def inverse_transform(self, R, layer=None):
        R = self._residues(R)
        return decode_layered_batch(self.design_, R, self.layer if layer is None else layer)[1]


class FlatRCRT(_RCRTBase):
    """``L`` moduli sharing one full-range layer, decoded by exhaustive search."""

    def __init__(self, L=3, rho=None, m_max=1.0, n_th=None, heuristic=False):
        self.L = L
        self.rho = rho
        self.m_max = m_max
        self.n_th = n_th
        self.heuristic = heuristic

    def fit(self, X=None, y=None):
        req = _request(self, self.L, X)
        self.design_ = design_flat_heuristic(req) if self.heuristic else design_flat(req)
        self.gammas_ = self.design_.gammas
        self.moduli_ = np.array(self.design_.moduli)
        self.range_ = float(self.design_.full_range)
        self.tolerance_ = float(self.design_.full_tolerance)
        self.n_features_in_ = 1
        return self

    def decode(self, R):
        return decode_full_batch(self.design_, self._residues(R))[0]

    def inverse_transform(self, R):
        return decode_full_batch(self.design_, self._residues(R))[1]
