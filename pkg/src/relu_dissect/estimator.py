"""Estimator-style wrapper around the converter.

Follows the scikit-learn protocol so the decomposition can sit in
pipelines and be cloned/grid-searched: constructor stores parameters
untouched, ``fit`` runs the conversion, ``predict`` evaluates the
resulting piecewise map and ``transform`` labels inputs with region
indices.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .geometry import GEO_TOL, HPolyhedron
from .network import Network, network_from_dict
from .pwa import convert, eval_many


class PwaDecomposer(BaseEstimator):
    """Decompose a ReLU network into its exact piecewise-affine form.

    Parameters
    ----------
    network : Network or dict
        The network to decompose; a dict is interpreted as the network
        JSON document.
    box : float
        Half-width B of the analysis domain [-B, B]^d.
    tol : float
        Geometric tolerance used during region construction.
    workers : int
        Process count for the per-region splitting work.
    """

    def __init__(self, network=None, box: float = 10.0, tol: float = GEO_TOL, workers: int = 1):
        self.network = network
        self.box = box
        self.tol = tol
        self.workers = workers

    def _resolved_network(self) -> Network:
        if isinstance(self.network, Network):
            return self.network
        if isinstance(self.network, dict):
            return network_from_dict(self.network)
        raise ValueError("network must be a Network instance or a network schema dict")

    def fit(self, X=None, y=None):
        """Run the conversion.  X and y are ignored; the decomposition is a
        property of the network, not of data."""
        net = self._resolved_network()
        domain = HPolyhedron.box(net.input_dim, self.box)
        self.pwa_ = convert(net, domain, tol=self.tol, workers=self.workers)
        self.n_features_in_ = net.input_dim
        self.n_outputs_ = net.output_dim
        self.n_regions_ = len(self.pwa_)
        return self

    def _validated(self, X) -> np.ndarray:
        check_is_fitted(self, "pwa_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X

    def predict(self, X) -> np.ndarray:
        """Piecewise-affine value at each row of X."""
        X = self._validated(X)
        Y, _ = eval_many(self.pwa_, X, tol=self.tol)
        return Y

    def transform(self, X) -> np.ndarray:
        """Region index (canonical order) of each row of X."""
        X = self._validated(X)
        _, idx = eval_many(self.pwa_, X, tol=self.tol)
        return idx

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)
