"""Estimator wrapper: sklearn protocol and numeric parity with the core API."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from relu_dissect.estimator import PwaDecomposer
from relu_dissect.network import network_to_dict, random_network
from relu_dissect.pwa import region_of


def make_net():
    return random_network(2, [4], 2, seed=3)


class TestSklearnProtocol:
    def test_get_set_params(self):
        est = PwaDecomposer(network=make_net(), box=5.0, workers=2)
        params = est.get_params()
        assert params["box"] == 5.0 and params["workers"] == 2
        est.set_params(box=7.5)
        assert est.box == 7.5

    def test_clone_keeps_params_drops_state(self):
        est = PwaDecomposer(network=make_net(), box=5.0).fit()
        dup = clone(est)
        assert dup.box == 5.0
        assert not hasattr(dup, "pwa_")

    def test_not_fitted(self):
        est = PwaDecomposer(network=make_net())
        with pytest.raises(NotFittedError):
            est.predict(np.zeros((1, 2)))

    def test_missing_network(self):
        with pytest.raises(ValueError, match="network"):
            PwaDecomposer().fit()


class TestNumericBehavior:
    def test_predict_matches_forward(self):
        net = make_net()
        est = PwaDecomposer(network=net, box=10.0).fit()
        rng = np.random.default_rng(5)
        X = rng.uniform(-10, 10, size=(300, 2))
        assert np.abs(est.predict(X) - net.forward_many(X)).max() < 1e-9

    def test_transform_matches_region_of(self):
        net = make_net()
        est = PwaDecomposer(network=net, box=10.0).fit()
        rng = np.random.default_rng(7)
        X = rng.uniform(-10, 10, size=(50, 2))
        idx = est.transform(X)
        for i, x in enumerate(X):
            assert idx[i] == region_of(est.pwa_, x)

    def test_fitted_attributes(self):
        est = PwaDecomposer(network=make_net()).fit()
        assert est.n_features_in_ == 2
        assert est.n_outputs_ == 2
        assert est.n_regions_ == len(est.pwa_.regions)

    def test_accepts_schema_dict(self):
        net = make_net()
        est = PwaDecomposer(network=network_to_dict(net)).fit()
        rng = np.random.default_rng(9)
        X = rng.uniform(-10, 10, size=(100, 2))
        assert np.abs(est.predict(X) - net.forward_many(X)).max() < 1e-9

    def test_feature_count_checked(self):
        est = PwaDecomposer(network=make_net()).fit()
        with pytest.raises(ValueError, match="features"):
            est.predict(np.zeros((2, 3)))

    def test_nan_input_rejected(self):
        est = PwaDecomposer(network=make_net()).fit()
        with pytest.raises(ValueError):
            est.predict(np.array([[np.nan, 0.0]]))
