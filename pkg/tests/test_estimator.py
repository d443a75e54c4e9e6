import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from rcrt.estimator import FlatRCRT, LayeredRCRT


def test_params_and_clone():
    enc = LayeredRCRT(rho=150, K=3, m_max=2.0)
    assert enc.get_params() == {"rho": 150, "K": 3, "m_max": 2.0, "n_th": None, "layer": "auto"}
    other = clone(enc).set_params(K=2)
    assert other.fit().gammas_ == (152, 155)
    assert enc.K == 3


def test_layered_round_trip():
    enc = LayeredRCRT(rho=15, K=2, m_max=120).fit()
    x = np.linspace(0, enc.range_ - 1e-6, 400)
    R = enc.transform(x)
    assert R.shape == (400, 2)
    assert np.allclose(enc.inverse_transform(R), x)
    assert np.array_equal(enc.decode(R), enc.folding(x))
    assert np.allclose(enc.predict(R), x)


def test_layered_noise_within_tolerance():
    enc = LayeredRCRT(rho=15, K=2, m_max=120).fit()
    rng = np.random.default_rng(0)
    x = rng.uniform(0, enc.range_, 2000)
    R = enc.transform(x) + rng.uniform(-1, 1, (2000, 2)) * enc.tolerances_[-1] * 0.999
    assert np.array_equal(enc.decode(R), enc.folding(x))


def test_fit_sizes_range_from_data():
    X = np.array([[10.0], [480.5]])
    enc = LayeredRCRT(K=1, m_max=10).fit(X)
    assert enc.range_ >= 481
    enc = FlatRCRT(L=3, m_max=55).fit(X)
    assert enc.range_ >= 481


def test_flat_round_trip_and_pipeline():
    enc = FlatRCRT(L=3, n_th=20000, m_max=55).fit()
    assert enc.gammas_ == (19, 20, 21)
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 20000, 300)
    R = enc.transform(x) + rng.uniform(-1, 1, (300, 3)) * enc.tolerance_ * 0.99
    assert np.allclose(enc.inverse_transform(R), x, atol=enc.tolerance_)
    pipe = make_pipeline(FunctionTransformer(np.abs), FlatRCRT(L=3, n_th=20000, m_max=55))
    assert pipe.fit_transform(-x.reshape(-1, 1)).shape == (300, 3)


def test_errors():
    with pytest.raises(NotFittedError):
        LayeredRCRT(rho=5).transform([1.0])
    enc = LayeredRCRT(rho=5, K=1, m_max=136).fit()
    with pytest.raises(ValueError):
        enc.transform([-1.0])
    with pytest.raises(ValueError):
        enc.transform([1e6])
    with pytest.raises(ValueError):
        enc.inverse_transform(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        enc.transform(np.zeros((3, 2)))
