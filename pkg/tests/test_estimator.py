import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from upolar import UniversalPolarCode
from upolar.codec import LLR_CLAMP
from upolar.simulation import SimConfig, build_spec


def test_params_round_trip():
    est = UniversalPolarCode(n=3, K=4, m=2)
    params = est.get_params()
    assert params == dict(n=3, K=4, b=1, g=1, m=2, delta=None, margin=0.02, precision="double")
    twin = clone(est).set_params(m=3)
    assert twin.m == 3 and est.m == 2


def test_fit_matches_simulation_spec():
    est = UniversalPolarCode().fit()
    ref = build_spec(SimConfig())
    assert (est.n_info_, est.length_, est.rate_) == (ref.n_info, ref.length, ref.rate)
    assert est.n_info_ == 20725
    assert est.rate_ == pytest.approx(0.3162, abs=5e-5)


def test_encode_decode_noiseless():
    est = UniversalPolarCode(n=3, K=4, m=3).fit()
    rng = np.random.default_rng(0)
    info = rng.integers(0, 2, (50, est.n_info_), dtype=np.uint8)
    x = est.transform(info)
    assert x.shape == (50, est.length_)
    llr = np.where(x == 0, LLR_CLAMP, -LLR_CLAMP)
    assert np.array_equal(est.predict(llr), info)
    assert est.score(llr, info) == 1.0
    assert est.set_params(precision="single").score(llr, info) == 1.0


def test_score_counts_block_errors():
    est = UniversalPolarCode(n=3, K=4, m=2).fit()
    info = np.zeros((4, est.n_info_), dtype=np.uint8)
    llr = np.full((4, est.length_), LLR_CLAMP)
    wrong = info.copy()
    wrong[0, 0] = 1
    assert est.score(llr, wrong) == 0.75


def test_unfitted_and_shape_errors():
    est = UniversalPolarCode(n=3, K=4, m=2)
    with pytest.raises(NotFittedError):
        est.transform(np.zeros((1, 3)))
    est.fit()
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, est.n_info_ + 1)))
    with pytest.raises(ValueError):
        est.predict(np.zeros((1, est.length_ - 1)))
    with pytest.raises(ValueError):
        UniversalPolarCode(precision="half").fit()
    with pytest.raises(ValueError):
        UniversalPolarCode(b=4, g=2, n=2, K=4).fit()
