import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from varcs import HilbertVarianceCS, VarianceCS
from varcs.variance_cs import two_sided_path


def test_params_roundtrip():
    est = VarianceCS(alpha=0.1, mode="ci", horizon=50)
    params = est.get_params()
    assert params["alpha"] == 0.1 and params["horizon"] == 50
    other = clone(est)
    assert other.get_params() == params
    est.set_params(lower="alt")
    assert est.lower == "alt"


def test_fit_matches_path(rng):
    x = rng.uniform(size=300)
    est = VarianceCS().fit(x)
    l, u = two_sided_path(x)
    np.testing.assert_allclose(est.path_[:, 0], l, rtol=0, atol=1e-15)
    np.testing.assert_allclose(est.path_[:, 1], u, rtol=0, atol=1e-15)
    assert est.lower_ == pytest.approx(l[-1], abs=1e-15)
    assert est.upper_ == pytest.approx(u[-1], abs=1e-15)
    assert est.n_samples_seen_ == 300


def test_partial_fit_chunks_equal_fit(rng):
    x = rng.beta(2, 6, size=500)
    whole = VarianceCS().fit(x)
    parts = VarianceCS()
    for chunk in np.array_split(x, 7):
        parts.partial_fit(chunk)
    assert parts.interval() == whole.interval()
    refit = parts.fit(x[:10])
    assert refit.n_samples_seen_ == 10


def test_column_input_and_std(rng):
    x = rng.uniform(size=(200, 1))
    est = VarianceCS(cap=0.25).fit(x)
    iv = est.std_interval()
    assert iv.lower == pytest.approx(np.sqrt(est.lower_))
    assert est.upper_ <= 0.25


def test_validation():
    with pytest.raises(ValueError):
        VarianceCS().fit([0.2, 1.2])
    with pytest.raises(ValueError):
        VarianceCS().fit([[0.1, 0.2]])
    with pytest.raises(ValueError):
        VarianceCS().fit([0.1, np.nan])
    with pytest.raises(ValueError):
        VarianceCS(mode="ci").fit([0.2])
    with pytest.raises(NotFittedError):
        VarianceCS().interval()


def test_empty_fit():
    est = VarianceCS().fit(np.zeros(0))
    assert (est.lower_, est.upper_) == (0.0, 1.0)
    assert est.path_.shape == (0, 2)


def test_hilbert_estimator(rng):
    x = rng.uniform(-0.25, 0.25, size=(400, 2))
    est = HilbertVarianceCS(dim=2).fit(x)
    assert 0 <= est.lower_ <= est.upper_ <= 1
    assert est.get_params()["dim"] == 2
    with pytest.raises(ValueError):
        est.partial_fit(np.full((1, 2), 0.4))
    with pytest.raises(ValueError):
        est.partial_fit(np.zeros((1, 3)))
    y = rng.uniform(size=200)
    a = HilbertVarianceCS(dim=1).fit((y - 0.5)[:, None])
    b = VarianceCS().fit(y)
    assert abs(a.lower_ - b.lower_) < 1e-12 and abs(a.upper_ - b.upper_) < 1e-12
