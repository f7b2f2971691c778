import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import norm

from causalweb.core import ProcessSeries, ValidationError
from causalweb.preprocess import add_noise, gauss_rank_transform, moving_average


def test_rank_transform_bounds_and_quantiles():
    x = np.random.default_rng(0).exponential(size=1000)
    out = gauss_rank_transform(x)
    cut = 0.0425
    # extremes sit half a rank step inside the cut quantiles
    assert out.min() == pytest.approx(norm.ppf(cut + 0.5 / 1000 * (1 - 2 * cut)))
    assert out.max() == pytest.approx(-out.min())
    assert abs(out.mean()) < 1e-12
    assert np.all(np.diff(out[np.argsort(x)]) > 0)


def test_rank_transform_ties_are_broken_by_index():
    out = gauss_rank_transform(np.array([1.0, 1.0, 0.0, 1.0]))
    assert out[2] < out[0] < out[1] < out[3]


def test_rank_transform_keeps_series_type():
    s = ProcessSeries("a", [3.0, 1.0, 2.0])
    out = gauss_rank_transform(s)
    assert isinstance(out, ProcessSeries) and out.name == "a"


def test_rank_transform_rejects_constant():
    with pytest.raises(ValidationError, match="constant"):
        gauss_rank_transform(np.ones(10))
    with pytest.raises(ValidationError):
        gauss_rank_transform(np.arange(5.0), tail_cut=0.5)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(-1e6, 1e6)))
def test_rank_transform_invariant_to_monotone_maps(x):
    if np.all(x == x[0]):
        return
    a = gauss_rank_transform(x)
    np.testing.assert_array_equal(a, gauss_rank_transform(2.0 * x))
    squashed = np.arctan(x / 1e3)
    # the squashing map can merge values at float resolution; compare only when it does not
    if len(np.unique(squashed)) == len(np.unique(x)):
        np.testing.assert_array_equal(a, gauss_rank_transform(squashed))
    assert len(np.unique(a)) == len(x)


def test_moving_average():
    x = np.arange(10.0)
    np.testing.assert_allclose(moving_average(x, 5), np.arange(2.0, 8.0))
    np.testing.assert_array_equal(moving_average(x, 1), x)
    with pytest.raises(ValidationError):
        moving_average(x, 4)
    with pytest.raises(ValidationError):
        moving_average(x, 11)


def test_add_noise_reproducible():
    x = np.zeros(1000)
    a, b = add_noise(x, 0.5, seed=3), add_noise(x, 0.5, seed=3)
    np.testing.assert_array_equal(a, b)
    assert np.std(a) == pytest.approx(0.5, rel=0.1)
    np.testing.assert_array_equal(add_noise(x, 0.0, seed=1), x)
    with pytest.raises(ValidationError):
        add_noise(x, -1.0)
