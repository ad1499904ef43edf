import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats as sst
from scipy.spatial.distance import jensenshannon

from kickedtop import stats
from kickedtop.errors import BinningMismatchError, DegenerateDataError, EmptyHistogramError
from kickedtop.spin import ModelParams, floquet_spectrum


def hist_from(p):
    p = np.asarray(p, float)
    return stats.Histogram((0.0, 1.0), p.size, p / p.sum(), 100)


def test_pearson_identity_and_affine():
    rng = np.random.default_rng(0)
    a = rng.normal(size=500)
    assert abs(stats.pearson(a, a) - 1.0) < 1e-12
    assert abs(stats.pearson(a, -2 * a + 7) + 1.0) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 50), st.floats(-100, 100), st.floats(0.1, 50), st.floats(-100, 100), st.integers(0, 10**6))
def test_pearson_affine_invariance(a, b, c, d, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(2, 200))
    y += x
    assert abs(stats.pearson(a * x + b, c * y + d) - stats.pearson(x, y)) < 1e-12


def test_pearson_matches_scipy():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(2, 300))
    y = 0.3 * x + y
    assert_allclose(stats.pearson(x, y), sst.pearsonr(x, y)[0], atol=1e-13)


def test_pearson_degenerate():
    with pytest.raises(DegenerateDataError):
        stats.pearson(np.ones(10), np.arange(10.0))


def test_histogram_single_value():
    h = stats.histogram(np.full(20, 0.42), (0, 1), 10)
    assert np.count_nonzero(h.densities) == 1 and h.densities.max() == 1.0


def test_histogram_normalized_and_clipped():
    h = stats.histogram([-1.0, 0.2, 0.5, 3.0], (0, 1), 4)
    assert abs(h.densities.sum() - 1.0) < 1e-15
    assert h.clipped == 2 and h.densities[0] == 0.5


def test_histogram_uniform_chi2():
    rng = np.random.default_rng(2)
    n, bins = 10**5, 100
    h = stats.histogram(rng.random(n), (0, 1), bins)
    counts = h.densities * n
    chi2 = np.sum((counts - n / bins) ** 2 / (n / bins))
    assert sst.chi2.sf(chi2, bins - 1) > 1e-3


def test_histogram_empty():
    with pytest.raises(EmptyHistogramError):
        stats.histogram([np.nan], (0, 1), 10)


def test_js_identical_zero():
    h = hist_from([1, 2, 3, 4])
    assert stats.js_distance(h, h) == 0.0


def test_js_disjoint_max():
    assert abs(stats.js_distance(hist_from([1, 1, 0, 0]), hist_from([0, 0, 1, 1])) - math.sqrt(math.log(2))) < 1e-12


def test_js_symmetric_and_scipy_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p, q = hist_from(rng.random(30)), hist_from(rng.random(30) ** 3)
        d = stats.js_distance(p, q)
        assert abs(d - stats.js_distance(q, p)) < 1e-15
        assert abs(d - jensenshannon(p.densities, q.densities)) < 1e-12
        assert 0 <= d <= math.sqrt(math.log(2))


def test_js_binning_mismatch():
    with pytest.raises(BinningMismatchError):
        stats.js_distance(hist_from([1, 2]), hist_from([1, 2, 3]))


def test_normalize_examples():
    assert_allclose(stats.normalize_for_comparison([2.0, 4.0, 6.0]), [0, 0.5, 1])
    rng = np.random.default_rng(4)
    x = rng.normal(size=100)
    assert np.abs(stats.normalize_for_comparison(3.5 * x - 2) - stats.normalize_for_comparison(x)).max() < 1e-12
    with pytest.raises(DegenerateDataError):
        stats.normalize_for_comparison([1.0, 1.0])


def test_picket_fence():
    ph = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    r, _ = stats.spacing_ratios(ph)
    assert_allclose(r.mean(), 1.0, atol=1e-12)


def test_poisson_reference():
    rng = np.random.default_rng(5)
    s = rng.exponential(size=10**5)
    ph = np.cumsum(s)
    ph = 2 * np.pi * ph / (ph[-1] + rng.exponential())
    r, _ = stats.spacing_ratios(ph)
    assert abs(r.mean() - stats.POISSON_R) < 0.01
    assert abs(stats.POISSON_R - 0.3863) < 1e-4


def test_degenerate_pairs_counted():
    r, d = stats.spacing_ratios([0.0, 0.0, 0.0, 1.0, 2.0])
    assert d >= 1 and np.all(np.isfinite(r))


def test_spacing_ratio_transition():
    weak = stats.spacing_ratio(floquet_spectrum(ModelParams(1.0, 0.84, 200)))
    strong = stats.spacing_ratio(floquet_spectrum(ModelParams(10.0, 0.84, 200)))
    assert abs(weak.mean - stats.POISSON_R) < 0.05
    assert strong.mean > 0.5 > weak.mean


def test_modes_bimodal_and_unimodal():
    rng = np.random.default_rng(6)
    two = np.concatenate([rng.normal(0.3, 0.05, 5000), rng.normal(0.7, 0.05, 5000)])
    peaks, minima = stats.find_modes(two)
    assert len(peaks) == 2 and 0.4 < minima[0] < 0.6
    assert stats.count_modes(rng.normal(0.5, 0.1, 10000)) == 1
