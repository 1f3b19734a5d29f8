import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rsclust.depth import (band_counts, central_region, detect_outliers, envelope_area,
                           functional_median, modified_band_depth, region_area)
from rsclust.errors import InsufficientDataError, RangeError, ShapeError


def brute_force_mbd(y):
    """Average over pairs of the fraction of grid points inside the pair's band."""
    n, t = y.shape
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for i in range(n):
        inside = 0
        for j, k in pairs:
            lo = np.minimum(y[j], y[k])
            hi = np.maximum(y[j], y[k])
            inside += int(np.sum((lo <= y[i]) & (y[i] <= hi)))
        out.append(Fraction(inside, len(pairs) * t))
    return out


def test_three_ordered_curves():
    y = np.array([np.zeros(5), np.ones(5), 2 * np.ones(5)])
    ranking = modified_band_depth(y)
    assert np.allclose(ranking.depths, [2 / 3, 1, 2 / 3])
    assert functional_median(y) == 1
    assert list(ranking.order) == [1, 0, 2]


def test_identical_curves_tie_to_lowest_index():
    y = np.tile(np.linspace(0, 1, 7), (4, 1))
    ranking = modified_band_depth(y)
    assert np.all(ranking.depths == 1)
    assert list(ranking.order) == [0, 1, 2, 3]
    assert functional_median(y[:2]) == 0


def test_too_few_curves():
    with pytest.raises(InsufficientDataError):
        modified_band_depth(np.zeros((1, 5)))
    with pytest.raises(ShapeError):
        modified_band_depth(np.zeros((2, 3, 4)))
    with pytest.raises(ShapeError):
        modified_band_depth([[1.0, 2.0], [1.0]])


# small integer values force many ties, which is where counting shortcuts break
small_curves = st.integers(2, 8).flatmap(
    lambda n: st.integers(1, 20).flatmap(
        lambda t: arrays(float, (n, t), elements=st.integers(-3, 3).map(float))))


@settings(max_examples=300, deadline=None)
@given(small_curves)
def test_mbd_matches_brute_force_exactly(y):
    n, t = y.shape
    expected = brute_force_mbd(y)
    counts = band_counts(y)
    pairs = n * (n - 1) // 2
    assert [Fraction(int(c), pairs * t) for c in counts] == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: arrays(float, (n, 15), elements=st.floats(-50, 50))))
def test_mbd_matches_brute_force_on_continuous_values(y):
    n, t = y.shape
    counts = band_counts(y)
    assert [Fraction(int(c), n * (n - 1) // 2 * t) for c in counts] == brute_force_mbd(y)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10).flatmap(lambda n: arrays(float, (n, 12), elements=st.floats(-50, 50))))
def test_depth_bounds_and_order(y):
    n = y.shape[0]
    ranking = modified_band_depth(y)
    assert sorted(ranking.order) == list(range(n))
    assert np.all(np.diff(ranking.depths[ranking.order]) <= 0)
    assert np.all(ranking.depths >= 2 / n - 1e-12)
    assert np.all(ranking.depths <= 1 + 1e-12)
    assert ranking.depths[functional_median(y)] == ranking.depths.max()


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: arrays(float, (n, 10), elements=st.floats(-5, 5))),
       st.sampled_from([np.exp, np.arctan, lambda v: v ** 3, lambda v: 2 * v + 7]))
def test_order_invariant_under_increasing_transforms(y, transform):
    before = modified_band_depth(y)
    after = modified_band_depth(transform(y))
    # strictly increasing maps keep ties and order; exp may merge tiny values into ties in float
    if len(np.unique(y)) == len(np.unique(transform(y))):
        assert list(before.order) == list(after.order)
        assert np.array_equal(before.counts, after.counts)


def test_far_outlier_is_never_the_median(rng):
    for _ in range(50):
        bundle = rng.normal(0, 0.1, size=(9, 30))
        outlier = bundle[rng.integers(9)] + 10.0
        y = np.vstack([outlier, bundle])
        assert functional_median(y) != 0


def test_region_of_identical_curves_is_flat():
    region = central_region(np.tile(np.arange(10.0), (5, 1)))
    assert region.area == 0
    assert region_area(region) == 0


def test_two_curve_envelope_area():
    c = np.sin(np.arange(50))
    region = central_region([c, c + 1], coverage=1.0)
    assert region.area == pytest.approx(50.0)
    assert envelope_area(np.zeros(50), np.ones(50)) == 50
    assert envelope_area(np.zeros(50), np.zeros(50)) == 0


def test_region_membership_count_and_bounds(rng):
    y = rng.normal(size=(7, 20))
    region = central_region(y)
    assert len(region.member_indices) == 4
    members = y[region.member_indices]
    assert np.all(members >= region.lower) and np.all(members <= region.upper)
    with pytest.raises(RangeError):
        central_region(y, coverage=0)


# multiples of 1/8 stay distinct after float translation and scaling
dyadic = st.integers(-80, 80).map(lambda v: v / 8)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9).flatmap(lambda n: arrays(float, (n, 10), elements=dyadic)),
       st.floats(-100, 100), st.floats(0.01, 100))
def test_area_translation_invariant_and_homogeneous(y, shift, scale):
    base = central_region(y).area
    assert central_region(y + shift).area == pytest.approx(base, rel=1e-9, abs=1e-6)
    assert central_region(y * scale).area == pytest.approx(scale * base, rel=1e-9, abs=1e-9)


def test_similar_clusters_pool_into_smaller_region(rng):
    # two clusters with close spectra and a third one far away
    grid = np.linspace(0, 1, 50)
    x = np.sin(2 * np.pi * grid) + rng.normal(0, 0.2, size=(20, 50))
    y = np.sin(2 * np.pi * grid) + 0.3 + rng.normal(0, 0.2, size=(20, 50))
    z = np.cos(2 * np.pi * grid) + 2 + rng.normal(0, 0.2, size=(20, 50))
    assert central_region(np.vstack([x, y])).area < central_region(np.vstack([x, z])).area


def test_outlier_detection():
    bundle = np.tile(np.linspace(0, 1, 20), (8, 1)) + np.arange(8)[:, None] * 0.01
    assert len(detect_outliers(np.tile(np.arange(5.0), (6, 1)))) == 0
    assert len(detect_outliers(bundle)) == 0
    near = np.vstack([bundle, bundle[3] + 0.02])
    assert len(detect_outliers(near)) == 0
    far = np.vstack([bundle, bundle[0] + 5.0])
    assert list(detect_outliers(far)) == [8]
    with pytest.raises(InsufficientDataError):
        detect_outliers(bundle[:3])
