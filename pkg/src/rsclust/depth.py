"""Modified band depth and the functional boxplot statistics built on it.

Curves are rows of a 2-D array ``(N, T)``. Depths are computed from exact
integer band counts, so ties and orderings never depend on rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import InsufficientDataError, RangeError, ShapeError

FENCE_FACTOR = 1.5


@dataclass(frozen=True)
class DepthRanking:
    """Depth per curve and the curve indices from deepest to shallowest.

    Ties are broken by the lowest original index.
    """

    depths: np.ndarray
    order: np.ndarray
    counts: np.ndarray
    tie_rule: str = "lowest-index"


@dataclass(frozen=True)
class CentralRegion:
    lower: np.ndarray
    upper: np.ndarray
    area: float
    member_indices: np.ndarray


def _as_curves(curves, min_count: int = 2) -> np.ndarray:
    try:
        y = np.asarray(curves, dtype=float)
    except ValueError:
        raise ShapeError("curves must share one grid") from None
    if y.ndim == 1:
        y = y[None, :]
    if y.ndim != 2:
        raise ShapeError(f"curves must form an (N, T) array, got shape {y.shape}")
    if y.shape[0] < min_count:
        raise InsufficientDataError(f"need at least {min_count} curves, got {y.shape[0]}")
    return y


def band_counts(curves) -> np.ndarray:
    """Number of (pair, grid point) combinations whose band contains each curve.

    For curve i at one grid point with ``s`` curves strictly below and ``g``
    strictly above, the pairs {j, k} whose band misses it are exactly those
    lying entirely below or entirely above, so the count is
    ``C(N,2) - C(s,2) - C(g,2)``.
    """
    y = _as_curves(curves)
    n = y.shape[0]
    below = rankdata(y, method="min", axis=0).astype(np.int64) - 1
    above = n - rankdata(y, method="max", axis=0).astype(np.int64)
    pairs = n * (n - 1) // 2
    per_point = pairs - below * (below - 1) // 2 - above * (above - 1) // 2
    return per_point.sum(axis=1)


def modified_band_depth(curves) -> DepthRanking:
    y = _as_curves(curves)
    n, n_points = y.shape
    counts = band_counts(y)
    depths = counts / (n_points * (n * (n - 1) // 2))
    # stable sort on negated counts keeps lowest index first among ties
    order = np.argsort(-counts, kind="stable")
    return DepthRanking(depths, order, counts)


def functional_median(curves) -> int:
    """Index of the deepest curve."""
    return int(modified_band_depth(curves).order[0])


def central_region(curves, coverage: float = 0.5, ranking: DepthRanking | None = None) -> CentralRegion:
    """Envelope of the ``ceil(coverage * N)`` deepest curves.

    Area uses the rectangle rule with one grid step as the unit width.
    """
    if not 0 < coverage <= 1:
        raise RangeError(f"coverage must lie in (0, 1], got {coverage}")
    y = _as_curves(curves)
    if ranking is None:
        ranking = modified_band_depth(y)
    k = math.ceil(coverage * y.shape[0])
    members = np.sort(ranking.order[:k])
    lower = y[members].min(axis=0)
    upper = y[members].max(axis=0)
    return CentralRegion(lower, upper, envelope_area(lower, upper), members)


def envelope_area(lower, upper) -> float:
    return float(np.sum(np.asarray(upper) - np.asarray(lower)))


def region_area(region: CentralRegion) -> float:
    return region.area


def detect_outliers(curves, factor: float = FENCE_FACTOR) -> np.ndarray:
    """Curves leaving the central envelope inflated by ``factor`` times its height anywhere."""
    y = _as_curves(curves, min_count=4)
    region = central_region(y)
    height = region.upper - region.lower
    upper_fence = region.upper + factor * height
    lower_fence = region.lower - factor * height
    outside = (y > upper_fence) | (y < lower_fence)
    return np.flatnonzero(outside.any(axis=1))
