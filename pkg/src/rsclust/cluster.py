"""Agglomerative clustering of channels under pooled-curve dissimilarities.

A cluster is the set of all epoch curves of its member channels. Three
dissimilarities are supported:

* ``FM``   -- Euclidean distance between the functional medians of the two pools
* ``CR``   -- area of the 50% central region of the merged pool
* ``MEAN`` -- Euclidean distance between the pointwise mean curves
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import depth
from .errors import InsufficientDataError, InvalidInputError, RangeError, ShapeError

MEASURES = ("FM", "CR", "MEAN")
MIN_CLUSTERS = {"FM": 2, "CR": 1, "MEAN": 1}


def euclidean_curve_distance(a, b) -> float:
    a = np.asarray(getattr(a, "values", a), dtype=float)
    b = np.asarray(getattr(b, "values", b), dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"curves on different grids: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _pool(curves) -> np.ndarray:
    y = np.asarray(curves, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if y.ndim == 3:
        y = y.reshape(-1, y.shape[-1])
    if y.ndim != 2 or y.shape[0] == 0:
        raise InsufficientDataError("a cluster needs at least one curve")
    return y


def median_curve(curves) -> np.ndarray:
    y = _pool(curves)
    if y.shape[0] == 1:
        return y[0]
    return y[depth.functional_median(y)]


def mean_curve(curves) -> np.ndarray:
    return _pool(curves).mean(axis=0)


def fm_dissimilarity(a, b) -> float:
    return euclidean_curve_distance(median_curve(a), median_curve(b))


def mean_dissimilarity(a, b) -> float:
    return euclidean_curve_distance(mean_curve(a), mean_curve(b))


def cr_dissimilarity(a, b) -> float:
    ya, yb = _pool(a), _pool(b)
    if ya.shape[1] != yb.shape[1]:
        raise ShapeError("clusters live on different grids")
    return _region_area(np.vstack([ya, yb]))


def _region_area(pooled: np.ndarray) -> float:
    # content-defined row order makes depth tie-breaks independent of how the pool was stacked
    return depth.central_region(pooled[np.lexsort(pooled.T[::-1])]).area


@dataclass(frozen=True)
class ClusterPartition:
    """Channel-to-cluster assignment with ids numbered by first appearance."""

    assignment: np.ndarray
    measure_tag: str

    @property
    def k(self) -> int:
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def groups(self) -> list[list[int]]:
        return [np.flatnonzero(self.assignment == c).tolist() for c in range(self.k)]


@dataclass(frozen=True)
class MergeStep:
    n_before: int
    merged_a: tuple[int, ...]
    merged_b: tuple[int, ...]
    dissimilarity: float


@dataclass
class MergeTrace:
    steps: list[MergeStep] = field(default_factory=list)
    measure_tag: str = ""

    def series(self) -> list[tuple[int, float]]:
        """(clusters after the merge, merge dissimilarity) for every step."""
        return [(s.n_before - 1, s.dissimilarity) for s in self.steps]


def partition_from_groups(groups, m: int, measure: str) -> ClusterPartition:
    raw = np.empty(m, dtype=int)
    for gid, members in enumerate(groups):
        raw[list(members)] = gid
    # relabel by first appearance so ids are canonical
    relabel = {}
    for label in raw:
        relabel.setdefault(int(label), len(relabel))
    return ClusterPartition(np.array([relabel[int(v)] for v in raw]), measure)


class _Dissimilarity:
    """Pair dissimilarity with caching keyed on member sets."""

    def __init__(self, values: np.ndarray, measure: str):
        self.values = values
        self.measure = measure
        self._summary: dict[frozenset, np.ndarray] = {}
        self._pair: dict[frozenset, float] = {}

    def pooled(self, members) -> np.ndarray:
        return self.values[sorted(members)].reshape(-1, self.values.shape[-1])

    def _center(self, members: frozenset) -> np.ndarray:
        if members not in self._summary:
            pool = self.pooled(members)
            self._summary[members] = median_curve(pool) if self.measure == "FM" else pool.mean(axis=0)
        return self._summary[members]

    def __call__(self, a: frozenset, b: frozenset) -> float:
        if self.measure == "CR":
            key = a | b
            if key not in self._pair:
                self._pair[key] = _region_area(self.pooled(key))
            return self._pair[key]
        return euclidean_curve_distance(self._center(a), self._center(b))


def _values_of(ensemble) -> np.ndarray:
    values = getattr(ensemble, "values", ensemble)
    values = np.asarray(values, dtype=float)
    if values.ndim != 3:
        raise ShapeError(f"expected (channels, epochs, T) curves, got shape {values.shape}")
    return values


def hierarchical_cluster(ensemble, measure: str, k_target: int) -> tuple[ClusterPartition, MergeTrace]:
    """Greedy agglomeration from singletons down to ``k_target`` clusters.

    Every step evaluates the dissimilarity of all current cluster pairs and
    merges the minimum; ties go to the lexicographically smallest pair. The
    merged cluster is appended after the survivors.
    """
    measure = measure.upper()
    if measure not in MEASURES:
        raise InvalidInputError(f"unknown measure {measure!r}; choose from {MEASURES}")
    values = _values_of(ensemble)
    m = values.shape[0]
    if not MIN_CLUSTERS[measure] <= k_target <= m:
        raise RangeError(f"K_target for {measure} must lie in [{MIN_CLUSTERS[measure]}, {m}], got {k_target}")

    dissim = _Dissimilarity(values, measure)
    clusters = [frozenset([i]) for i in range(m)]
    trace = MergeTrace(measure_tag=measure)
    while len(clusters) > k_target:
        n = len(clusters)
        matrix = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = dissim(clusters[i], clusters[j])
        p, q = np.unravel_index(int(np.argmin(matrix)), matrix.shape)
        trace.steps.append(MergeStep(n, tuple(sorted(clusters[p])), tuple(sorted(clusters[q])),
                                     float(matrix[p, q])))
        merged = clusters[p] | clusters[q]
        clusters = [c for idx, c in enumerate(clusters) if idx not in (p, q)] + [merged]
    return partition_from_groups(clusters, m, measure), trace


def dissimilarity_matrix(ensemble, measure: str, groups=None) -> np.ndarray:
    """Symmetric matrix of ``measure`` between the given channel groups (default: singletons)."""
    values = _values_of(ensemble)
    measure = measure.upper()
    if measure not in MEASURES:
        raise InvalidInputError(f"unknown measure {measure!r}")
    if groups is None:
        groups = [[i] for i in range(values.shape[0])]
    clusters = [frozenset(g) for g in groups]
    dissim = _Dissimilarity(values, measure)
    n = len(clusters)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = dissim(clusters[i], clusters[j])
    return out


def partition_from_trace(trace: MergeTrace, m: int, k: int) -> ClusterPartition:
    """Replay the first ``m - k`` merges of a trace."""
    if not 1 <= k <= m or m - k > len(trace.steps):
        raise RangeError(f"trace of {len(trace.steps)} steps cannot reach {k} clusters from {m}")
    clusters = [frozenset([i]) for i in range(m)]
    for step in trace.steps[: m - k]:
        a, b = frozenset(step.merged_a), frozenset(step.merged_b)
        clusters = [c for c in clusters if c not in (a, b)] + [a | b]
    return partition_from_groups(clusters, m, trace.measure_tag)


@dataclass(frozen=True)
class ElbowResult:
    series: list[tuple[int, float]]
    suggested_k: int
    distinct_knee: bool
    scores: dict[int, float]


def elbow_trace(trace: MergeTrace, k_min: int = 2, k_max: int = 10) -> ElbowResult:
    """Pick the cluster count where the merge cost bends hardest.

    The series is first clipped to ``[k_min, k_max]``. With ``s(k)`` the
    cost of the merge that leaves ``k`` clusters, an interior count scores
    ``s(k-1) - 2 s(k) + s(k+1)``. The window ends themselves are never
    suggested unless no interior count bends, in which case ``k_min`` is
    returned with ``distinct_knee`` False.
    """
    if k_min > k_max:
        raise RangeError(f"empty elbow window [{k_min}, {k_max}]")
    series = trace.series()
    cost = {k: d for k, d in series if k_min <= k <= k_max}
    if len(cost) < 3:
        raise InsufficientDataError(
            f"elbow needs at least 3 cluster counts in [{k_min}, {k_max}], trace offers {len(cost)}")
    scores = {k: cost[k - 1] - 2.0 * cost[k] + cost[k + 1]
              for k in sorted(cost) if k - 1 in cost and k + 1 in cost}
    if not scores:
        raise InsufficientDataError(f"no interior cluster count in [{k_min}, {k_max}]")
    scale = max(abs(v) for v in cost.values()) or 1.0
    best = max(scores, key=lambda k: (scores[k], -k))
    if scores[best] <= 1e-9 * scale:
        return ElbowResult(series, k_min, False, scores)
    return ElbowResult(series, best, True, scores)


def full_trace(ensemble, measure: str) -> MergeTrace:
    """Trace of the complete agglomeration down to the measure's smallest cluster count."""
    measure = measure.upper()
    return hierarchical_cluster(ensemble, measure, MIN_CLUSTERS.get(measure, 1))[1]
