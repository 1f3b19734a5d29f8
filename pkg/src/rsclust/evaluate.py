"""Partition agreement (ARI), the contamination benchmark and the moving-window study."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import simulate
from .cluster import MEASURES, hierarchical_cluster
from .errors import InsufficientDataError, InvalidInputError, RangeError, ShapeError
from .spectral import SmoothingConfig, log_periodograms

SHIFT = "shift"
EYEBLINK = "eyeblink"
NULL = "null"


def _pairs(counts: np.ndarray) -> int:
    counts = counts.astype(np.int64)
    return int(np.sum(counts * (counts - 1) // 2))


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Pair-counting ARI from the contingency table.

    Computed in integers with one final division, so the result is the
    correctly rounded value of the exact rational. Returns 1 when both
    partitions are identical and the index is undefined (all singletons or
    one cluster on both sides).
    """
    a = np.asarray(getattr(labels_a, "assignment", labels_a))
    b = np.asarray(getattr(labels_b, "assignment", labels_b))
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError(f"partitions cover different items: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise InvalidInputError("partitions are empty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    index = _pairs(table)
    sum_a = _pairs(table.sum(axis=1))
    sum_b = _pairs(table.sum(axis=0))
    total = a.size * (a.size - 1) // 2
    # (index - E) / (M - E) with E = sum_a*sum_b/total and M = (sum_a+sum_b)/2, scaled by 2*total
    numerator = 2 * index * total - 2 * sum_a * sum_b
    denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if denominator == 0:
        return 1.0
    return numerator / denominator


# --- benchmark -----------------------------------------------------------------

@dataclass(frozen=True)
class Contamination:
    kind: str = NULL
    delta: float = 0.0
    shift_magnitude: float = 4.0
    eyeblink: simulate.EyeblinkParams = simulate.EyeblinkParams()

    def __post_init__(self):
        if self.kind not in (NULL, SHIFT, EYEBLINK):
            raise InvalidInputError(f"unknown contamination kind {self.kind!r}")
        if not 0 <= self.delta <= 1:
            raise RangeError(f"contamination rate must lie in [0, 1], got {self.delta}")


@dataclass
class BenchmarkRow:
    contamination: str
    delta: float
    method: str
    mean_ari: float
    sd_ari: float
    seconds: float
    aris: list[float] = field(default_factory=list)


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow]
    replicates: int
    seed: int

    def get(self, contamination: str, delta: float, method: str) -> BenchmarkRow:
        for row in self.rows:
            if row.contamination == contamination and row.delta == delta and row.method == method:
                return row
        raise KeyError((contamination, delta, method))


def _seeded(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _make_dataset(design, rng) -> simulate.Dataset:
    if isinstance(design, simulate.BimodalDesign):
        return simulate.bimodal_design(rng, design)
    return simulate.simulate_mixture(design, rng)


def _curves_for(dataset: simulate.Dataset, contamination: Contamination, n_freqs: int,
                smoothing: SmoothingConfig, clean: np.ndarray, rng) -> np.ndarray:
    if contamination.kind == EYEBLINK and contamination.delta > 0:
        epochs, _ = simulate.contaminate_eyeblink(dataset.epochs, contamination.delta,
                                                  contamination.eyeblink, rng)
        return log_periodograms(epochs, n_freqs, smoothing)
    if contamination.kind == SHIFT and contamination.delta > 0:
        curves, _ = simulate.contaminate_shift(clean, contamination.delta,
                                               contamination.shift_magnitude, rng)
        return curves
    return clean


def _replicate(design, contaminations, methods, k_target, n_freqs, smoothing, seed, r):
    dataset = _make_dataset(design, _seeded(seed, r, 0))
    clean = log_periodograms(dataset.epochs, n_freqs, smoothing)
    out = []
    for i, cont in enumerate(contaminations):
        curves = _curves_for(dataset, cont, n_freqs, smoothing, clean, _seeded(seed, r, 1, i))
        for method in methods:
            start = time.perf_counter()
            partition, _ = hierarchical_cluster(curves, method, k_target)
            elapsed = time.perf_counter() - start
            out.append((i, method, adjusted_rand_index(dataset.truth, partition.assignment), elapsed))
    return out


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_benchmark(design=None, contaminations=(Contamination(),), methods=MEASURES,
                  k_target: int | None = None, replicates: int = 20, seed: int = 0,
                  n_freqs: int = 50, smoothing: SmoothingConfig = SmoothingConfig(),
                  threads: int = 1) -> BenchmarkReport:
    """Simulate, contaminate, cluster and score ``replicates`` times.

    Each replicate draws one clean dataset and applies every contamination
    setting to it with its own sub-seed, so results do not depend on the
    thread count.
    """
    if replicates < 1:
        raise RangeError("need at least one replicate")
    design = design if design is not None else simulate.MixtureDesign()
    methods = tuple(m.upper() for m in methods)
    for m in methods:
        if m not in MEASURES:
            raise InvalidInputError(f"unknown method {m!r}")
    k_target = k_target or design.n_clusters
    contaminations = tuple(contaminations)
    results = _map(lambda r: _replicate(design, contaminations, methods, k_target, n_freqs,
                                        smoothing, seed, r),
                   range(replicates), threads)

    rows = []
    for i, cont in enumerate(contaminations):
        for method in methods:
            hits = [(ari, sec) for rep in results for (j, m, ari, sec) in rep if j == i and m == method]
            aris = [h[0] for h in hits]
            rows.append(BenchmarkRow(cont.kind, cont.delta, method, float(np.mean(aris)),
                                     float(np.std(aris, ddof=1)) if len(aris) > 1 else 0.0,
                                     float(np.mean([h[1] for h in hits])), aris))
    return BenchmarkReport(rows, replicates, seed)


# --- moving windows --------------------------------------------------------------

@dataclass
class WindowStabilityReport:
    method: str
    starts: list[int]
    matrix: np.ndarray
    median: float
    iqr: float

    @property
    def off_diagonal(self) -> np.ndarray:
        return self.matrix[np.triu_indices(len(self.starts), k=1)]


def window_starts(n_epochs: int, window: int, step: int) -> list[int]:
    if window < 1 or step < 1:
        raise RangeError("window and step must be positive")
    starts = list(range(0, n_epochs - window + 1, step))
    if len(starts) < 2:
        raise InsufficientDataError(
            f"a recording of {n_epochs} epochs holds fewer than two {window}-epoch windows")
    return starts


def moving_window_experiment(curves, window: int = 30, step: int = 10, k: int = 7,
                             methods=MEASURES, threads: int = 1) -> dict[str, WindowStabilityReport]:
    """Cluster each sliding window of epochs and compare all window results pairwise by ARI.

    ``curves`` holds log-periodograms ``(channels, epochs, T)``; one epoch is
    one second, so window and step are given in epochs.
    """
    values = np.asarray(getattr(curves, "values", curves), dtype=float)
    if values.ndim != 3:
        raise ShapeError(f"expected (channels, epochs, T) curves, got {values.shape}")
    starts = window_starts(values.shape[1], window, step)
    reports = {}
    for method in (m.upper() for m in methods):
        partitions = _map(lambda s: hierarchical_cluster(values[:, s:s + window], method, k)[0].assignment,
                          starts, threads)
        n = len(starts)
        matrix = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = matrix[j, i] = adjusted_rand_index(partitions[i], partitions[j])
        off = matrix[np.triu_indices(n, k=1)]
        q1, med, q3 = np.percentile(off, [25, 50, 75])
        reports[method] = WindowStabilityReport(method, starts, matrix, float(med), float(q3 - q1))
    return reports
