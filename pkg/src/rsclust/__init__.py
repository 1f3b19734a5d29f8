"""Robust clustering of multi-epoch time series by their spectra.

Channels are summarized by their epoch-wise log-periodograms and grouped by
agglomerative clustering with depth-based (functional median, central region)
or mean-based dissimilarities.
"""

from .cluster import elbow_trace, full_trace, hierarchical_cluster
from .depth import central_region, functional_median, modified_band_depth
from .evaluate import adjusted_rand_index, moving_window_experiment, run_benchmark
from .spectral import ChannelEnsemble, build_ensemble, log_periodograms

__version__ = "0.1.0"

__all__ = [
    "ChannelEnsemble",
    "adjusted_rand_index",
    "build_ensemble",
    "central_region",
    "elbow_trace",
    "full_trace",
    "functional_median",
    "hierarchical_cluster",
    "log_periodograms",
    "modified_band_depth",
    "moving_window_experiment",
    "run_benchmark",
]
