"""Periodogram estimation: DFT, truncation, kernel smoothing and log bias correction.

Frequencies are kept in cycles per sample internally; Hz is only a display label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, RangeError, ShapeError

EULER_GAMMA = 0.57721
LOG_FLOOR = 1e-12
N_BANDWIDTHS = 20

RAW = "raw-periodogram"
SMOOTHED = "smoothed-periodogram"
LOG = "log-periodogram"
SCALE_TAGS = (RAW, SMOOTHED, LOG)


@dataclass(frozen=True)
class FrequencyGrid:
    """The first ``n_freqs`` Fourier frequencies ``j / length`` of an epoch."""

    n_freqs: int
    length: int
    sample_rate_hz: float | None = None

    def __post_init__(self):
        if self.length < 2:
            raise RangeError(f"epoch length must be >= 2, got {self.length}")
        if not 1 <= self.n_freqs <= self.length:
            raise RangeError(f"T must lie in [1, {self.length}], got {self.n_freqs}")

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(self.n_freqs) / self.length

    @property
    def hz(self) -> np.ndarray | None:
        if self.sample_rate_hz is None:
            return None
        return self.freqs * self.sample_rate_hz

    def to_dict(self) -> dict:
        return {"n_freqs": self.n_freqs, "length": self.length,
                "sample_rate_hz": self.sample_rate_hz}


@dataclass(frozen=True)
class Curve:
    grid: FrequencyGrid
    values: np.ndarray
    scale_tag: str = RAW

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_freqs,):
            raise ShapeError(f"curve has shape {values.shape}, grid has {self.grid.n_freqs} points")
        if self.scale_tag not in SCALE_TAGS:
            raise InvalidInputError(f"unknown scale tag {self.scale_tag!r}")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("curve values must be finite")
        if self.scale_tag != LOG and np.any(values < 0):
            raise InvalidInputError("periodogram values must be nonnegative")
        object.__setattr__(self, "values", values)


@dataclass
class ChannelEnsemble:
    """Log-periodogram curves of ``m`` channels by ``n`` epochs on one grid.

    ``values`` has shape ``(m, n, T)``.
    """

    grid: FrequencyGrid
    values: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3 or self.values.shape[2] != self.grid.n_freqs:
            raise ShapeError(f"ensemble values must be (m, n, {self.grid.n_freqs}), "
                             f"got {self.values.shape}")
        if not self.labels:
            self.labels = [f"ch{i:03d}" for i in range(self.m)]
        if len(self.labels) != self.m:
            raise ShapeError(f"{len(self.labels)} labels for {self.m} channels")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def curve(self, channel: int, epoch: int) -> Curve:
        return Curve(self.grid, self.values[channel, epoch], LOG)

    def to_json(self) -> dict:
        return {"grid": self.grid.to_dict(), "labels": list(self.labels),
                "m": self.m, "n": self.n, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, payload: dict) -> "ChannelEnsemble":
        values = np.asarray(payload["values"], dtype=float)
        if values.shape[:2] != (payload["m"], payload["n"]):
            raise ShapeError("ensemble JSON: m/n disagree with values")
        return cls(FrequencyGrid(**payload["grid"]), values, list(payload["labels"]))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "ChannelEnsemble":
        return cls.from_json(json.loads(Path(path).read_text()))


def _as_samples(epoch) -> np.ndarray:
    x = np.asarray(epoch, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidInputError(f"an epoch is a 1-D sequence of length >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("epoch contains non-finite samples")
    return x


def dft(epoch) -> np.ndarray:
    """Normalized DFT ``d_j = l**-0.5 * sum_{t=1..l} x_t exp(-2 pi i j t / l)``.

    Time is indexed from 1, which multiplies numpy's 0-based transform by
    ``exp(-2 pi i j / l)``. The modulus is unaffected.
    """
    x = _as_samples(epoch)
    n = x.size
    j = np.arange(n)
    return np.fft.fft(x) * np.exp(-2j * np.pi * j / n) / np.sqrt(n)


def _periodogram_values(x: np.ndarray, n_freqs: int) -> np.ndarray:
    # batched over leading axes; the phase factor of dft() cancels in |d|^2
    d = np.fft.rfft(x, axis=-1) if n_freqs <= x.shape[-1] // 2 + 1 else np.fft.fft(x, axis=-1)
    return (np.abs(d[..., :n_freqs]) ** 2) / x.shape[-1]


def periodogram(epoch, n_freqs: int, sample_rate_hz: float | None = None) -> Curve:
    """Raw periodogram ``|d_j|^2`` at the first ``n_freqs`` Fourier frequencies."""
    x = _as_samples(epoch)
    grid = FrequencyGrid(n_freqs, x.size, sample_rate_hz)
    return Curve(grid, _periodogram_values(x, n_freqs), RAW)


def bandwidth_grid(n_freqs: int) -> np.ndarray:
    """Candidate Gaussian bandwidths, in grid steps, from one step to a quarter of the span."""
    upper = max((n_freqs - 1) / 4.0, 1.0)
    return np.geomspace(1.0, upper, N_BANDWIDTHS)


def _kernel(n_freqs: int, bandwidth: float) -> np.ndarray:
    idx = np.arange(n_freqs)
    return np.exp(-0.5 * ((idx[:, None] - idx[None, :]) / bandwidth) ** 2)


def _apply(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Nadaraya-Watson average; bins with no power (the demeaned DC bin) get zero weight."""
    observed = (values > LOG_FLOOR).astype(float)
    total = (values * observed) @ kernel.T
    weight = observed @ kernel.T
    empty = weight <= 0
    return np.where(empty, values, total / np.where(empty, 1.0, weight))


def _gamma_deviance(y: np.ndarray, mu: np.ndarray) -> np.ndarray:
    # bins with (near) zero power carry no information about the scale
    valid = y > LOG_FLOOR
    ratio = np.where(valid, y, 1.0) / mu
    dev = np.where(valid, 2.0 * (ratio - 1.0 - np.log(ratio)), 0.0)
    return dev.sum(axis=-1) / np.maximum(valid.sum(axis=-1), 1)


def smooth_values(values: np.ndarray, bandwidth: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Kernel-smooth periodogram rows of ``values`` (shape ``(..., T)``).

    With ``bandwidth=None`` each row picks its own bandwidth by generalized
    cross-validation (gamma deviance over ``(1 - tr(S)/T)^2``).
    Returns the smoothed values and the bandwidth used for every row.
    """
    values = np.asarray(values, dtype=float)
    n_freqs = values.shape[-1]
    if bandwidth is not None:
        if not bandwidth > 0:
            raise RangeError(f"bandwidth must be positive, got {bandwidth}")
        return _apply(values, _kernel(n_freqs, float(bandwidth))), np.full(values.shape[:-1], float(bandwidth))
    if n_freqs < 3:
        return values.copy(), np.zeros(values.shape[:-1])

    candidates = bandwidth_grid(n_freqs)
    flat = values.reshape(-1, n_freqs)
    best_score = np.full(flat.shape[0], np.inf)
    best = flat.copy()
    best_h = np.zeros(flat.shape[0])
    for h in candidates:
        kernel = _kernel(n_freqs, h)
        fitted = _apply(flat, kernel)
        dof = np.trace(kernel / kernel.sum(axis=1, keepdims=True)) / n_freqs
        score = _gamma_deviance(flat, np.maximum(fitted, LOG_FLOOR)) / (1.0 - dof) ** 2
        better = score < best_score
        best_score = np.where(better, score, best_score)
        best[better] = fitted[better]
        best_h[better] = h
    return best.reshape(values.shape), best_h.reshape(values.shape[:-1])


def smooth_periodogram(curve: Curve, bandwidth: float | None = None) -> Curve:
    if curve.scale_tag != RAW:
        raise InvalidInputError(f"expected a raw periodogram, got {curve.scale_tag}")
    smoothed, _ = smooth_values(curve.values, bandwidth)
    return Curve(curve.grid, np.maximum(smoothed, 0.0), SMOOTHED)


def log_values(values) -> np.ndarray:
    return np.log(np.maximum(np.asarray(values, dtype=float), LOG_FLOOR)) + EULER_GAMMA


def log_bias_correct(curve: Curve) -> Curve:
    """``log I + 0.57721``; zero power is floored at 1e-12 first."""
    if curve.scale_tag not in (RAW, SMOOTHED):
        raise InvalidInputError(f"cannot log-correct a {curve.scale_tag} curve")
    return Curve(curve.grid, log_values(curve.values), LOG)


@dataclass(frozen=True)
class SmoothingConfig:
    enabled: bool = True
    bandwidth: float | None = None


def log_periodograms(epochs, n_freqs: int, smoothing: SmoothingConfig = SmoothingConfig()) -> np.ndarray:
    """Demean, periodogram, smooth and log-correct an array of epochs ``(..., l)``."""
    x = np.asarray(epochs, dtype=float)
    x = x - x.mean(axis=-1, keepdims=True)
    power = _periodogram_values(x, n_freqs)
    if smoothing.enabled:
        power, _ = smooth_values(power, smoothing.bandwidth)
        power = np.maximum(power, 0.0)
    return log_values(power)


def build_ensemble(raw, n_freqs: int, smoothing: SmoothingConfig = SmoothingConfig(),
                   labels=None, sample_rate_hz: float | None = None) -> ChannelEnsemble:
    """Turn an ``m x n`` collection of equal-length epochs into a ChannelEnsemble."""
    try:
        x = np.asarray(raw, dtype=float)
    except ValueError as exc:
        raise ShapeError(f"ragged epoch collection: {exc}") from None
    if x.ndim != 3:
        raise ShapeError(f"raw epochs must be (channels, epochs, samples), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("raw epochs contain non-finite samples")
    grid = FrequencyGrid(n_freqs, x.shape[2], sample_rate_hz)
    values = log_periodograms(x, n_freqs, smoothing)
    return ChannelEnsemble(grid, values, list(labels) if labels is not None else [])
