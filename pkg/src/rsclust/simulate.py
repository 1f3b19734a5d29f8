"""Mixture-AR(2) benchmark data and the two contamination models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal, stats

from .errors import CausalityError, GenerationError, RangeError

MAX_JITTER_RETRIES = 100

# delta, theta, alpha, beta, gamma band sources
BAND_COEFFICIENTS = ((0.8, 0.1), (0.9, -0.9), (-0.1, -0.9), (-0.9, -0.9), (-0.8, -0.1))

MIXING_WEIGHTS = (
    (1.0, 0.0, 0.0, 0.0, 0.0),
    (0.8, 0.1, 0.0, 0.0, 0.0),
    (0.6, 0.0, 0.1, 0.0, 0.0),
    (0.4, 0.0, 0.0, 0.1, 0.0),
    (0.2, 0.0, 0.0, 0.0, 0.1),
)


def is_causal(phi1, phi2) -> np.ndarray | bool:
    """Stationarity triangle of the AR(2) characteristic polynomial."""
    phi1 = np.asarray(phi1)
    phi2 = np.asarray(phi2)
    ok = (phi2 + phi1 < 1) & (phi2 - phi1 < 1) & (np.abs(phi2) < 1)
    return bool(ok) if ok.ndim == 0 else ok


@dataclass(frozen=True)
class AR2Spec:
    phi1: float
    phi2: float
    sigma_w: float = 1.0
    burn_in: int = 500

    def __post_init__(self):
        if self.sigma_w < 0:
            raise RangeError(f"sigma_w must be nonnegative, got {self.sigma_w}")
        if self.burn_in < 0:
            raise RangeError(f"burn_in must be nonnegative, got {self.burn_in}")

    @property
    def causal(self) -> bool:
        return is_causal(self.phi1, self.phi2)

    def check(self) -> "AR2Spec":
        if not self.causal:
            raise CausalityError(
                f"AR(2) coefficients ({self.phi1}, {self.phi2}) are not causal: "
                "need phi1 + phi2 < 1, phi2 - phi1 < 1 and |phi2| < 1")
        return self

    def marginal_variance(self) -> float:
        p1, p2 = self.phi1, self.phi2
        return self.sigma_w ** 2 * (1 - p2) / ((1 + p2) * ((1 - p2) ** 2 - p1 ** 2))


def ar2_spectral_density(spec: AR2Spec, omega):
    """``sigma_w^2 / |1 - phi1 e^{-2 pi i w} - phi2 e^{-4 pi i w}|^2``."""
    spec.check()
    w = np.asarray(omega, dtype=float)
    z = np.exp(-2j * np.pi * w)
    out = spec.sigma_w ** 2 / np.abs(1 - spec.phi1 * z - spec.phi2 * z ** 2) ** 2
    return float(out) if out.ndim == 0 else out


def simulate_ar2(spec: AR2Spec, length: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """AR(2) realisations of ``length`` samples after a burn-in, started from zero state."""
    spec.check()
    if length < 2:
        raise RangeError(f"series length must be >= 2, got {length}")
    shape = tuple(np.atleast_1d(size)) if size != () else ()
    return _filter_ar2(spec, rng.normal(0.0, 1.0, size=shape + (length + spec.burn_in,)))


def _filter_ar2(spec: AR2Spec, unit_noise: np.ndarray) -> np.ndarray:
    """Run the AR(2) recursion over standard-normal noise and drop the burn-in."""
    x = signal.lfilter([1.0], [1.0, -spec.phi1, -spec.phi2], spec.sigma_w * unit_noise, axis=-1)
    return x[..., spec.burn_in:]


@dataclass(frozen=True)
class MixtureDesign:
    latent_specs: tuple[AR2Spec, ...] = tuple(AR2Spec(a, b) for a, b in BAND_COEFFICIENTS)
    weights: tuple[tuple[float, ...], ...] = MIXING_WEIGHTS
    m_channels: int = 25
    n_epochs: int = 40
    length: int = 1000
    phi1_jitter_sd: float = 0.01

    def __post_init__(self):
        a = np.asarray(self.weights, dtype=float)
        if a.ndim != 2 or a.shape[1] != len(self.latent_specs):
            raise RangeError(f"weight matrix must be (clusters, {len(self.latent_specs)}), got {a.shape}")
        if self.m_channels % a.shape[0]:
            raise RangeError(f"{self.m_channels} channels cannot split evenly into {a.shape[0]} clusters")
        if self.n_epochs < 1 or self.length < 2:
            raise RangeError("need n_epochs >= 1 and length >= 2")
        if self.phi1_jitter_sd < 0:
            raise RangeError("phi1_jitter_sd must be nonnegative")
        for spec in self.latent_specs:
            spec.check()

    @property
    def n_clusters(self) -> int:
        return len(self.weights)

    def truth(self) -> np.ndarray:
        per = self.m_channels // self.n_clusters
        return np.repeat(np.arange(self.n_clusters), per)

    def cluster_spectrum(self, cluster: int, omega) -> np.ndarray:
        """Spectral density of a cluster's (unjittered) mixture signal."""
        row = np.asarray(self.weights[cluster])
        return sum(w ** 2 * ar2_spectral_density(s, omega)
                   for w, s in zip(row, self.latent_specs) if w != 0)


@dataclass
class Dataset:
    """Raw epochs ``(m, n, l)`` with ground-truth cluster labels per channel."""

    epochs: np.ndarray
    truth: np.ndarray
    labels: list[str] = field(default_factory=list)
    mask: np.ndarray | None = None

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"ch{i:03d}" for i in range(self.epochs.shape[0])]


def jitter_spec(spec: AR2Spec, sd: float, rng: np.random.Generator) -> AR2Spec:
    if sd == 0:
        return spec
    for _ in range(MAX_JITTER_RETRIES):
        candidate = AR2Spec(spec.phi1 + rng.normal(0.0, sd), spec.phi2, spec.sigma_w, spec.burn_in)
        if candidate.causal:
            return candidate
    raise GenerationError(f"no causal phi1 jitter of {spec} after {MAX_JITTER_RETRIES} draws")


def simulate_mixture(design: MixtureDesign, rng: np.random.Generator) -> Dataset:
    """Channels as weighted sums of latent band sources, with per-channel phi1 jitter.

    Every epoch slot draws one set of latent innovations shared by all
    channels; a channel filters them through its own jittered coefficients
    (drawn once per channel) and mixes the sources with its cluster's row of
    the weight matrix. Without jitter, channels of one cluster coincide.
    """
    weights = np.asarray(design.weights, dtype=float)
    truth = design.truth()
    jittered = [[jitter_spec(spec, design.phi1_jitter_sd, rng) if weights[c, k] != 0 else spec
                 for k, spec in enumerate(design.latent_specs)] for c in truth]
    innovations = [rng.normal(0.0, 1.0, size=(design.n_epochs, design.length + spec.burn_in))
                   for spec in design.latent_specs]
    epochs = np.zeros((design.m_channels, design.n_epochs, design.length))
    for ch, cluster in enumerate(truth):
        for k, spec in enumerate(jittered[ch]):
            if weights[cluster, k] == 0:
                continue
            epochs[ch] += weights[cluster, k] * _filter_ar2(spec, innovations[k])
    return Dataset(epochs, truth)


# --- contamination -------------------------------------------------------------

def _check_rate(delta: float):
    if not 0 <= delta <= 1:
        raise RangeError(f"contamination rate must lie in [0, 1], got {delta}")


def contaminate_shift(curves, delta: float, magnitude: float, rng: np.random.Generator):
    """Add ``magnitude`` to each log-periodogram independently with probability ``delta``.

    ``curves`` is any array whose last axis is frequency (or a ChannelEnsemble).
    Returns the contaminated copy and the boolean selection mask.
    """
    _check_rate(delta)
    values = np.asarray(getattr(curves, "values", curves), dtype=float)
    mask = rng.random(values.shape[:-1]) < delta
    out = values.copy()
    out[mask] += magnitude
    if hasattr(curves, "values"):
        from .spectral import ChannelEnsemble
        return ChannelEnsemble(curves.grid, out, list(curves.labels)), mask
    return out, mask


@dataclass(frozen=True)
class EyeblinkParams:
    """Biphasic blink: a positive gamma pulse minus a slower one, plus white noise.

    Times are in seconds and ``amplitude`` is the peak height of the
    noise-free blink. With ``relative=True`` the amplitude and noise level are
    multiples of the standard deviation of the epoch being contaminated.
    """

    shapes: tuple[float, float] = (4.0, 4.0)
    scales: tuple[float, float] = (0.03, 0.06)
    amplitude: float = 10.0
    noise_sd: float = 0.5
    sample_rate_hz: float = 1000.0
    relative: bool = True

    def __post_init__(self):
        if min(self.shapes) <= 0 or min(self.scales) <= 0:
            raise RangeError("gamma shapes and scales must be positive")
        if self.sample_rate_hz <= 0:
            raise RangeError("sample rate must be positive")
        if self.noise_sd < 0 or not np.isfinite(self.amplitude):
            raise RangeError("noise_sd must be nonnegative and amplitude finite")


def _density_difference(params: EyeblinkParams, t: np.ndarray) -> np.ndarray:
    (k1, k2), (s1, s2) = params.shapes, params.scales
    return stats.gamma.pdf(t, k1, scale=s1) - stats.gamma.pdf(t, k2, scale=s2)


def eyeblink_shape(params: EyeblinkParams, length: int) -> np.ndarray:
    """Difference of the two gamma densities (time in seconds), scaled to unit peak.

    The peak is taken over the whole blink, so a truncated blink keeps the
    scale of the full one.
    """
    support = max(length, int(np.ceil(20 * max(params.scales) * max(params.shapes)
                                      * params.sample_rate_hz)))
    full = _density_difference(params, np.arange(support) / params.sample_rate_hz)
    return full[:length] / np.abs(full).max()


def eyeblink_waveform(params: EyeblinkParams, length: int, rng: np.random.Generator | None = None,
                      amplitude: float | None = None, noise_sd: float | None = None) -> np.ndarray:
    amplitude = params.amplitude if amplitude is None else amplitude
    noise_sd = params.noise_sd if noise_sd is None else noise_sd
    wave = amplitude * eyeblink_shape(params, length)
    if noise_sd > 0:
        if rng is None:
            raise RangeError("a random generator is needed for a noisy waveform")
        wave = wave + rng.normal(0.0, noise_sd, size=length)
    return wave


def contaminate_eyeblink(epochs, delta: float, params: EyeblinkParams, rng: np.random.Generator):
    """Add one blink, at a uniform onset and truncated at the epoch end, with probability ``delta``."""
    _check_rate(delta)
    x = np.asarray(getattr(epochs, "epochs", epochs), dtype=float)
    out = x.copy()
    mask = rng.random(x.shape[:-1]) < delta
    length = x.shape[-1]
    for idx in zip(*np.nonzero(mask)):
        onset = int(rng.integers(0, length))
        scale = float(np.std(x[idx])) if params.relative else 1.0
        blink = eyeblink_waveform(params, length - onset, rng,
                                  amplitude=params.amplitude * scale, noise_sd=params.noise_sd * scale)
        out[idx][onset:] += blink
    if isinstance(epochs, Dataset):
        return Dataset(out, epochs.truth.copy(), list(epochs.labels), mask), mask
    return out, mask


# --- bimodal design ------------------------------------------------------------

@dataclass(frozen=True)
class BimodalDesign:
    """Clusters of distinct AR(2) sources whose epochs come in two power levels.

    A random half of each channel's epochs is scaled up by ``level_ratio``, so
    the curves split into two equal bundles ``2 log(level_ratio)`` apart in log
    power and the deepest curve may come from either one.
    """

    latent_specs: tuple[AR2Spec, ...] = tuple(AR2Spec(a, b) for a, b in BAND_COEFFICIENTS)
    channels_per_cluster: int = 2
    n_epochs: int = 40
    length: int = 1000
    n_freqs: int = 500
    level_ratio: float = 4.0
    phi1_jitter_sd: float = 0.01

    @property
    def n_clusters(self) -> int:
        return len(self.latent_specs)

    @property
    def m_channels(self) -> int:
        return self.n_clusters * self.channels_per_cluster

    def truth(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_clusters), self.channels_per_cluster)


def bimodal_design(rng: np.random.Generator, design: BimodalDesign = BimodalDesign()) -> Dataset:
    truth = design.truth()
    epochs = np.zeros((design.m_channels, design.n_epochs, design.length))
    for ch, cluster in enumerate(truth):
        spec = jitter_spec(design.latent_specs[cluster], design.phi1_jitter_sd, rng)
        x = simulate_ar2(spec, design.length, rng, size=design.n_epochs)
        high = rng.permutation(design.n_epochs) < design.n_epochs // 2
        x[high] *= design.level_ratio
        epochs[ch] = x
    return Dataset(epochs, truth)
