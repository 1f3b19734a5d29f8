"""Validated run configurations for the CLI subcommands.

Unknown keys are rejected; AR coefficients are checked for causality when
the design is built.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import simulate
from .evaluate import Contamination
from .spectral import SmoothingConfig


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SmoothingSection(Strict):
    enabled: bool = True
    bandwidth: Optional[float] = Field(default=None, gt=0)

    def build(self) -> SmoothingConfig:
        return SmoothingConfig(self.enabled, self.bandwidth)


class MixtureSection(Strict):
    coefficients: list[tuple[float, float]] = list(simulate.BAND_COEFFICIENTS)
    weights: list[list[float]] = [list(r) for r in simulate.MIXING_WEIGHTS]
    m_channels: int = Field(default=25, ge=1)
    n_epochs: int = Field(default=40, ge=1)
    length: int = Field(default=1000, ge=2)
    phi1_jitter_sd: float = Field(default=0.01, ge=0)
    sigma_w: float = Field(default=1.0, ge=0)
    burn_in: int = Field(default=500, ge=0)

    def build(self) -> simulate.MixtureDesign:
        specs = tuple(simulate.AR2Spec(a, b, self.sigma_w, self.burn_in).check()
                      for a, b in self.coefficients)
        return simulate.MixtureDesign(specs, tuple(tuple(r) for r in self.weights), self.m_channels,
                                      self.n_epochs, self.length, self.phi1_jitter_sd)


class BimodalSection(Strict):
    coefficients: list[tuple[float, float]] = list(simulate.BAND_COEFFICIENTS)
    channels_per_cluster: int = Field(default=2, ge=1)
    n_epochs: int = Field(default=40, ge=2)
    length: int = Field(default=1000, ge=2)
    n_freqs: int = Field(default=500, ge=1)
    level_ratio: float = Field(default=4.0, gt=0)
    phi1_jitter_sd: float = Field(default=0.01, ge=0)

    def build(self) -> simulate.BimodalDesign:
        specs = tuple(simulate.AR2Spec(a, b).check() for a, b in self.coefficients)
        return simulate.BimodalDesign(specs, self.channels_per_cluster, self.n_epochs, self.length,
                                      self.n_freqs, self.level_ratio, self.phi1_jitter_sd)


class EyeblinkSection(Strict):
    shapes: tuple[float, float] = (4.0, 4.0)
    scales: tuple[float, float] = (0.03, 0.06)
    amplitude: float = 10.0
    noise_sd: float = Field(default=0.5, ge=0)
    sample_rate_hz: float = Field(default=1000.0, gt=0)
    relative: bool = True

    def build(self) -> simulate.EyeblinkParams:
        return simulate.EyeblinkParams(self.shapes, self.scales, self.amplitude, self.noise_sd,
                                       self.sample_rate_hz, self.relative)


class ContaminationSection(Strict):
    kind: Literal["null", "shift", "eyeblink"] = "null"
    delta: float = Field(default=0.0, ge=0, le=1)
    shift_magnitude: float = 4.0
    eyeblink: EyeblinkSection = EyeblinkSection()

    def build(self) -> Contamination:
        return Contamination(self.kind, self.delta, self.shift_magnitude, self.eyeblink.build())


class DesignSection(Strict):
    kind: Literal["mixture", "bimodal"] = "mixture"
    mixture: MixtureSection = MixtureSection()
    bimodal: BimodalSection = BimodalSection()

    def build(self):
        return self.mixture.build() if self.kind == "mixture" else self.bimodal.build()


class Common(Strict):
    seed: int = Field(default=0, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)


class SimulateConfig(Common):
    design: DesignSection = DesignSection()
    contamination: ContaminationSection = ContaminationSection()
    sample_rate_hz: float = Field(default=1000.0, gt=0)

    @model_validator(mode="after")
    def _raw_only(self):
        if self.contamination.kind == "shift":
            raise ValueError("shift contamination acts on log-periodograms; "
                             "set it in the estimate/cluster config instead")
        return self


class SpectralSection(Strict):
    n_freqs: int = Field(default=50, ge=1)
    smoothing: SmoothingSection = SmoothingSection()
    sample_rate_hz: Optional[float] = Field(default=None, gt=0)


class EstimateConfig(Common, SpectralSection):
    input: str
    contamination: ContaminationSection = ContaminationSection()


class ElbowSection(Strict):
    k_min: int = Field(default=2, ge=1)
    k_max: int = Field(default=10, ge=1)


class ClusterConfig(Common, SpectralSection):
    input: str
    measure: Literal["FM", "CR", "MEAN"] = "FM"
    k: Optional[int] = Field(default=None, ge=1)
    elbow: ElbowSection = ElbowSection()
    truth: Optional[str] = None
    contamination: ContaminationSection = ContaminationSection()
    plot: bool = True


class ElbowConfig(Common, SpectralSection):
    input: str
    measure: Literal["FM", "CR", "MEAN"] = "CR"
    elbow: ElbowSection = ElbowSection()
    contamination: ContaminationSection = ContaminationSection()
    plot: bool = True


class BenchmarkConfig(Common, SpectralSection):
    design: DesignSection = DesignSection()
    contaminations: list[ContaminationSection] = [
        ContaminationSection(),
        ContaminationSection(kind="shift", delta=0.1),
        ContaminationSection(kind="shift", delta=0.2),
        ContaminationSection(kind="shift", delta=0.3),
        ContaminationSection(kind="eyeblink", delta=0.25),
        ContaminationSection(kind="eyeblink", delta=0.3),
        ContaminationSection(kind="eyeblink", delta=0.35),
    ]
    methods: list[Literal["FM", "CR", "MEAN"]] = ["FM", "CR", "MEAN"]
    k: Optional[int] = Field(default=None, ge=1)
    replicates: int = Field(default=20, ge=1)


class WindowsConfig(Common, SpectralSection):
    input: Optional[str] = None
    recording_epochs: int = Field(default=177, ge=2)
    design: MixtureSection = MixtureSection()
    contamination: ContaminationSection = ContaminationSection(kind="shift", delta=0.2)
    window: int = Field(default=30, ge=1)
    step: int = Field(default=10, ge=1)
    k: int = Field(default=7, ge=1)
    methods: list[Literal["FM", "CR", "MEAN"]] = ["FM", "CR", "MEAN"]
    plot: bool = True


COMMAND_CONFIGS = {
    "simulate": SimulateConfig,
    "estimate": EstimateConfig,
    "cluster": ClusterConfig,
    "elbow": ElbowConfig,
    "benchmark": BenchmarkConfig,
    "windows": WindowsConfig,
}


def load_config(command: str, path=None, overrides: dict | None = None):
    """Read a JSON config file (optional), apply flag overrides, validate."""
    payload = {}
    if path is not None:
        payload = json.loads(Path(path).read_text())
        if not isinstance(payload, dict):
            raise ValueError("config file must hold a JSON object")
    payload.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return COMMAND_CONFIGS[command].model_validate(payload)
