"""End-to-end analysis: spectrogram, two-stage partition, per-class signal
reconstruction, envelope indicators and fault-frequency identification.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .clustering import ClassPartition, StageDiagnostics, dsc_partition
from .envelope import (
    EnvelopeSpectrum,
    EnvsiConfig,
    FaultFrequencyResult,
    envsi,
    identify_fault_frequency,
    squared_envelope_spectrum,
)
from .errors import DscError
from .selectors import alpha_selector, cv_selector, selector_filter, spectral_kurtosis
from .signals import Signal
from .spectral import MagnitudeSpectrogram, StftConfig, griffin_lim, magnitude, stft

CLASS_NAMES = {1: "class1", 2: "class2", 3: "class3"}


@dataclass
class AnalysisConfig:
    """Knobs for the full pipeline; defaults match the reference simulation setup."""

    stft: StftConfig = field(default_factory=StftConfig)
    min_pts: int = 20
    frame_representation: str = "distribution"
    epsilon_stage1: float | None = None
    epsilon_stage2: float | None = None
    gl_iterations: int = 100
    gl_tol: float = 1e-6
    expected_freq: float = 30.7
    harmonics: int = 8
    tolerance_bins: int = 2
    prominence_fraction: float = 0.1
    search_band: tuple[float, float] | None = None

    def __post_init__(self):
        if self.search_band is not None:
            self.search_band = tuple(float(v) for v in self.search_band)

    def envsi_config(self) -> EnvsiConfig:
        return EnvsiConfig(self.expected_freq, self.harmonics, self.tolerance_bins)

    def band_for(self, ses: EnvelopeSpectrum) -> tuple[float, float]:
        if self.search_band is not None:
            return self.search_band
        upper = 20.0 * self.expected_freq if self.expected_freq else 500.0
        return (0.0, min(upper, float(ses.freqs[-1])))


@dataclass
class AnalysisResult:
    """Everything the pipeline computed; to_report() keeps just the numbers."""

    sample_rate: float
    n_samples: int
    partition: ClassPartition
    reconstructed: dict[str, Signal]
    spectra: dict[str, EnvelopeSpectrum]
    envsi_values: dict[str, float]
    fault: FaultFrequencyResult | None
    failure: str | None
    gl_residuals: dict[str, float]
    elapsed_seconds: float
    spectrogram: MagnitudeSpectrogram | None = None

    def to_report(self) -> dict:
        counts = self.partition.class_counts()
        report = {
            "input": {"sample_rate": self.sample_rate, "n_samples": self.n_samples},
            "envsi": dict(self.envsi_values),
            "fault_frequency": {
                "value": None if self.fault is None else self.fault.frequency,
                "detected_peaks": [] if self.fault is None else [
                    {"freq": float(f), "amplitude": float(a)}
                    for f, a in zip(self.fault.peak_freqs, self.fault.peak_amplitudes)
                ],
                "failure": self.failure,
            },
            "stages": [_stage_dict(s) for s in self.partition.stages],
            "class_frame_counts": {CLASS_NAMES[c]: n for c, n in counts.items()},
            "griffin_lim_residuals": dict(self.gl_residuals),
            "elapsed_seconds": self.elapsed_seconds,
        }
        return report


def _stage_dict(s: StageDiagnostics) -> dict:
    return {
        "stage": s.stage,
        "epsilon": s.epsilon,
        "degenerate_knee": s.degenerate_knee,
        "min_pts": s.min_pts,
        "n_frames": s.n_frames,
        "n_outliers": s.n_outliers,
        "n_clusters": s.n_clusters,
    }


def analyze_signal(signal: Signal, config: AnalysisConfig | None = None,
                   keep_spectrogram: bool = False) -> AnalysisResult:
    """Run the full separation pipeline on one signal.

    A failed frequency identification (or an empty fault class) is reported in
    the result rather than raised; structural errors (stage collapse, signal
    too short) propagate to the caller.
    """
    config = config or AnalysisConfig()
    start = time.perf_counter()

    spec = magnitude(stft(signal, config.stft))
    partition = dsc_partition(
        spec, config.min_pts, (config.epsilon_stage1, config.epsilon_stage2),
        config.frame_representation,
    )

    reconstructed: dict[str, Signal] = {}
    gl_residuals: dict[str, float] = {}
    for cls, z in ((1, partition.z1), (2, partition.z2), (3, partition.z3)):
        result = griffin_lim(z, config.gl_iterations, tol=config.gl_tol)
        reconstructed[CLASS_NAMES[cls]] = result.signal
        gl_residuals[CLASS_NAMES[cls]] = float(result.residuals[-1])

    envsi_cfg = config.envsi_config()
    spectra: dict[str, EnvelopeSpectrum] = {}
    envsi_values: dict[str, float] = {}
    for name, sig in list(reconstructed.items()) + [("raw", signal)]:
        ses = squared_envelope_spectrum(sig)
        spectra[name] = ses
        envsi_values[name] = envsi(ses, envsi_cfg)

    fault = None
    failure = None
    try:
        ses2 = spectra["class2"]
        fault = identify_fault_frequency(
            ses2, config.prominence_fraction, config.band_for(ses2)
        )
    except DscError as exc:
        failure = exc.code

    return AnalysisResult(
        sample_rate=signal.sample_rate,
        n_samples=len(signal),
        partition=partition,
        reconstructed=reconstructed,
        spectra=spectra,
        envsi_values=envsi_values,
        fault=fault,
        failure=failure,
        gl_residuals=gl_residuals,
        elapsed_seconds=time.perf_counter() - start,
        spectrogram=spec if keep_spectrogram else None,
    )


SELECTOR_FUNCS = {
    "sk": spectral_kurtosis,
    "alpha": alpha_selector,
    "cv": cv_selector,
}


@dataclass
class SelectorComparison:
    """ENVSI (and identified frequency where possible) for the raw signal, each
    selector-filtered variant and the clustering pipeline's fault class."""

    envsi_values: dict[str, float]
    frequencies: dict[str, float | None]
    failures: dict[str, str | None]
    elapsed_seconds: float

    def to_report(self) -> dict:
        return {
            "envsi": dict(self.envsi_values),
            "fault_frequency": {k: self.frequencies.get(k) for k in self.envsi_values},
            "failures": {k: self.failures.get(k) for k in self.envsi_values},
            "elapsed_seconds": self.elapsed_seconds,
        }


def compare_selectors(signal: Signal, config: AnalysisConfig | None = None,
                      analysis: AnalysisResult | None = None) -> SelectorComparison:
    """Selector-filtered ENVSI comparison against the clustering pipeline."""
    config = config or AnalysisConfig()
    start = time.perf_counter()
    envsi_cfg = config.envsi_config()

    envsi_values: dict[str, float] = {}
    frequencies: dict[str, float | None] = {}
    failures: dict[str, str | None] = {}

    def evaluate(name: str, sig: Signal):
        ses = squared_envelope_spectrum(sig)
        envsi_values[name] = envsi(ses, envsi_cfg)
        try:
            fault = identify_fault_frequency(
                ses, config.prominence_fraction, config.band_for(ses)
            )
            frequencies[name] = fault.frequency
            failures[name] = None
        except DscError as exc:
            frequencies[name] = None
            failures[name] = exc.code

    evaluate("raw", signal)

    spec = magnitude(stft(signal, config.stft))
    for name, func in SELECTOR_FUNCS.items():
        curve = func(spec)
        evaluate(name, selector_filter(signal, curve, config.stft))

    if analysis is None:
        analysis = analyze_signal(signal, config)
    envsi_values["dsc_class2"] = analysis.envsi_values["class2"]
    frequencies["dsc_class2"] = None if analysis.fault is None else analysis.fault.frequency
    failures["dsc_class2"] = analysis.failure

    return SelectorComparison(
        envsi_values, frequencies, failures, time.perf_counter() - start
    )
