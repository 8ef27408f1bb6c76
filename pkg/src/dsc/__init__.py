"""Double spectral clustering toolkit.

Separates acoustic/vibration signals into random wideband impulses, a cyclic
fault signature and background noise by clustering spectrogram frames twice
with DBSCAN, then scores the recovered fault component with envelope-spectrum
indicators.
"""

from .clustering import (
    ClassPartition,
    DbscanParams,
    DistanceMatrix,
    EpsilonEstimate,
    FrameLabels,
    dbscan,
    dsc_partition,
    estimate_epsilon,
    frame_distribution_matrix,
    pairwise_distances,
)
from .envelope import (
    EnvelopeSpectrum,
    EnvsiConfig,
    FaultFrequencyResult,
    envsi,
    identify_fault_frequency,
    squared_envelope_spectrum,
)
from .errors import DscError
from .montecarlo import MCGrid, MCReport, run_cell, run_grid, summarize
from .pipeline import AnalysisConfig, AnalysisResult, analyze_signal, compare_selectors
from .selectors import (
    SelectorCurve,
    StableFit,
    alpha_selector,
    cv_selector,
    fit_alpha_stable,
    selector_filter,
    spectral_kurtosis,
)
from .signals import (
    GaussParams,
    ImpulseNoiseParams,
    Signal,
    SimulationParams,
    SoiParams,
    compose,
    gen_gaussian,
    gen_noncyclic,
    gen_soi,
    simulate,
)
from .spectral import (
    ComplexSpectrogram,
    GriffinLimResult,
    MagnitudeSpectrogram,
    StftConfig,
    griffin_lim,
    istft,
    magnitude,
    stft,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig", "AnalysisResult", "ClassPartition", "ComplexSpectrogram",
    "DbscanParams", "DistanceMatrix", "DscError", "EnvelopeSpectrum", "EnvsiConfig",
    "EpsilonEstimate", "FaultFrequencyResult", "FrameLabels", "GaussParams",
    "GriffinLimResult", "ImpulseNoiseParams", "MCGrid", "MCReport",
    "MagnitudeSpectrogram", "SelectorCurve", "Signal", "SimulationParams",
    "SoiParams", "StableFit", "StftConfig", "alpha_selector", "analyze_signal",
    "compare_selectors", "compose", "cv_selector", "dbscan", "dsc_partition",
    "envsi", "estimate_epsilon", "fit_alpha_stable", "gen_gaussian", "gen_noncyclic",
    "gen_soi", "griffin_lim", "identify_fault_frequency", "istft", "magnitude",
    "pairwise_distances", "run_cell", "run_grid", "selector_filter", "simulate",
    "spectral_kurtosis", "squared_envelope_spectrum", "stft", "summarize",
]
