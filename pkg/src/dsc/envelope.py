"""Squared envelope spectrum, the harmonic energy-ratio indicator (ENVSI) and
peak-spacing fault-frequency identification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, hilbert

from .errors import (
    HarmonicRangeError,
    InsufficientPeaksError,
    InvalidInputError,
    InvalidParameterError,
)
from .signals import Signal


@dataclass
class EnvelopeSpectrum:
    """One-sided magnitude spectrum of the mean-removed squared envelope."""

    amplitudes: np.ndarray
    freqs: np.ndarray
    source_len: int

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0])


@dataclass
class EnvsiConfig:
    """Fault frequency, number of harmonics and the per-harmonic bin tolerance."""

    fault_freq: float
    harmonics: int = 8
    tolerance_bins: int = 2

    def __post_init__(self):
        if not self.fault_freq > 0:
            raise InvalidParameterError(f"fault_freq must be > 0, got {self.fault_freq}")
        if self.harmonics < 1:
            raise InvalidParameterError(f"harmonics must be >= 1, got {self.harmonics}")
        if self.tolerance_bins < 0:
            raise InvalidParameterError(
                f"tolerance_bins must be >= 0, got {self.tolerance_bins}"
            )


def squared_envelope_spectrum(signal: Signal) -> EnvelopeSpectrum:
    """Envelope via the analytic signal, squared, mean-removed, then one-sided DFT."""
    n = len(signal)
    if n < 16:
        raise InvalidInputError(f"signal too short for envelope analysis ({n} < 16)")
    envelope = np.abs(hilbert(signal.samples))
    squared = envelope * envelope
    squared -= squared.mean()
    amplitudes = np.abs(np.fft.rfft(squared)) / n
    freqs = np.fft.rfftfreq(n, 1.0 / signal.sample_rate)
    return EnvelopeSpectrum(amplitudes, freqs, n)


def _harmonic_bins(ses: EnvelopeSpectrum, config: EnvsiConfig) -> tuple[list[int], int]:
    """Peak bin per harmonic (max within +-tolerance_bins) and the denominator cutoff."""
    df = ses.bin_width
    n_bins = ses.amplitudes.size
    tol = config.tolerance_bins
    last_center = int(round(config.harmonics * config.fault_freq / df))
    upper = last_center + tol
    if upper >= n_bins:
        raise HarmonicRangeError(
            f"harmonic {config.harmonics} x {config.fault_freq} Hz needs bin {upper}, "
            f"but the envelope spectrum has only {n_bins} bins"
        )
    chosen = []
    for i in range(1, config.harmonics + 1):
        center = int(round(i * config.fault_freq / df))
        lo = max(1, center - tol)  # never the DC bin
        hi = center + tol
        if hi < 1:
            raise HarmonicRangeError(
                f"harmonic {i} x {config.fault_freq} Hz falls below the first bin"
            )
        window = ses.amplitudes[lo:hi + 1]
        chosen.append(lo + int(np.argmax(window)))
    return chosen, upper


def envsi(ses: EnvelopeSpectrum, config: EnvsiConfig) -> float:
    """Fraction of squared envelope-spectrum energy at the fault harmonics.

    Numerator: squared amplitudes at the located harmonic bins (each bin
    counted once). Denominator: squared amplitudes over all bins from 1 up to
    the last harmonic's window; DC is excluded from both. Always in [0, 1].
    """
    chosen, upper = _harmonic_bins(ses, config)
    sq = ses.amplitudes * ses.amplitudes
    denominator = float(np.sum(sq[1:upper + 1]))
    if denominator == 0.0:
        return 0.0
    numerator = float(sum(sq[b] for b in sorted(set(chosen))))
    return numerator / denominator


@dataclass
class FaultFrequencyResult:
    frequency: float
    peak_freqs: np.ndarray
    peak_amplitudes: np.ndarray


def identify_fault_frequency(ses: EnvelopeSpectrum, prominence_fraction: float = 0.1,
                             search_band: tuple[float, float] = (0.0, 500.0),
                             ) -> FaultFrequencyResult:
    """Median spacing of prominent envelope-spectrum peaks within a band.

    Local maxima whose prominence reaches ``prominence_fraction`` of the band
    maximum qualify; the median of successive peak-frequency differences is
    returned together with the peak list.
    """
    lo, hi = search_band
    if not 0 <= lo < hi:
        raise InvalidParameterError(f"invalid search band ({lo}, {hi}]")
    if hi > ses.freqs[-1] * (1 + 1e-12):
        raise InvalidParameterError(
            f"search band upper edge {hi} Hz exceeds the spectrum range "
            f"({ses.freqs[-1]:.3f} Hz)"
        )
    in_band = (ses.freqs > lo) & (ses.freqs <= hi)
    band_max = ses.amplitudes[in_band].max(initial=0.0)
    if band_max <= 0.0:
        raise InsufficientPeaksError("envelope spectrum is empty in the search band")

    peaks, _ = find_peaks(ses.amplitudes, prominence=prominence_fraction * band_max)
    peaks = peaks[in_band[peaks]]
    if peaks.size < 3:
        raise InsufficientPeaksError(
            f"found {peaks.size} qualifying peaks in ({lo}, {hi}] Hz; need >= 3"
        )
    peak_freqs = ses.freqs[peaks]
    spacing = float(np.median(np.diff(peak_freqs)))
    return FaultFrequencyResult(spacing, peak_freqs, ses.amplitudes[peaks])
