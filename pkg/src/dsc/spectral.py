"""Short-time Fourier analysis: STFT, magnitude spectrogram, overlap-add
inverse and Griffin-Lim phase reconstruction.

Frames are taken fully inside the signal (no padding), so a signal of N
samples yields T = floor((N - L)/hop) + 1 frames and the inverse transform
covers the analyzable span of (T - 1)*hop + L samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window

from .errors import InvalidInputError, InvalidParameterError, NonInvertibleConfigError
from .signals import Signal

_COLA_RTOL = 1e-6        # reject window/hop combos with near-zero steady-state coverage
_DEN_FLOOR_RTOL = 1e-12  # per-sample coverage below this fraction of max is left unnormalized


@dataclass
class StftConfig:
    """Analysis parameters: window length L, FFT length, fractional overlap, taper."""

    window_len: int = 256
    fft_len: int = 512
    overlap_fraction: float = 0.85
    window_shape: str = "hann"

    def __post_init__(self):
        if not 0 < self.window_len <= self.fft_len:
            raise InvalidParameterError(
                f"need 0 < window_len <= fft_len, got {self.window_len}, {self.fft_len}"
            )
        if not 0 <= self.overlap_fraction < 1:
            raise InvalidParameterError(
                f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}"
            )
        if self.hop < 1:
            raise InvalidParameterError(
                f"overlap {self.overlap_fraction} of window {self.window_len} "
                "leaves a hop below one sample"
            )

    @property
    def hop(self) -> int:
        # floor((1 - overlap) * L); the epsilon guards against cases like
        # (1 - 0.9) * 10 evaluating to 0.9999999999999998
        return int(np.floor((1.0 - self.overlap_fraction) * self.window_len + 1e-9))

    @property
    def n_bins(self) -> int:
        return self.fft_len // 2 + 1

    def window(self) -> np.ndarray:
        return get_window(self.window_shape, self.window_len, fftbins=True)

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.window_len:
            raise InvalidInputError(
                f"signal of {n_samples} samples is shorter than the window "
                f"({self.window_len})"
            )
        return (n_samples - self.window_len) // self.hop + 1

    def span(self, n_frames: int) -> int:
        """Number of samples covered by ``n_frames`` frames."""
        return (n_frames - 1) * self.hop + self.window_len


class _SpectrogramBase:
    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    @property
    def bin_freqs(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.sample_rate / self.config.fft_len

    @property
    def frame_times(self) -> np.ndarray:
        # window-center times; constant step hop/fs
        offsets = np.arange(self.n_frames) * self.config.hop
        return (offsets + self.config.window_len / 2) / self.sample_rate


@dataclass
class ComplexSpectrogram(_SpectrogramBase):
    """One-sided complex STFT matrix, frequency bins x time frames."""

    values: np.ndarray
    config: StftConfig
    sample_rate: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 2 or self.values.shape[0] != self.config.n_bins:
            raise InvalidParameterError(
                f"expected {self.config.n_bins} frequency rows, got shape "
                f"{self.values.shape}"
            )


@dataclass
class MagnitudeSpectrogram(_SpectrogramBase):
    """Non-negative magnitude matrix with the same layout as ComplexSpectrogram."""

    values: np.ndarray
    config: StftConfig
    sample_rate: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.config.n_bins:
            raise InvalidParameterError(
                f"expected {self.config.n_bins} frequency rows, got shape "
                f"{self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvalidParameterError("magnitudes must be finite and non-negative")


def _stft_array(x: np.ndarray, window: np.ndarray, hop: int, nfft: int) -> np.ndarray:
    frames = sliding_window_view(x, window.size)[::hop] * window
    return np.fft.rfft(frames, n=nfft, axis=1).T


def _check_cola(window: np.ndarray, hop: int):
    # steady-state squared-window coverage for each sample phase within a hop
    win2 = window * window
    cover = np.zeros(hop)
    for j in range(0, window.size, hop):
        chunk = win2[j:j + hop]
        cover[: chunk.size] += chunk
    if cover.min() < _COLA_RTOL * max(cover.max(), np.finfo(float).tiny):
        raise NonInvertibleConfigError(
            f"window '{window.size}-point' with hop {hop} leaves near-zero "
            "overlap-add coverage; reconstruction is not possible"
        )


def _ola_denominator(n_frames: int, window: np.ndarray, hop: int) -> np.ndarray:
    den = np.zeros((n_frames - 1) * hop + window.size)
    win2 = window * window
    for t in range(n_frames):
        den[t * hop: t * hop + window.size] += win2
    return den


def _overlap_add(frames: np.ndarray, hop: int) -> np.ndarray:
    n_frames, frame_len = frames.shape
    out = np.zeros((n_frames - 1) * hop + frame_len)
    group = -(-frame_len // hop)  # frames this far apart no longer overlap
    offsets = np.arange(frame_len)
    for r in range(min(group, n_frames)):
        starts = np.arange(r, n_frames, group) * hop
        idx = starts[:, None] + offsets[None, :]
        out[idx.ravel()] += frames[r::group].ravel()
    return out


def _istft_array(values: np.ndarray, window: np.ndarray, hop: int, nfft: int,
                 den: np.ndarray | None = None) -> np.ndarray:
    frame_len = window.size
    frames = np.fft.irfft(values.T, n=nfft, axis=1)[:, :frame_len]
    num = _overlap_add(frames * window, hop)
    if den is None:
        den = _ola_denominator(values.shape[1], window, hop)
    out = np.zeros_like(num)
    ok = den > _DEN_FLOOR_RTOL * den.max()
    out[ok] = num[ok] / den[ok]
    out[~ok] = num[~ok]
    return out


def stft(signal: Signal, config: StftConfig) -> ComplexSpectrogram:
    """One-sided windowed DFT of successive frames."""
    config.n_frames(len(signal))  # validates length >= window
    values = _stft_array(signal.samples, config.window(), config.hop, config.fft_len)
    return ComplexSpectrogram(values, config, signal.sample_rate)


def magnitude(spec: ComplexSpectrogram) -> MagnitudeSpectrogram:
    """Elementwise complex modulus."""
    return MagnitudeSpectrogram(np.abs(spec.values), spec.config, spec.sample_rate)


def istft(spec: ComplexSpectrogram) -> Signal:
    """Overlap-add synthesis with squared-window normalization.

    The result spans (T - 1)*hop + L samples; it reproduces the input of
    ``stft`` exactly on the interior where every sample is fully covered.
    """
    cfg = spec.config
    window = cfg.window()
    _check_cola(window, cfg.hop)
    out = _istft_array(spec.values, window, cfg.hop, cfg.fft_len)
    return Signal(out, spec.sample_rate)


def _residual_weights(n_bins: int, nfft: int) -> np.ndarray:
    # Frobenius norm of the two-sided STFT expressed over one-sided bins
    w = np.full(n_bins, 2.0)
    w[0] = 1.0
    if nfft % 2 == 0:
        w[-1] = 1.0
    return w


@dataclass
class GriffinLimResult:
    """Reconstructed signal plus the spectral-convergence residual per iteration."""

    signal: Signal
    residuals: np.ndarray


def griffin_lim(target: MagnitudeSpectrogram, iterations: int = 100,
                init_phase: str = "zero", seed: int | None = None,
                tol: float = 1e-6) -> GriffinLimResult:
    """Estimate a signal whose STFT magnitude approximates ``target``.

    Alternates between the overlap-add inverse (projection onto consistent
    spectrograms) and re-imposing the target magnitude. The residual
    ||  |STFT(x)| - target ||_F / || target ||_F is recorded for each iterate
    and is non-increasing; iteration stops early once the improvement drops
    below ``tol``.
    """
    if iterations < 1:
        raise InvalidParameterError(f"iterations must be >= 1, got {iterations}")
    if init_phase not in ("zero", "random"):
        raise InvalidParameterError(f"init_phase must be 'zero' or 'random', got {init_phase!r}")
    cfg = target.config
    window = cfg.window()
    hop = cfg.hop
    _check_cola(window, hop)

    amp = target.values
    weights = _residual_weights(cfg.n_bins, cfg.fft_len)[:, None]
    target_norm = np.sqrt(np.sum(weights * amp * amp))
    den = _ola_denominator(target.n_frames, window, hop)

    if target_norm == 0.0:
        zero = np.zeros(cfg.span(target.n_frames))
        return GriffinLimResult(Signal(zero, target.sample_rate), np.zeros(1))

    if init_phase == "zero":
        current = amp.astype(np.complex128)
    else:
        rng = np.random.default_rng(seed)
        current = amp * np.exp(2j * np.pi * rng.random(amp.shape))

    residuals = []
    prev = np.inf
    x = None
    for _ in range(iterations):
        x = _istft_array(current, window, hop, cfg.fft_len, den=den)
        analyzed = _stft_array(x, window, hop, cfg.fft_len)
        mag = np.abs(analyzed)
        resid = np.sqrt(np.sum(weights * (mag - amp) ** 2)) / target_norm
        residuals.append(resid)
        if prev - resid < tol:
            break
        prev = resid
        phase = np.where(mag > 0, analyzed / np.where(mag > 0, mag, 1.0), 1.0)
        current = amp * phase

    return GriffinLimResult(Signal(x, target.sample_rate), np.asarray(residuals))
