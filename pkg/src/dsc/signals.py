"""Synthetic signal model: Gaussian background, random wideband impulses and a
cyclic train of decaying oscillations (the fault signature).

All generators are pure functions of (parameters, seed). The composite test
signal is the pointwise sum of the three components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, ShapeMismatchError

TWO_PI = 2.0 * np.pi


@dataclass
class Signal:
    """Uniformly sampled real-valued time series."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InvalidParameterError("signal must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidParameterError("signal contains non-finite samples")
        if not self.sample_rate > 0:
            raise InvalidParameterError(f"sample_rate must be > 0, got {self.sample_rate}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate


@dataclass
class SoiParams:
    """Cyclic impulse train: amplitude, carrier, exponential decay and repetition rate."""

    amp: float = 1.0
    carrier_freq: float = 2500.0
    decay: float = 1800.0
    mod_freq: float = 30.7

    def __post_init__(self):
        if not self.amp >= 0:
            raise InvalidParameterError(f"amp must be >= 0, got {self.amp}")
        if not self.decay > 0:
            raise InvalidParameterError(f"decay must be > 0, got {self.decay}")
        if not self.mod_freq > 0:
            raise InvalidParameterError(f"mod_freq must be > 0, got {self.mod_freq}")
        if not self.carrier_freq > 0:
            raise InvalidParameterError(f"carrier_freq must be > 0, got {self.carrier_freq}")


@dataclass
class ImpulseNoiseParams:
    """Random non-cyclic impulses drawn per sample from a trinomial event process.

    ``rate_per_second`` is the expected number of onsets per second for *each*
    of the two amplitude classes.
    """

    rate_per_second: float = 3.0
    amp_low: float = 15.0
    amp_high: float = 30.0
    carrier_freq: float = 5000.0
    decay: float = 1800.0

    def __post_init__(self):
        if not self.rate_per_second >= 0:
            raise InvalidParameterError(
                f"rate_per_second must be >= 0, got {self.rate_per_second}"
            )
        if not (0 < self.amp_low < self.amp_high):
            raise InvalidParameterError(
                f"need 0 < amp_low < amp_high, got {self.amp_low}, {self.amp_high}"
            )
        if not self.decay > 0:
            raise InvalidParameterError(f"decay must be > 0, got {self.decay}")
        if not self.carrier_freq > 0:
            raise InvalidParameterError(f"carrier_freq must be > 0, got {self.carrier_freq}")


@dataclass
class GaussParams:
    """Zero-mean Gaussian background noise; sigma is the standard deviation."""

    sigma: float = 0.6
    mean: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be > 0, got {self.sigma}")
        if self.mean != 0.0:
            raise InvalidParameterError("mean is fixed at 0")


def _impulse_template(length: int, sample_rate: float, amp: float,
                      carrier_freq: float, decay: float) -> np.ndarray:
    """Decaying harmonic oscillation h[m] = amp * sin(2*pi*fc*m/fs) * exp(-d*m/fs)."""
    t = np.arange(length) / sample_rate
    return amp * np.sin(TWO_PI * carrier_freq * t) * np.exp(-decay * t)


def gen_gaussian(length: int, sample_rate: float, params: GaussParams, seed: int) -> Signal:
    """i.i.d. zero-mean Gaussian samples with standard deviation ``params.sigma``.

    Deterministic for a fixed seed; implemented as sigma * standard_normal so the
    output is an exact scale family in sigma.
    """
    if not isinstance(length, (int, np.integer)) or length <= 0:
        raise InvalidParameterError(f"length must be a positive integer, got {length}")
    rng = np.random.default_rng(seed)
    return Signal(params.sigma * rng.standard_normal(length), sample_rate)


def soi_onset_indices(length: int, sample_rate: float, mod_freq: float) -> np.ndarray:
    """Sample indices of the cyclic impulse onsets: n/mod_freq rounded to the grid."""
    period_samples = sample_rate / mod_freq
    n_max = int(np.floor((length - 1) / period_samples)) + 1
    idx = np.round(np.arange(n_max + 1) * period_samples).astype(np.int64)
    return idx[idx < length]


def gen_soi(length: int, sample_rate: float, params: SoiParams) -> Signal:
    """Deterministic cyclic train of decaying oscillations starting at t = 0.

    Impulses repeat every 1/mod_freq seconds (onsets rounded to the sample grid);
    overlapping tails add, and tails are truncated at the signal end.
    """
    if not isinstance(length, (int, np.integer)) or length <= 0:
        raise InvalidParameterError(f"length must be a positive integer, got {length}")
    nyquist = sample_rate / 2
    if params.carrier_freq >= nyquist:
        raise InvalidParameterError(
            f"carrier_freq {params.carrier_freq} must be below Nyquist {nyquist}"
        )
    if params.mod_freq >= nyquist:
        raise InvalidParameterError(
            f"mod_freq {params.mod_freq} must be below Nyquist {nyquist}"
        )
    out = np.zeros(length)
    if params.amp == 0:
        return Signal(out, sample_rate)
    template = _impulse_template(length, sample_rate, params.amp,
                                 params.carrier_freq, params.decay)
    for start in soi_onset_indices(length, sample_rate, params.mod_freq):
        out[start:] += template[: length - start]
    return Signal(out, sample_rate)


def draw_noncyclic_onsets(length: int, sample_rate: float, params: ImpulseNoiseParams,
                          seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Trinomial per-sample draw of impulse onsets.

    Each sample independently hosts a low-amplitude onset with probability
    rate/fs, a high-amplitude onset with the same probability, or nothing.
    Returns (low_onset_indices, high_onset_indices).
    """
    if not isinstance(length, (int, np.integer)) or length <= 0:
        raise InvalidParameterError(f"length must be a positive integer, got {length}")
    p = params.rate_per_second / sample_rate
    if p >= 0.5:
        raise InvalidParameterError(
            f"rate_per_second/sample_rate = {p} >= 0.5; event probabilities exceed 1"
        )
    if p == 0:
        empty = np.array([], dtype=np.int64)
        return empty, empty
    u = np.random.default_rng(seed).random(length)
    low = np.nonzero(u < p)[0]
    high = np.nonzero((u >= p) & (u < 2 * p))[0]
    return low, high


def _synthesize_noncyclic(length: int, sample_rate: float, params: ImpulseNoiseParams,
                          low: np.ndarray, high: np.ndarray) -> Signal:
    out = np.zeros(length)
    for onsets, amp in ((low, params.amp_low), (high, params.amp_high)):
        if onsets.size == 0:
            continue
        template = _impulse_template(length, sample_rate, amp,
                                     params.carrier_freq, params.decay)
        for start in onsets:
            out[start:] += template[: length - start]
    return Signal(out, sample_rate)


def gen_noncyclic(length: int, sample_rate: float, params: ImpulseNoiseParams,
                  seed: int) -> Signal:
    """Random non-cyclic impulses: each onset spawns a decaying oscillation."""
    low, high = draw_noncyclic_onsets(length, sample_rate, params, seed)
    return _synthesize_noncyclic(length, sample_rate, params, low, high)


def compose(components: list[Signal]) -> Signal:
    """Pointwise sum of signals sharing length and sample rate."""
    if not components:
        raise InvalidParameterError("compose needs at least one component")
    first = components[0]
    for c in components[1:]:
        if len(c) != len(first):
            raise ShapeMismatchError(
                f"component lengths differ: {len(c)} vs {len(first)}"
            )
        if c.sample_rate != first.sample_rate:
            raise ShapeMismatchError(
                f"component sample rates differ: {c.sample_rate} vs {first.sample_rate}"
            )
    total = np.zeros(len(first))
    for c in components:
        total += c.samples
    return Signal(total, first.sample_rate)


@dataclass
class SimulationParams:
    """Composite test-signal recipe: background + random impulses + cyclic train."""

    sample_rate: float = 25000.0
    duration: float = 2.0
    seed: object = 0  # int, or a tuple of ints for derived seed streams
    gauss: GaussParams = field(default_factory=GaussParams)
    soi: SoiParams = field(default_factory=SoiParams)
    impulses: ImpulseNoiseParams = field(default_factory=ImpulseNoiseParams)

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise InvalidParameterError(f"sample_rate must be > 0, got {self.sample_rate}")
        if not self.duration > 0:
            raise InvalidParameterError(f"duration must be > 0, got {self.duration}")

    @property
    def length(self) -> int:
        return int(round(self.duration * self.sample_rate))


@dataclass
class SimulationOutput:
    """Composite signal plus the exact ground truth used to build it."""

    signal: Signal
    soi_onsets: np.ndarray
    low_onsets: np.ndarray
    high_onsets: np.ndarray


def simulate(params: SimulationParams) -> SimulationOutput:
    """Generate the three components and their sum, with ground-truth onsets.

    The Gaussian and impulse generators get independent child streams derived
    from ``params.seed``, so the whole output is a pure function of the recipe.
    """
    length = params.length
    fs = params.sample_rate
    gauss_seed, impulse_seed = np.random.SeedSequence(params.seed).spawn(2)
    gauss = gen_gaussian(length, fs, params.gauss, gauss_seed)
    soi = gen_soi(length, fs, params.soi)
    low, high = draw_noncyclic_onsets(length, fs, params.impulses, impulse_seed)
    impulses = _synthesize_noncyclic(length, fs, params.impulses, low, high)
    total = compose([gauss, soi, impulses])
    return SimulationOutput(
        signal=total,
        soi_onsets=soi_onset_indices(length, fs, params.soi.mod_freq),
        low_onsets=low,
        high_onsets=high,
    )
