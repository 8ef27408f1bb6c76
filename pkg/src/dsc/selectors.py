"""Informative-frequency-band selectors.

Each selector scores every spectrogram frequency bin by a statistic of its
time vector: excess kurtosis (SK), heaviness of the fitted alpha-stable tail
(Alpha) or the conditional-variance contrast between quantile slices (CV).
A selector curve can then be used as a spectral filter characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, ShapeMismatchError
from .signals import Signal
from .spectral import MagnitudeSpectrogram, StftConfig, istft, stft


@dataclass
class SelectorCurve:
    """Per-frequency-bin statistic plus flags for bins with no usable dispersion."""

    values: np.ndarray
    bin_freqs: np.ndarray
    selector_kind: str
    degenerate_bins: np.ndarray


@dataclass
class StableFit:
    """Alpha-stable parameter estimate (stability, skewness, scale, shift)."""

    alpha: float
    beta: float
    scale: float
    shift: float


def spectral_kurtosis(spec: MagnitudeSpectrogram) -> SelectorCurve:
    """Per-bin excess kurtosis of the frame values (biased moment estimators)."""
    if spec.n_frames < 8:
        raise InsufficientDataError(
            f"spectral kurtosis needs >= 8 frames, got {spec.n_frames}"
        )
    x = spec.values
    centered = x - x.mean(axis=1, keepdims=True)
    m2 = np.mean(centered ** 2, axis=1)
    m4 = np.mean(centered ** 4, axis=1)
    floor = (1e-12 * (np.abs(x).mean(axis=1) + np.finfo(float).tiny)) ** 2
    degenerate = m2 <= floor
    values = np.zeros(spec.n_bins)
    ok = ~degenerate
    values[ok] = m4[ok] / m2[ok] ** 2 - 3.0
    return SelectorCurve(values, spec.bin_freqs, "sk", degenerate)


# McCulloch's quantile-method lookup tables (J. H. McCulloch, "Simple consistent
# estimators of stable distribution parameters", 1986). Alpha/beta are read off
# the quantile ratios nu_alpha, nu_beta; scale and shift use the inverse tables
# indexed by (alpha, |beta|).

_NU_ALPHA_GRID = np.array([2.439, 2.5, 2.6, 2.7, 2.8, 3.0, 3.2, 3.5,
                           4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 25.0])
_NU_BETA_GRID = np.array([0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0])

_ALPHA_TABLE = np.array([
    [2.000, 2.000, 2.000, 2.000, 2.000, 2.000, 2.000],
    [1.916, 1.924, 1.924, 1.924, 1.924, 1.924, 1.924],
    [1.808, 1.813, 1.829, 1.829, 1.829, 1.829, 1.829],
    [1.729, 1.730, 1.737, 1.745, 1.745, 1.745, 1.745],
    [1.664, 1.663, 1.663, 1.668, 1.676, 1.676, 1.676],
    [1.563, 1.560, 1.553, 1.548, 1.547, 1.547, 1.547],
    [1.484, 1.480, 1.471, 1.460, 1.448, 1.438, 1.438],
    [1.391, 1.386, 1.378, 1.364, 1.337, 1.318, 1.318],
    [1.279, 1.273, 1.266, 1.250, 1.210, 1.184, 1.150],
    [1.128, 1.121, 1.114, 1.101, 1.067, 1.027, 0.973],
    [1.029, 1.021, 1.014, 1.004, 0.974, 0.935, 0.874],
    [0.896, 0.892, 0.884, 0.883, 0.855, 0.823, 0.769],
    [0.818, 0.812, 0.806, 0.801, 0.780, 0.756, 0.691],
    [0.698, 0.695, 0.692, 0.689, 0.676, 0.656, 0.597],
    [0.593, 0.590, 0.588, 0.586, 0.579, 0.563, 0.513],
])

_BETA_TABLE = np.array([
    [0.0, 2.160, 1.000, 1.000, 1.000, 1.000, 1.000],
    [0.0, 1.592, 3.390, 1.000, 1.000, 1.000, 1.000],
    [0.0, 0.759, 1.800, 1.000, 1.000, 1.000, 1.000],
    [0.0, 0.482, 1.048, 1.694, 1.000, 1.000, 1.000],
    [0.0, 0.360, 0.760, 1.232, 2.229, 1.000, 1.000],
    [0.0, 0.253, 0.518, 0.823, 1.575, 1.000, 1.000],
    [0.0, 0.203, 0.410, 0.632, 1.244, 1.906, 1.000],
    [0.0, 0.165, 0.332, 0.499, 0.943, 1.560, 1.000],
    [0.0, 0.136, 0.271, 0.404, 0.689, 1.230, 2.195],
    [0.0, 0.109, 0.216, 0.323, 0.539, 0.827, 1.917],
    [0.0, 0.096, 0.190, 0.284, 0.472, 0.693, 1.759],
    [0.0, 0.082, 0.163, 0.243, 0.412, 0.601, 1.596],
    [0.0, 0.074, 0.147, 0.220, 0.377, 0.546, 1.482],
    [0.0, 0.064, 0.128, 0.191, 0.330, 0.478, 1.362],
    [0.0, 0.056, 0.112, 0.167, 0.285, 0.428, 1.274],
])

# rows: alpha ascending 0.5 .. 2.0; columns: |beta| in {0, 0.25, 0.5, 0.75, 1}
_ALPHA_GRID = np.arange(0.5, 2.0 + 1e-9, 0.1)
_ABS_BETA_GRID = np.array([0.0, 0.25, 0.5, 0.75, 1.0])

_SCALE_TABLE = np.array([
    [2.588, 3.073, 4.534, 6.636, 9.144],
    [2.337, 2.634, 3.542, 4.808, 6.247],
    [2.189, 2.392, 3.004, 3.844, 4.775],
    [2.098, 2.244, 2.676, 3.265, 3.912],
    [2.040, 2.149, 2.461, 2.886, 3.356],
    [2.000, 2.085, 2.311, 2.624, 2.973],
    [1.980, 2.040, 2.205, 2.435, 2.696],
    [1.965, 2.007, 2.125, 2.294, 2.491],
    [1.955, 1.984, 2.067, 2.188, 2.333],
    [1.946, 1.967, 2.022, 2.106, 2.211],
    [1.939, 1.952, 1.988, 2.045, 2.116],
    [1.933, 1.940, 1.962, 1.997, 2.043],
    [1.927, 1.930, 1.943, 1.961, 1.987],
    [1.921, 1.922, 1.927, 1.936, 1.947],
    [1.914, 1.915, 1.916, 1.918, 1.921],
    [1.908, 1.908, 1.908, 1.908, 1.908],
])

_ZETA_TABLE = np.array([
    [0.0, -0.061, -0.279, -0.659, -1.198],
    [0.0, -0.078, -0.272, -0.581, -0.997],
    [0.0, -0.089, -0.262, -0.520, -0.853],
    [0.0, -0.096, -0.250, -0.469, -0.742],
    [0.0, -0.099, -0.237, -0.424, -0.652],
    [0.0, -0.098, -0.223, -0.380, -0.576],
    [0.0, -0.095, -0.208, -0.346, -0.508],
    [0.0, -0.090, -0.192, -0.310, -0.447],
    [0.0, -0.084, -0.173, -0.276, -0.390],
    [0.0, -0.075, -0.154, -0.241, -0.335],
    [0.0, -0.066, -0.134, -0.206, -0.283],
    [0.0, -0.056, -0.111, -0.170, -0.232],
    [0.0, -0.043, -0.088, -0.132, -0.179],
    [0.0, -0.030, -0.061, -0.092, -0.123],
    [0.0, -0.017, -0.032, -0.049, -0.064],
    [0.0, 0.000, 0.000, 0.000, 0.000],
])


def _bilinear(xgrid: np.ndarray, ygrid: np.ndarray, table: np.ndarray,
              x: float, y: float) -> float:
    """Bilinear lookup with clipping to the grid edges; table rows follow xgrid."""
    x = float(np.clip(x, xgrid[0], xgrid[-1]))
    y = float(np.clip(y, ygrid[0], ygrid[-1]))
    i = min(int(np.searchsorted(xgrid, x, side="right")) - 1, xgrid.size - 2)
    j = min(int(np.searchsorted(ygrid, y, side="right")) - 1, ygrid.size - 2)
    tx = (x - xgrid[i]) / (xgrid[i + 1] - xgrid[i])
    ty = (y - ygrid[j]) / (ygrid[j + 1] - ygrid[j])
    row0 = table[i, j] * (1 - ty) + table[i, j + 1] * ty
    row1 = table[i + 1, j] * (1 - ty) + table[i + 1, j + 1] * ty
    return float(row0 * (1 - tx) + row1 * tx)


def fit_alpha_stable(samples: np.ndarray) -> StableFit:
    """Quantile-based alpha-stable parameter estimate.

    Deterministic and fast: five empirical quantiles feed the published
    lookup tables. Alpha is clamped to (0, 2]; distributions whose quantile
    ratio falls below the table range are reported as Gaussian (alpha = 2,
    beta = 0).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 100:
        raise InsufficientDataError(
            f"alpha-stable fit needs >= 100 samples, got {samples.size}"
        )
    p05, p25, p50, p75, p95 = np.percentile(samples, [5, 25, 50, 75, 95])
    iqr = p75 - p25
    outer = p95 - p05
    if iqr <= 0 or outer <= 0:
        raise InvalidInputError("samples have no dispersion at the fitted quantiles")

    nu_alpha = outer / iqr
    nu_beta = (p95 + p05 - 2 * p50) / outer

    if nu_alpha < _NU_ALPHA_GRID[0]:
        alpha, beta = 2.0, 0.0
    else:
        abs_nb = abs(nu_beta)
        alpha = _bilinear(_NU_ALPHA_GRID, _NU_BETA_GRID, _ALPHA_TABLE, nu_alpha, abs_nb)
        beta = np.sign(nu_beta) * _bilinear(_NU_ALPHA_GRID, _NU_BETA_GRID, _BETA_TABLE,
                                            nu_alpha, abs_nb)
        alpha = float(np.clip(alpha, np.finfo(float).eps, 2.0))
        beta = float(np.clip(beta, -1.0, 1.0))

    scale = iqr / _bilinear(_ALPHA_GRID, _ABS_BETA_GRID, _SCALE_TABLE, alpha, abs(beta))
    zeta = p50 + scale * np.sign(beta) * _bilinear(_ALPHA_GRID, _ABS_BETA_GRID,
                                                   _ZETA_TABLE, alpha, abs(beta))
    if alpha == 1.0:
        shift = zeta
    else:
        shift = zeta - beta * scale * np.tan(np.pi * alpha / 2.0)
    return StableFit(float(alpha), float(beta), float(scale), float(shift))


def alpha_selector(spec: MagnitudeSpectrogram) -> SelectorCurve:
    """Per-bin 2 - alpha: near 0 for Gaussian-like bins, larger for impulsive ones."""
    values = np.zeros(spec.n_bins)
    degenerate = np.zeros(spec.n_bins, dtype=bool)
    for k in range(spec.n_bins):
        try:
            values[k] = 2.0 - fit_alpha_stable(spec.values[k]).alpha
        except (InvalidInputError, InsufficientDataError):
            degenerate[k] = True
    return SelectorCurve(values, spec.bin_freqs, "alpha", degenerate)


CV_QUANTILE_ORDERS = (0.004, 0.062, 0.308, 0.692, 0.938, 0.996)


def quantile_partition(values: np.ndarray) -> list[np.ndarray]:
    """Boolean masks of the seven half-open quantile slices used by the CV selector."""
    edges = np.quantile(values, CV_QUANTILE_ORDERS)
    bounds = np.concatenate(([-np.inf], edges, [np.inf]))
    return [(values > bounds[i]) & (values <= bounds[i + 1]) for i in range(7)]


def cv_selector(spec: MagnitudeSpectrogram) -> SelectorCurve:
    """Conditional-variance contrast between the three central quantile slices.

    For each bin the sample variances inside slices 3, 4 and 5 are compared;
    Gaussian-like bins give near-zero values because those slices were chosen
    to equalize their conditional variances.
    """
    t_frames = spec.n_frames
    if t_frames < 250:
        raise InsufficientDataError(
            f"conditional-variance selector needs >= 250 frames, got {t_frames}"
        )
    values = np.zeros(spec.n_bins)
    degenerate = np.zeros(spec.n_bins, dtype=bool)
    root_t = np.sqrt(t_frames)
    for k in range(spec.n_bins):
        x = spec.values[k]
        sigma = np.std(x, ddof=1)
        if sigma <= 0:
            degenerate[k] = True
            continue
        parts = quantile_partition(x)
        central = [x[parts[i]] for i in (2, 3, 4)]
        if any(c.size < 2 for c in central):
            degenerate[k] = True
            continue
        v3, v4, v5 = (np.var(c, ddof=1) for c in central)
        values[k] = ((v3 - v4) / sigma + (v5 - v4) / sigma) ** 2 * root_t
    return SelectorCurve(values, spec.bin_freqs, "cv", degenerate)


def selector_filter(signal: Signal, curve: SelectorCurve, config: StftConfig) -> Signal:
    """Filter a signal through a selector curve.

    The curve is clipped at zero and normalized to peak 1, applied per bin to
    the signal's STFT, and the result resynthesized; output length is the
    analyzable span.
    """
    if curve.values.size != config.n_bins:
        raise ShapeMismatchError(
            f"curve has {curve.values.size} bins but the STFT config produces "
            f"{config.n_bins}"
        )
    gains = np.clip(curve.values, 0.0, None)
    peak = gains.max()
    if peak > 0:
        gains = gains / peak
    spec = stft(signal, config)
    spec.values *= gains[:, None]
    return istft(spec)
