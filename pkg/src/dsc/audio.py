"""Mono WAV reading and writing (PCM 16-bit or IEEE float32)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import AudioFormatError
from .signals import Signal


def write_wav(path, signal: Signal, dtype: str = "float32"):
    """Write a mono WAV file; float32 keeps the samples bit-exact."""
    if dtype == "float32":
        data = signal.samples.astype(np.float32)
    elif dtype == "int16":
        peak = np.abs(signal.samples).max()
        if peak > 1.0:
            raise AudioFormatError(
                f"peak amplitude {peak:.3g} exceeds 1.0; int16 output would clip "
                "(use float32)"
            )
        data = np.round(signal.samples * 32767.0).astype(np.int16)
    else:
        raise AudioFormatError(f"unsupported output dtype {dtype!r}")
    wavfile.write(str(path), int(round(signal.sample_rate)), data)


def read_wav(path) -> Signal:
    """Read a mono PCM16 or float32 WAV file; int samples are scaled to [-1, 1)."""
    path = Path(path)
    try:
        rate, data = wavfile.read(str(path))
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise AudioFormatError(f"cannot read {path}: {exc}") from exc
    if data.ndim != 1:
        raise AudioFormatError(
            f"{path} has {data.shape[1]} channels; only mono files are supported"
        )
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise AudioFormatError(
            f"{path} has sample format {data.dtype}; only 16-bit PCM and 32-bit "
            "float are supported"
        )
    return Signal(samples, float(rate))
