"""Mono WAV reading/writing and the in-memory waveform type.

Amplitudes use full-scale 1.0. 16-bit PCM is scaled by 1/32768 on both
read and write, so the most positive representable value is 1 - 1/32768.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from csmask.errors import (
    InvalidWaveform,
    MalformedHeader,
    RateMismatch,
    UnsupportedChannels,
    UnsupportedEncoding,
)

PCM16_SCALE = 32768.0
PCM16_MAX = 1.0 - 1.0 / PCM16_SCALE
ENCODINGS = ("pcm16", "float32")


@dataclass(frozen=True, eq=False)
class Waveform:
    """Real mono signal with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidWaveform(f"expected 1-D samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidWaveform("samples contain NaN or Inf")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidWaveform(f"sample_rate must be a positive integer, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def with_samples(self, samples) -> "Waveform":
        return Waveform(samples, self.sample_rate)


@dataclass(frozen=True)
class WriteResult:
    path: str
    encoding: str
    n_samples: int
    n_clipped: int


def require_same_rate(*waves: Waveform) -> int:
    rates = {w.sample_rate for w in waves}
    if len(rates) != 1:
        raise RateMismatch(f"sample rates differ: {sorted(rates)}")
    return rates.pop()


def read_wav(path) -> Waveform:
    """Read a mono 16-bit PCM or 32-bit float WAV file."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    try:
        with warnings.catch_warnings():
            # scipy warns on unknown chunks (LIST, etc.); those are harmless
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except ValueError as exc:
        msg = str(exc)
        if "Unknown wave file format" in msg or "Unsupported bit depth" in msg:
            raise UnsupportedEncoding(f"{path}: {msg}") from exc
        raise MalformedHeader(f"{path}: {msg}") from exc
    except (EOFError, OSError) as exc:
        raise MalformedHeader(f"{path}: {exc}") from exc

    if data.ndim != 1:
        raise UnsupportedChannels(f"{path}: {data.shape[1]} channels, only mono is supported")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / PCM16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedEncoding(f"{path}: sample type {data.dtype} (need int16 PCM or float32)")
    return Waveform(samples, rate)


def write_wav(path, w: Waveform, encoding: str = "pcm16") -> WriteResult:
    """Write ``w`` as a mono WAV file.

    For ``pcm16`` samples are clipped to ``[-1, 1 - 1/32768]`` before
    rounding; the number of clipped samples is reported in the result.
    ``float32`` writes are exact for samples representable in single
    precision.
    """
    if encoding not in ENCODINGS:
        raise UnsupportedEncoding(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")
    samples = np.asarray(w.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise InvalidWaveform("refusing to write NaN/Inf samples")

    n_clipped = 0
    if encoding == "pcm16":
        out_of_range = (samples < -1.0) | (samples > PCM16_MAX)
        n_clipped = int(np.count_nonzero(out_of_range))
        clipped = np.clip(samples, -1.0, PCM16_MAX)
        data = np.round(clipped * PCM16_SCALE).astype(np.int16)
    else:
        data = samples.astype(np.float32)

    path = os.fspath(path)
    wavfile.write(path, w.sample_rate, data)
    return WriteResult(path, encoding, int(samples.shape[0]), n_clipped)
