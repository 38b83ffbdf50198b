"""Short-time Fourier analysis and synthesis with explicit DFT kernels.

Forward transform of frame ``t``::

    S[t, f] = sum_n x_pad[t*R + n] * Wa[n] * (cos(2 pi f n / N) - i sin(2 pi f n / N))

for the one-sided bins ``f = 0 .. N/2``. Synthesis expands the one-sided
bins with conjugate symmetry, multiplies by the canonical dual window
``Ws[n] = Wa[n] / sum_m Wa[n - mR]**2`` and overlap-adds at hop ``R``.

Signals are zero padded by ``N - R`` samples on both sides (then up to a
whole number of frames), so every original sample is covered by the full
set of overlapping frames and ``istft(stft(x)) == x`` up to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from csmask import ola
from csmask.errors import (
    ColaViolation,
    InvalidParams,
    LengthMismatch,
    MissingLength,
    ShapeMismatch,
)
from csmask.signal_io import Waveform

WINDOW_KINDS = ("hann_periodic", "rectangular")
ENGINES = ("kernel", "fft")
DEFAULT_FRAME_LEN = 1024
DEFAULT_HOP = 512
DEFAULT_SAMPLE_RATE = 16000
PR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DftKernel:
    """Real and imaginary DFT kernel matrices, each ``F x N``."""

    cos_kernel: np.ndarray
    sin_kernel: np.ndarray

    def analyze(self, frames: np.ndarray) -> np.ndarray:
        """Apply the kernels to windowed frames ``(T, N)`` -> complex ``(T, F)``."""
        return frames @ self.cos_kernel.T - 1j * (frames @ self.sin_kernel.T)


def _trig_tables(n: int):
    k = np.arange(n)
    cos_t = np.cos(2.0 * np.pi * k / n)
    sin_t = np.sin(2.0 * np.pi * k / n)
    # exact zeros at multiples of pi/2; the smallest genuine |sin| is ~2*pi/n
    cos_t[np.abs(cos_t) < 1e-14] = 0.0
    sin_t[np.abs(sin_t) < 1e-14] = 0.0
    return cos_t, sin_t


def make_dft_kernel(frame_len: int) -> DftKernel:
    n_bins = frame_len // 2 + 1
    cos_t, sin_t = _trig_tables(frame_len)
    # reduce f*n modulo N so large products keep full precision
    idx = np.outer(np.arange(n_bins), np.arange(frame_len)) % frame_len
    return DftKernel(cos_t[idx], sin_t[idx])


def make_window(kind: str, frame_len: int) -> np.ndarray:
    if kind == "hann_periodic":
        n = np.arange(frame_len)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / frame_len)
    if kind == "rectangular":
        return np.ones(frame_len)
    raise InvalidParams(f"unknown window kind {kind!r}; choose from {WINDOW_KINDS}")


def overlap_energy(window: np.ndarray, hop: int) -> np.ndarray:
    """``sum_m window[k + m*hop]**2`` for each residue ``k`` in ``[0, hop)``."""
    n = window.shape[0]
    pad = (-n) % hop
    folded = np.concatenate([window ** 2, np.zeros(pad)]).reshape(-1, hop)
    return folded.sum(axis=0)


def canonical_dual(window: np.ndarray, hop: int) -> np.ndarray:
    denom = overlap_energy(window, hop)
    denom_full = denom[np.arange(window.shape[0]) % hop]
    out = np.zeros_like(window)
    np.divide(window, denom_full, out=out, where=denom_full > 0)
    return out


def reconstruction_sum(analysis: np.ndarray, synthesis: np.ndarray, hop: int) -> np.ndarray:
    """``sum_m Wa[k + m*hop] * Ws[k + m*hop]`` for each residue ``k``."""
    n = analysis.shape[0]
    pad = (-n) % hop
    prod = np.concatenate([analysis * synthesis, np.zeros(pad)]).reshape(-1, hop)
    return prod.sum(axis=0)


@dataclass(frozen=True, eq=False)
class StftConfig:
    frame_len: int
    hop: int
    window_kind: str
    analysis_window: np.ndarray
    synthesis_window: np.ndarray
    engine: str = "kernel"

    @property
    def n_bins(self) -> int:
        return self.frame_len // 2 + 1

    @property
    def edge_pad(self) -> int:
        return self.frame_len - self.hop

    @cached_property
    def kernel(self) -> DftKernel:
        return make_dft_kernel(self.frame_len)

    @cached_property
    def bin_weights(self) -> np.ndarray:
        """One-sided symmetry weights: 1 at DC and Nyquist, 2 elsewhere."""
        w = np.full(self.n_bins, 2.0)
        w[0] = w[-1] = 1.0
        return w

    def _key(self):
        return (self.frame_len, self.hop, self.window_kind)

    def __eq__(self, other):
        if not isinstance(other, StftConfig):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"StftConfig(frame_len={self.frame_len}, hop={self.hop}, "
                f"window_kind={self.window_kind!r}, engine={self.engine!r})")

    def _dft(self, frames: np.ndarray) -> np.ndarray:
        if self.engine == "fft":
            return np.fft.rfft(frames, axis=1)
        return self.kernel.analyze(frames)

    def _idft_weighted(self, data: np.ndarray) -> np.ndarray:
        """Real frames from one-sided bins (conjugate-symmetric expansion)."""
        if self.engine == "fft":
            # irfft drops the imaginary parts of DC and Nyquist, as the kernels do
            return np.fft.irfft(data, n=self.frame_len, axis=1)
        k = self.kernel
        w = self.bin_weights / self.frame_len
        return (data.real * w) @ k.cos_kernel - (data.imag * w) @ k.sin_kernel


def make_config(frame_len: int = DEFAULT_FRAME_LEN, hop: int = DEFAULT_HOP,
                window_kind: str = "hann_periodic", engine: str = "kernel") -> StftConfig:
    """Build a validated configuration with the canonical dual synthesis window.

    ``engine="kernel"`` applies the explicit DFT matrices; ``"fft"`` computes
    the same transform with numpy's FFT (agreement is covered by tests).

    Raises ``ColaViolation`` when the overlap-added window energy vanishes
    somewhere, i.e. no synthesis window can reconstruct the signal.
    """
    if engine not in ENGINES:
        raise InvalidParams(f"unknown engine {engine!r}; choose from {ENGINES}")
    if int(frame_len) != frame_len or int(hop) != hop:
        raise InvalidParams("frame_len and hop must be integers")
    frame_len, hop = int(frame_len), int(hop)
    if frame_len < 2 or frame_len % 2:
        raise InvalidParams(f"frame_len must be even and >= 2, got {frame_len}")
    if not 0 < hop <= frame_len:
        raise InvalidParams(f"need 0 < hop <= frame_len, got hop={hop}")
    analysis = make_window(window_kind, frame_len)
    synthesis = canonical_dual(analysis, hop)
    pr = reconstruction_sum(analysis, synthesis, hop)
    worst = float(np.max(np.abs(pr - 1.0)))
    if worst > PR_TOLERANCE:
        raise ColaViolation(
            f"perfect reconstruction fails for N={frame_len}, R={hop}, {window_kind}: "
            f"max |sum Wa*Ws - 1| = {worst:.3g}"
        )
    analysis.setflags(write=False)
    synthesis.setflags(write=False)
    return StftConfig(frame_len, hop, window_kind, analysis, synthesis, engine)


class FramePadding(NamedTuple):
    pad_left: int
    pad_right: int
    padded_len: int
    n_frames: int


def frame_geometry(length: int, frame_len: int, hop: int) -> FramePadding:
    """Padding and frame count for a signal of ``length`` samples."""
    if length < 1:
        raise InvalidParams("signal must be non-empty")
    edge = frame_len - hop
    base = length + 2 * edge
    n_frames = max(1, -(-(base - frame_len) // hop) + 1)
    padded = frame_len + (n_frames - 1) * hop
    return FramePadding(edge, padded - length - edge, padded, n_frames)


def frame_count(length: int, c: StftConfig) -> int:
    return frame_geometry(length, c.frame_len, c.hop).n_frames


def max_length_for_frames(n_frames: int, c: StftConfig) -> int:
    """Longest signal whose framing yields exactly ``n_frames`` frames."""
    length = (n_frames + 1) * c.hop - c.frame_len
    if length < 1 or frame_count(length, c) != n_frames:
        raise InvalidParams(f"no signal length gives {n_frames} frames for {c}")
    return length


def frame_signal(w, c: StftConfig):
    """Pad and cut a signal into raw (unwindowed) frames.

    Returns ``(frames, padding)`` with ``frames`` of shape ``(T, N)``.
    """
    x = _samples(w)
    geo = frame_geometry(x.shape[0], c.frame_len, c.hop)
    padded = np.concatenate([np.zeros(geo.pad_left), x, np.zeros(geo.pad_right)])
    frames = ola.frame_windowed(padded, np.ones(c.frame_len), c.hop, geo.n_frames)
    return frames, geo


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """One-sided complex spectrogram ``(T, F)`` tied to its configuration."""

    data: np.ndarray
    config: StftConfig
    orig_len: int | None = None
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] != self.config.n_bins:
            raise ShapeMismatch(
                f"spectrogram data must be (T>=1, {self.config.n_bins}), got {data.shape}"
            )
        object.__setattr__(self, "data", data)

    @property
    def shape(self):
        return self.data.shape

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def real(self) -> np.ndarray:
        return self.data.real

    @property
    def imag(self) -> np.ndarray:
        return self.data.imag

    def with_data(self, data) -> "Spectrogram":
        return Spectrogram(data, self.config, self.orig_len, self.sample_rate)


def require_compatible(*specs: Spectrogram) -> None:
    first = specs[0]
    for s in specs[1:]:
        if s.config != first.config or s.shape != first.shape:
            raise ShapeMismatch(f"spectrograms differ: {first.shape} {first.config} vs {s.shape} {s.config}")


def _samples(w) -> np.ndarray:
    if isinstance(w, Waveform):
        return w.samples
    return np.asarray(w, dtype=np.float64)


# Array-level transforms. The optimizers call these directly in their loops.

def analyze(x: np.ndarray, c: StftConfig) -> np.ndarray:
    geo = frame_geometry(x.shape[0], c.frame_len, c.hop)
    padded = np.concatenate([np.zeros(geo.pad_left), x, np.zeros(geo.pad_right)])
    frames = ola.frame_windowed(padded, c.analysis_window, c.hop, geo.n_frames)
    return c._dft(frames)


def synthesize(data: np.ndarray, c: StftConfig, length: int) -> np.ndarray:
    frames = c._idft_weighted(data)
    buf = ola.overlap_add_windowed(frames, c.synthesis_window, c.hop)
    start = c.edge_pad
    out = buf[start:start + length]
    if out.shape[0] < length:
        out = np.concatenate([out, np.zeros(length - out.shape[0])])
    return out


def synthesize_adjoint(y: np.ndarray, c: StftConfig, n_frames: int) -> np.ndarray:
    padded_len = c.frame_len + (n_frames - 1) * c.hop
    buf = np.zeros(padded_len)
    start = c.edge_pad
    keep = max(0, min(y.shape[0], padded_len - start))
    buf[start:start + keep] = y[:keep]
    frames = ola.frame_windowed(buf, c.synthesis_window, c.hop, n_frames)
    return c._dft(frames) * (c.bin_weights / c.frame_len)


# Public, typed operations.

def dft_kernels(c: StftConfig) -> DftKernel:
    return c.kernel


def stft(w, c: StftConfig) -> Spectrogram:
    """Forward transform of a waveform (or 1-D array) under ``c``."""
    x = _samples(w)
    if x.ndim != 1 or x.shape[0] == 0:
        raise InvalidParams("stft needs a non-empty 1-D signal")
    rate = w.sample_rate if isinstance(w, Waveform) else DEFAULT_SAMPLE_RATE
    return Spectrogram(analyze(x, c), c, x.shape[0], rate)


def istft(S: Spectrogram, length: int | None = None) -> Waveform:
    """Inverse transform; output length is ``length`` or ``S.orig_len``.

    Imaginary parts of the DC and Nyquist bins are ignored, as the
    conjugate-symmetric expansion of a real signal has none.
    """
    target = length if length is not None else S.orig_len
    if target is None:
        raise MissingLength("spectrogram has no recorded length; pass length=")
    return Waveform(synthesize(S.data, S.config, int(target)), S.sample_rate)


def istft_adjoint(w, c: StftConfig, n_frames: int) -> Spectrogram:
    """Adjoint of ``S -> istft(S, len(w))`` under the real inner product.

    Complex entries are treated as pairs of reals, so
    ``<istft(S), w> == sum(Re S * Re G + Im S * Im G)`` with ``G`` the result.
    ``len(w)`` must be a signal length that frames into ``n_frames`` frames.
    """
    y = _samples(w)
    if y.ndim != 1 or y.shape[0] == 0 or frame_count(y.shape[0], c) != n_frames:
        raise LengthMismatch(
            f"a signal of {y.shape[0]} samples does not frame into {n_frames} frames under {c}"
        )
    rate = w.sample_rate if isinstance(w, Waveform) else DEFAULT_SAMPLE_RATE
    return Spectrogram(synthesize_adjoint(y, c, n_frames), c, y.shape[0], rate)
