"""Spectrogram consistency: the projection ``C(S) = stft(istft(S))``.

``C`` resynthesizes at the spectrogram's recorded signal length and
re-analyzes with the same padding, so ``istft(stft(x)) == x`` makes it an
exact linear idempotent map. With the canonical dual synthesis window it
is the orthogonal projection onto consistent spectrograms under the
two-sided (symmetry-weighted) inner product.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from csmask.errors import InvalidMagnitude, InvalidParams, ShapeMismatch
from csmask.signal_io import Waveform
from csmask.stft import (
    DEFAULT_SAMPLE_RATE,
    Spectrogram,
    StftConfig,
    analyze,
    frame_count,
    max_length_for_frames,
    synthesize,
)

INIT_PHASES = ("zeros", "seeded_random")


def _length_for(S: Spectrogram) -> int:
    if S.orig_len is None:
        return max_length_for_frames(S.n_frames, S.config)
    if frame_count(S.orig_len, S.config) != S.n_frames:
        raise ShapeMismatch(
            f"orig_len={S.orig_len} frames into {frame_count(S.orig_len, S.config)} frames, "
            f"spectrogram has {S.n_frames}"
        )
    return S.orig_len


def project(data: np.ndarray, c: StftConfig, length: int) -> np.ndarray:
    return analyze(synthesize(data, c, length), c)


def consistency_operator(S: Spectrogram) -> Spectrogram:
    """Return ``stft(istft(S))``; consistent inputs are returned unchanged."""
    length = _length_for(S)
    return Spectrogram(project(S.data, S.config, length), S.config, length, S.sample_rate)


def inconsistency(S: Spectrogram) -> float:
    """``||S - C(S)||_F / ||S||_F``, or 0 for an all-zero spectrogram."""
    norm = np.linalg.norm(S.data)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(S.data - consistency_operator(S).data) / norm)


def weighted_norm(data: np.ndarray, c: StftConfig) -> float:
    """Frobenius norm of the equivalent two-sided spectrogram."""
    return float(np.sqrt(np.sum(c.bin_weights * np.abs(data) ** 2)))


@dataclass
class GriffinLimTrace:
    iteration: list = field(default_factory=list)
    magnitude_error: list = field(default_factory=list)
    inconsistency: list = field(default_factory=list)

    def append(self, it, mag_err, incons):
        self.iteration.append(it)
        self.magnitude_error.append(mag_err)
        self.inconsistency.append(incons)

    def rows(self):
        return list(zip(self.iteration, self.magnitude_error, self.inconsistency))

    def __len__(self):
        return len(self.iteration)


def _unit_phase(z: np.ndarray) -> np.ndarray:
    mag = np.abs(z)
    out = np.ones_like(z)
    np.divide(z, mag, out=out, where=mag > 0)
    return out


def griffin_lim(magnitude, c: StftConfig, iters: int, init_phase: str = "zeros",
                seed: int = 0, length: int | None = None,
                sample_rate: int = DEFAULT_SAMPLE_RATE):
    """Recover a signal whose STFT magnitude approximates ``magnitude``.

    Each iteration keeps the target magnitude and takes the phase of the
    projected spectrogram ``C(S_k)``; zero bins get phase 0. The recorded
    magnitude error is ``|| |C(S_k)| - A || / ||A||`` in the symmetry-weighted
    norm, which the iteration never increases.

    Returns ``(waveform, trace)`` where the trace has ``iters + 1`` rows.
    """
    A = np.asarray(magnitude, dtype=np.float64)
    if A.ndim != 2 or A.shape[1] != c.n_bins:
        raise ShapeMismatch(f"magnitude must be (T, {c.n_bins}), got {A.shape}")
    if np.any(A < 0) or not np.all(np.isfinite(A)):
        raise InvalidMagnitude("magnitude must be finite and nonnegative")
    if iters < 0:
        raise InvalidParams("iters must be >= 0")
    if init_phase not in INIT_PHASES:
        raise InvalidParams(f"init_phase must be one of {INIT_PHASES}")
    n_frames = A.shape[0]
    if length is None:
        length = max_length_for_frames(n_frames, c)
    elif frame_count(length, c) != n_frames:
        raise ShapeMismatch(f"length {length} does not frame into {n_frames} frames")

    if init_phase == "zeros":
        S = A.astype(np.complex128)
    else:
        rng = np.random.default_rng(seed)
        S = A * np.exp(2j * np.pi * rng.random(A.shape))

    a_norm = weighted_norm(A, c)
    trace = GriffinLimTrace()
    for k in range(iters + 1):
        CS = project(S, c, length)
        if a_norm == 0.0:
            mag_err = 0.0
        else:
            mag_err = weighted_norm(np.abs(CS) - A, c) / a_norm
        s_norm = np.linalg.norm(S)
        incons = 0.0 if s_norm == 0 else float(np.linalg.norm(S - CS) / s_norm)
        trace.append(k, mag_err, incons)
        if k < iters:
            S = A * _unit_phase(CS)

    wave = Waveform(synthesize(S, c, length), sample_rate)
    return wave, trace
