"""Noisy mixtures at exact SNRs plus deterministic test signals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from csmask.errors import DegenerateSignal, InvalidFrequency, InvalidParams, NoiseTooShort
from csmask.signal_io import Waveform, require_same_rate

SNR_GRID_DB = (-6.0, -3.0, 0.0, 3.0, 6.0)


@dataclass(frozen=True, eq=False)
class Mixture:
    noisy: Waveform
    clean: Waveform
    scaled_noise: Waveform
    target_snr_db: float
    achieved_snr_db: float
    noise_scale: float
    seed: int | None = None


def mean_power(x: np.ndarray) -> float:
    return float(np.mean(np.square(x)))


def mix_at_snr(clean: Waveform, noise: Waveform, snr_db: float, offset: int = 0,
               seed: int | None = None) -> Mixture:
    """Add ``noise[offset:offset+len(clean)]`` scaled so the mixture SNR is ``snr_db``.

    SNR is measured on full-utterance mean power. ``seed`` is carried along
    for bookkeeping only.
    """
    require_same_rate(clean, noise)
    if offset < 0:
        raise InvalidParams("offset must be >= 0")
    n = len(clean)
    if len(noise) - offset < n:
        raise NoiseTooShort(f"need {n} noise samples from offset {offset}, have {len(noise) - offset}")
    c = clean.samples
    v = noise.samples[offset:offset + n]
    p_clean = mean_power(c)
    p_noise = mean_power(v)
    if p_clean == 0.0:
        raise DegenerateSignal("clean signal has zero power")
    if p_noise == 0.0:
        raise DegenerateSignal("noise segment has zero power")
    alpha = np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0)))
    scaled = alpha * v
    achieved = 10.0 * np.log10(p_clean / mean_power(scaled))
    rate = clean.sample_rate
    return Mixture(
        noisy=Waveform(c + scaled, rate),
        clean=clean,
        scaled_noise=Waveform(scaled, rate),
        target_snr_db=float(snr_db),
        achieved_snr_db=float(achieved),
        noise_scale=float(alpha),
        seed=seed,
    )


def _n_samples(duration_s, sample_rate):
    if duration_s <= 0:
        raise InvalidParams("duration must be positive")
    if int(sample_rate) != sample_rate or sample_rate <= 0:
        raise InvalidParams("sample_rate must be a positive integer")
    return int(round(duration_s * sample_rate))


def gen_sine(freq_hz: float, duration_s: float, sample_rate: int = 16000,
             amplitude: float = 1.0, phase: float = 0.0) -> Waveform:
    if not 0 < freq_hz < sample_rate / 2:
        raise InvalidFrequency(f"need 0 < freq < {sample_rate / 2}, got {freq_hz}")
    n = np.arange(_n_samples(duration_s, sample_rate))
    # reduce freq*n modulo sample_rate first so long signals keep exact phase
    cycles = np.mod(freq_hz * n, sample_rate) / sample_rate
    return Waveform(amplitude * np.sin(2.0 * np.pi * cycles + phase), sample_rate)


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """``n`` doubles in ``[0, 1)`` from the PCG64 raw 64-bit stream.

    Uses the top 53 bits of each raw output, so the values depend only on
    the PCG64 algorithm and the seed, not on numpy's distribution code.
    """
    raw = np.random.PCG64(seed).random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def gen_white_noise(duration_s: float, sample_rate: int = 16000, seed: int = 0,
                    amplitude: float = 1.0) -> Waveform:
    """Seeded uniform white noise in ``[-amplitude, amplitude)``."""
    u = uniform_stream(seed, _n_samples(duration_s, sample_rate))
    return Waveform(amplitude * (2.0 * u - 1.0), sample_rate)
