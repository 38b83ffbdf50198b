import numpy as np
import pytest

from csmask.errors import DegenerateSignal, InvalidFrequency, InvalidParams, NoiseTooShort, RateMismatch
from csmask.mixer import SNR_GRID_DB, gen_sine, gen_white_noise, mean_power, mix_at_snr, uniform_stream
from csmask.signal_io import Waveform


def test_uniform_stream_frozen():
    np.testing.assert_array_equal(
        uniform_stream(0, 3), [0.6369616873214543, 0.2697867137638703, 0.04097352393619469])


def test_white_noise_frozen():
    w = gen_white_noise(3 / 16000, 16000, seed=7)
    np.testing.assert_array_equal(w.samples, [0.25019093320933394, 0.794427601939151, 0.551371380490387])


def test_white_noise_range_and_length():
    w = gen_white_noise(1.0, 16000, seed=1, amplitude=0.25)
    assert len(w) == 16000 and w.sample_rate == 16000
    assert w.samples.min() >= -0.25 and w.samples.max() < 0.25
    # uniform on [-a, a) has power a^2 / 3
    assert mean_power(w.samples) == pytest.approx(0.25 ** 2 / 3, rel=0.03)


def test_distinct_seeds_differ():
    a = gen_white_noise(1.0, seed=0).samples
    b = gen_white_noise(1.0, seed=1).samples
    assert np.mean(a != b) > 0.99
    np.testing.assert_array_equal(a, gen_white_noise(1.0, seed=0).samples)


def test_sine_values():
    w = gen_sine(4000, 4 / 16000, 16000)
    np.testing.assert_allclose(w.samples, [0, 1, 0, -1], atol=1e-15)
    w = gen_sine(440, 1.0, 16000, amplitude=0.5, phase=np.pi / 2)
    assert w.samples[0] == pytest.approx(0.5)
    assert len(w) == 16000


def test_sine_long_phase_exact():
    # period of 40 samples: sample 10^6 + k must equal sample k
    w = gen_sine(400, 70.0, 16000).samples
    np.testing.assert_array_equal(w[1_000_000:1_000_040], w[:40])


@pytest.mark.parametrize("freq", [0, -5, 8000, 9000])
def test_sine_invalid_frequency(freq):
    with pytest.raises(InvalidFrequency):
        gen_sine(freq, 1.0, 16000)


@pytest.mark.parametrize("snr", SNR_GRID_DB)
@pytest.mark.parametrize("seed", [0, 5])
def test_mix_hits_snr(snr, seed):
    clean = gen_sine(440, 1.0, amplitude=0.5)
    noise = gen_white_noise(1.5, seed=seed)
    mix = mix_at_snr(clean, noise, snr, offset=123, seed=seed)
    assert abs(mix.achieved_snr_db - snr) <= 1e-9
    measured = 10 * np.log10(mean_power(clean.samples) / mean_power(mix.scaled_noise.samples))
    assert abs(measured - snr) <= 1e-9
    np.testing.assert_allclose(mix.noisy.samples, clean.samples + mix.scaled_noise.samples, rtol=0, atol=0)
    np.testing.assert_allclose(mix.scaled_noise.samples, mix.noise_scale * noise.samples[123:16123])
    assert mix.seed == seed


def test_mix_errors():
    clean = gen_sine(440, 1.0)
    with pytest.raises(NoiseTooShort):
        mix_at_snr(clean, gen_white_noise(0.5), 0)
    with pytest.raises(NoiseTooShort):
        mix_at_snr(clean, gen_white_noise(1.0), 0, offset=1)
    with pytest.raises(DegenerateSignal):
        mix_at_snr(Waveform(np.zeros(16000), 16000), gen_white_noise(1.0), 0)
    with pytest.raises(DegenerateSignal):
        mix_at_snr(clean, Waveform(np.zeros(16000), 16000), 0)
    with pytest.raises(RateMismatch):
        mix_at_snr(clean, gen_white_noise(1.0, 8000), 0)
    with pytest.raises(InvalidParams):
        mix_at_snr(clean, gen_white_noise(2.0), 0, offset=-1)
