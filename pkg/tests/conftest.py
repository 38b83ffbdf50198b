import sys
import numpy as np
import pytest

from csmask import ola
from csmask.mixer import gen_sine, gen_white_noise, mix_at_snr
from csmask.stft import Spectrogram, make_config, max_length_for_frames


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def cfg():
    return make_config(1024, 512, "hann_periodic")


@pytest.fixture(scope="session")
def small_cfg():
    return make_config(8, 4, "hann_periodic")


@pytest.fixture(params=ola.available_backends())
def backend(request):
    previous = ola.use_backend(request.param)
    yield request.param
    ola.use_backend(previous)


def random_spectrogram(rng, c, n_frames, length=None):
    length = length if length is not None else max_length_for_frames(n_frames, c)
    shape = (n_frames, c.n_bins)
    data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return Spectrogram(data, c, length)


def sine_mixture(seed=0, snr_db=0.0, duration=1.0, rate=16000):
    """440 Hz sine (amplitude 0.5) plus seeded white noise."""
    clean = gen_sine(440.0, duration, rate, amplitude=0.5)
    noise = gen_white_noise(duration, rate, seed)
    return mix_at_snr(clean, noise, snr_db, seed=seed)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[num])
