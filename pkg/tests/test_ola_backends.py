import numpy as np
import pytest

from csmask import _ola_py, ola


def test_python_backend_always_available():
    assert "python" in ola.available_backends()


def test_unknown_backend():
    with pytest.raises(ValueError):
        ola.use_backend("fortran")


@pytest.mark.parametrize("n_len,hop,n_frames", [(8, 4, 6), (1024, 512, 7), (16, 16, 3), (10, 3, 5)])
def test_backends_agree(rng, n_len, hop, n_frames):
    win = rng.random(n_len)
    x = rng.standard_normal((n_frames - 1) * hop + n_len + 3)
    frames = rng.standard_normal((n_frames, n_len))
    ref_f = _ola_py.frame_windowed(x, win, hop, n_frames)
    ref_o = _ola_py.overlap_add_windowed(frames, win, hop)
    for name in ola.available_backends():
        previous = ola.use_backend(name)
        try:
            np.testing.assert_array_equal(ola.frame_windowed(x, win, hop, n_frames), ref_f)
            np.testing.assert_array_equal(ola.overlap_add_windowed(frames, win, hop), ref_o)
        finally:
            ola.use_backend(previous)


def test_overlap_add_brute_force(backend):
    frames = np.arange(12, dtype=float).reshape(3, 4)
    win = np.array([1.0, 2.0, 3.0, 4.0])
    out = ola.overlap_add_windowed(frames, win, 2)
    expected = np.zeros(8)
    for t in range(3):
        for n in range(4):
            expected[2 * t + n] += frames[t, n] * win[n]
    np.testing.assert_array_equal(out, expected)


def test_frame_too_short(backend):
    with pytest.raises(ValueError):
        ola.frame_windowed(np.zeros(5), np.ones(4), 2, 3)


def test_adjoint_pair(backend, rng):
    # framing is the transpose of overlap-add for the same window
    win = rng.random(6)
    frames = rng.standard_normal((4, 6))
    y = rng.standard_normal(6 + 3 * 2)
    lhs = ola.overlap_add_windowed(frames, win, 2) @ y
    rhs = np.sum(frames * ola.frame_windowed(y, win, 2, 4))
    assert lhs == pytest.approx(rhs, rel=1e-13)
