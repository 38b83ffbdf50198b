"""Backend selection for the framing / overlap-add kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback. ``use_backend`` switches at runtime (benchmarks and tests).
"""
from csmask import _ola_py

try:
    from csmask import _ola_ext
except ImportError:  # extension not compiled
    _ola_ext = None

_BACKENDS = {"python": _ola_py}
if _ola_ext is not None:
    _BACKENDS["cython"] = _ola_ext

_active = _ola_ext if _ola_ext is not None else _ola_py


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _active is _ola_ext and _ola_ext is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def frame_windowed(x, window, hop, n_frames):
    """Return ``out[t, n] = x[t*hop + n] * window[n]`` for ``t < n_frames``."""
    return _active.frame_windowed(x, window, hop, n_frames)


def overlap_add_windowed(frames, window, hop):
    """Sum ``frames[t] * window`` into a buffer at offsets ``t*hop``."""
    return _active.overlap_add_windowed(frames, window, hop)
