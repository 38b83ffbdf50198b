# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled framing / overlap-add loops.

Must stay numerically identical to ``csmask._ola_py``: same summation order
(frame by frame, ascending sample index).
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def frame_windowed(const double[::1] x, const double[::1] window, Py_ssize_t hop,
                   Py_ssize_t n_frames):
    cdef Py_ssize_t n_len = window.shape[0]
    cdef Py_ssize_t t, n, start
    if n_frames < 1 or (n_frames - 1) * hop + n_len > x.shape[0]:
        raise ValueError("signal too short for the requested frames")
    out = np.empty((n_frames, n_len), dtype=np.float64)
    cdef double[:, ::1] o = out
    for t in range(n_frames):
        start = t * hop
        for n in range(n_len):
            o[t, n] = x[start + n] * window[n]
    return out


def overlap_add_windowed(const double[:, ::1] frames, const double[::1] window,
                         Py_ssize_t hop):
    cdef Py_ssize_t n_frames = frames.shape[0]
    cdef Py_ssize_t n_len = frames.shape[1]
    cdef Py_ssize_t t, n, start
    if window.shape[0] != n_len:
        raise ValueError("window length does not match frame length")
    out = np.zeros(n_len + (n_frames - 1) * hop, dtype=np.float64)
    cdef double[::1] o = out
    for t in range(n_frames):
        start = t * hop
        for n in range(n_len):
            o[start + n] += frames[t, n] * window[n]
    return out
