"""Pure numpy framing / overlap-add, used when the extension is not built."""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def frame_windowed(x, window, hop, n_frames):
    x = np.ascontiguousarray(x, dtype=np.float64)
    window = np.ascontiguousarray(window, dtype=np.float64)
    n_len = window.shape[0]
    if n_frames < 1 or (n_frames - 1) * hop + n_len > x.shape[0]:
        raise ValueError("signal too short for the requested frames")
    view = sliding_window_view(x, n_len)[::hop][:n_frames]
    return view * window


def overlap_add_windowed(frames, window, hop):
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    window = np.ascontiguousarray(window, dtype=np.float64)
    n_frames, n_len = frames.shape
    if window.shape[0] != n_len:
        raise ValueError("window length does not match frame length")
    out = np.zeros(n_len + (n_frames - 1) * hop, dtype=np.float64)
    weighted = frames * window
    for t in range(n_frames):
        out[t * hop:t * hop + n_len] += weighted[t]
    return out
