"""Oracle time-frequency masks and their application.

The ratio masks act separately on the real and imaginary parts::

    S_hat = MR * Re(Y) + 1j * MI * Im(Y)

The same oracle values serve the spectrogram-domain (cRM) and the
consistent time-domain (CSM) setups; the two differ only in the objective
a mask estimator is trained or fit against.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from csmask.errors import InvalidParams, ShapeMismatch
from csmask.stft import Spectrogram, require_compatible

DEFAULT_EPS = 1e-12
DEFAULT_CLIP = 10.0


@dataclass(frozen=True, eq=False)
class MaskPair:
    """Real-part and imaginary-part masks, each ``(T, F)``.

    ``n_clipped`` counts entries (over both masks) that hit ``clip_bound``
    when the pair was produced by an oracle.
    """

    mr: np.ndarray
    mi: np.ndarray
    clip_bound: float = DEFAULT_CLIP
    n_clipped: int = 0

    def __post_init__(self):
        mr = np.asarray(self.mr, dtype=np.float64)
        mi = np.asarray(self.mi, dtype=np.float64)
        if mr.shape != mi.shape or mr.ndim != 2:
            raise ShapeMismatch(f"mask shapes differ or are not 2-D: {mr.shape} vs {mi.shape}")
        if self.clip_bound <= 0:
            raise InvalidParams("clip_bound must be positive")
        object.__setattr__(self, "mr", mr)
        object.__setattr__(self, "mi", mi)

    @property
    def shape(self):
        return self.mr.shape

    @property
    def clipped_fraction(self) -> float:
        return self.n_clipped / (2 * self.mr.size)

    def clipped(self) -> "MaskPair":
        k = self.clip_bound
        return MaskPair(np.clip(self.mr, -k, k), np.clip(self.mi, -k, k), k, self.n_clipped)


@dataclass(frozen=True, eq=False)
class MagnitudeMask:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        if m.ndim != 2:
            raise ShapeMismatch(f"magnitude mask must be 2-D, got {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0) or np.any(m > 1):
            raise InvalidParams("magnitude mask entries must lie in [0, 1]")
        object.__setattr__(self, "m", m)

    @property
    def shape(self):
        return self.m.shape


def _guarded_ratio(num, den, eps):
    # sign(0) taken as +1 so a zero denominator becomes +eps
    sign = np.where(den < 0, -1.0, 1.0)
    return num / (sign * np.maximum(np.abs(den), eps))


def oracle_ratio_masks(S: Spectrogram, Y: Spectrogram, eps: float = DEFAULT_EPS,
                       K: float = DEFAULT_CLIP) -> MaskPair:
    """Componentwise clean/noisy ratios ``Re S / Re Y`` and ``Im S / Im Y``.

    Denominators smaller than ``eps`` in magnitude are replaced by
    ``+-eps``; results are clipped to ``[-K, K]``.
    """
    require_compatible(S, Y)
    if eps <= 0 or K <= 0:
        raise InvalidParams("eps and K must be positive")
    mr = _guarded_ratio(S.real, Y.real, eps)
    mi = _guarded_ratio(S.imag, Y.imag, eps)
    n_clipped = int(np.count_nonzero(np.abs(mr) > K) + np.count_nonzero(np.abs(mi) > K))
    return MaskPair(np.clip(mr, -K, K), np.clip(mi, -K, K), K, n_clipped)


def oracle_irm(S: Spectrogram, N_sp: Spectrogram) -> MagnitudeMask:
    """Square-root ideal ratio mask ``sqrt(|S|^2 / (|S|^2 + |N|^2))``; 0/0 gives 0."""
    require_compatible(S, N_sp)
    ps = np.abs(S.data) ** 2
    pn = np.abs(N_sp.data) ** 2
    total = ps + pn
    ratio = np.zeros_like(ps)
    np.divide(ps, total, out=ratio, where=total > 0)
    return MagnitudeMask(np.sqrt(ratio))


def apply_mask(Y: Spectrogram, M: MaskPair) -> Spectrogram:
    if M.shape != Y.shape:
        raise ShapeMismatch(f"mask {M.shape} does not match spectrogram {Y.shape}")
    return Y.with_data(M.mr * Y.real + 1j * (M.mi * Y.imag))


def apply_magnitude_mask(Y: Spectrogram, m: MagnitudeMask) -> Spectrogram:
    """Scale the noisy magnitude and keep the noisy phase."""
    if m.shape != Y.shape:
        raise ShapeMismatch(f"mask {m.shape} does not match spectrogram {Y.shape}")
    # m * |Y| * exp(i arg Y) == m * Y, including bins where Y == 0
    return Y.with_data(m.m * Y.data)
