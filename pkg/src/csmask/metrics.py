"""Objective quality measures for enhanced signals."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from csmask.consistency import inconsistency
from csmask.errors import DegenerateReference, LengthMismatch, NoValidFrames
from csmask.signal_io import Waveform, require_same_rate
from csmask.stft import Spectrogram, require_compatible

SNR_CAP_DB = 300.0


def _pair(ref, est):
    if isinstance(ref, Waveform) and isinstance(est, Waveform):
        require_same_rate(ref, est)
    r = ref.samples if isinstance(ref, Waveform) else np.asarray(ref, dtype=np.float64)
    e = est.samples if isinstance(est, Waveform) else np.asarray(est, dtype=np.float64)
    if r.shape != e.shape:
        raise LengthMismatch(f"reference has {r.shape[0]} samples, estimate {e.shape[0]}")
    return r, e


def snr_db(ref, est) -> float:
    """``10 log10(||ref||^2 / ||ref - est||^2)``, capped at 300 dB for exact matches."""
    r, e = _pair(ref, est)
    p_ref = float(np.sum(r ** 2))
    if p_ref == 0.0:
        raise DegenerateReference("reference has zero power")
    p_err = float(np.sum((r - e) ** 2))
    if p_err == 0.0:
        return SNR_CAP_DB
    return float(min(SNR_CAP_DB, 10.0 * np.log10(p_ref / p_err)))


def segmental_snr(ref, est, frame_len: int = 256, hop: int = 128,
                  floor: float = -10.0, ceil: float = 35.0) -> float:
    """Mean of per-frame SNRs clamped to ``[floor, ceil]``.

    Frames where the reference is silent are skipped.
    """
    r, e = _pair(ref, est)
    if r.shape[0] < frame_len:
        raise NoValidFrames(f"signal shorter than one frame ({frame_len} samples)")
    n_frames = (r.shape[0] - frame_len) // hop + 1
    starts = np.arange(n_frames) * hop
    idx = starts[:, None] + np.arange(frame_len)
    p_ref = np.sum(r[idx] ** 2, axis=1)
    p_err = np.sum((r[idx] - e[idx]) ** 2, axis=1)
    valid = p_ref > 0
    if not np.any(valid):
        raise NoValidFrames("reference is silent in every frame")
    p_ref, p_err = p_ref[valid], p_err[valid]
    with np.errstate(divide="ignore"):
        seg = np.where(p_err > 0, 10.0 * np.log10(p_ref / np.where(p_err > 0, p_err, 1.0)), ceil)
    return float(np.mean(np.clip(seg, floor, ceil)))


def spectrogram_distance(S1: Spectrogram, S2: Spectrogram) -> float:
    """Frobenius distance of the two-sided spectrograms (one-sided bins weighted)."""
    require_compatible(S1, S2)
    w = S1.config.bin_weights
    return float(np.sqrt(np.sum(w * np.abs(S1.data - S2.data) ** 2)))


@dataclass(frozen=True)
class EvalReport:
    snr_db: float
    seg_snr_db: float
    spec_dist: float
    inconsistency: float
    n_samples: int

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self, header: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.field_names())
        writer.writerow([getattr(self, name) for name in self.field_names()])
        return buf.getvalue()


def evaluate(clean: Waveform, enhanced: Waveform, S_hat: Spectrogram,
             S_clean: Spectrogram) -> EvalReport:
    """Report for an enhanced signal and the spectrogram it was resynthesized from."""
    return EvalReport(
        snr_db=snr_db(clean, enhanced),
        seg_snr_db=segmental_snr(clean, enhanced),
        spec_dist=spectrogram_distance(S_hat, S_clean),
        inconsistency=inconsistency(S_hat),
        n_samples=len(clean),
    )
