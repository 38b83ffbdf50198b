"""Mask fitting under spectrogram-domain and time-domain objectives.

Both objectives use squared norms (exponent 2)::

    spectrogram:  || apply_mask(Y, M) - stft(x) ||^2      (two-sided norm)
    time:         || istft(apply_mask(Y, M)) - x ||^2

The time-domain objective only sees the consistent part of the masked
spectrogram, because ``istft(C(S)) == istft(S)``. Gradients are exact: the
time-domain one is pulled back through the adjoint of the synthesis.

Masks may be shared across ``block_size`` consecutive frames, which limits
the fit's capacity (a stand-in for a mask estimator that cannot reach the
oracle); gradients of shared entries are summed over their block.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from csmask.consistency import project
from csmask.errors import Divergence, InvalidParams, ShapeMismatch, UnsupportedBeta
from csmask.masking import DEFAULT_CLIP, MaskPair
from csmask.signal_io import Waveform
from csmask.stft import Spectrogram, analyze, synthesize, synthesize_adjoint

MODES = ("spectrogram", "time")
MAX_HALVINGS = 30
DIVERGENCE_FACTOR = 1e6
PRECOND_FLOOR = 1e-9


@dataclass(frozen=True)
class ObjectiveMode:
    kind: str = "time"
    beta: float = 2.0

    def __post_init__(self):
        if self.kind not in MODES:
            raise InvalidParams(f"mode must be one of {MODES}, got {self.kind!r}")
        if self.beta != 2:
            raise UnsupportedBeta(f"only beta = 2 is supported, got {self.beta}")


SPECTROGRAM_LOSS = ObjectiveMode("spectrogram")
TIME_DOMAIN_LOSS = ObjectiveMode("time")


def as_mode(mode) -> ObjectiveMode:
    if isinstance(mode, ObjectiveMode):
        return mode
    aliases = {"spec": "spectrogram", "spectrogram": "spectrogram", "time": "time"}
    if mode not in aliases:
        raise InvalidParams(f"unknown objective mode {mode!r}")
    return ObjectiveMode(aliases[mode])


@dataclass(frozen=True)
class FitOptions:
    step_size: float = 0.01
    max_iters: int = 2000
    tol: float = 1e-10
    block_size: int = 1
    init: str = "ones"
    clip_bound: float = DEFAULT_CLIP
    precondition: bool = True

    def __post_init__(self):
        if self.step_size <= 0:
            raise InvalidParams("step_size must be positive")
        if self.max_iters < 0 or self.block_size < 1 or self.tol < 0:
            raise InvalidParams("need max_iters >= 0, block_size >= 1, tol >= 0")
        if self.init not in ("ones", "zeros"):
            raise InvalidParams("init must be 'ones' or 'zeros'")
        if self.clip_bound <= 0:
            raise InvalidParams("clip_bound must be positive")


@dataclass
class ConvergenceTrace:
    loss: list = field(default_factory=list)
    time_domain_error: list = field(default_factory=list)
    inconsistency: list = field(default_factory=list)
    stop_reason: str = ""

    def append(self, loss, td_err, incons):
        self.loss.append(loss)
        self.time_domain_error.append(td_err)
        self.inconsistency.append(incons)

    def rows(self):
        return [(i, *r) for i, r in enumerate(zip(self.loss, self.time_domain_error, self.inconsistency))]

    def __len__(self):
        return len(self.loss)


class _Problem:
    """Precomputed pieces of one fitting problem."""

    def __init__(self, Y: Spectrogram, x, mode):
        self.mode = as_mode(mode)
        self.x = x.samples if isinstance(x, Waveform) else np.asarray(x, dtype=np.float64)
        self.c = Y.config
        self.Y = Y.data
        self.target = analyze(self.x, self.c)
        if self.target.shape != self.Y.shape:
            raise ShapeMismatch(
                f"noisy spectrogram {self.Y.shape} does not match stft of the clean signal {self.target.shape}"
            )
        self.w = self.c.bin_weights
        self.n_frames = self.Y.shape[0]

    def estimate(self, mr, mi):
        return mr * self.Y.real + 1j * (mi * self.Y.imag)

    def resynth(self, S_hat):
        return synthesize(S_hat, self.c, self.x.shape[0])

    def loss(self, mr, mi) -> float:
        S_hat = self.estimate(mr, mi)
        if self.mode.kind == "time":
            r = self.resynth(S_hat) - self.x
            return float(r @ r)
        return float(np.sum(self.w * np.abs(S_hat - self.target) ** 2))

    def hessian_diagonal(self):
        """Exact diagonal of the (constant) Hessian in ``(MR, MI)``."""
        yr2, yi2 = self.Y.real ** 2, self.Y.imag ** 2
        if self.mode.kind == "spectrogram":
            return 2.0 * self.w * yr2, 2.0 * self.w * yi2
        c = self.c
        N, R = c.frame_len, c.hop
        # squared norm of the resynthesized unit bin, restricted to kept samples
        pos = np.arange(self.n_frames)[:, None] * R + np.arange(N) - c.edge_pad
        keep = (pos >= 0) & (pos < self.x.shape[0])
        energy = keep * c.synthesis_window ** 2
        scale = (self.w / N) ** 2
        k = c.kernel
        d_re = (energy @ (k.cos_kernel ** 2).T) * scale
        d_im = (energy @ (k.sin_kernel ** 2).T) * scale
        return 2.0 * yr2 * d_re, 2.0 * yi2 * d_im

    def gradient(self, mr, mi):
        S_hat = self.estimate(mr, mi)
        if self.mode.kind == "time":
            r = self.resynth(S_hat) - self.x
            G = synthesize_adjoint(r, self.c, self.n_frames)
            return 2.0 * self.Y.real * G.real, 2.0 * self.Y.imag * G.imag
        D = S_hat - self.target
        return 2.0 * self.w * self.Y.real * D.real, 2.0 * self.w * self.Y.imag * D.imag


def _check_mask(M: MaskPair, Y: Spectrogram):
    if M.shape != Y.shape:
        raise ShapeMismatch(f"mask {M.shape} does not match spectrogram {Y.shape}")


def loss_value(M: MaskPair, Y: Spectrogram, x, mode) -> float:
    """Objective at the (unclipped) mask values in ``M``."""
    _check_mask(M, Y)
    return _Problem(Y, x, mode).loss(M.mr, M.mi)


def loss_gradient(M: MaskPair, Y: Spectrogram, x, mode, block_size: int = 1) -> MaskPair:
    """Exact gradient with respect to ``(MR, MI)``.

    With ``block_size > 1`` entries within each block of frames are summed
    and broadcast back, i.e. the gradient of the shared parameter.
    """
    _check_mask(M, Y)
    gr, gi = _Problem(Y, x, mode).gradient(M.mr, M.mi)
    if block_size > 1:
        T = Y.n_frames
        gr = expand_blocks(reduce_blocks(gr, block_size), block_size, T)
        gi = expand_blocks(reduce_blocks(gi, block_size), block_size, T)
    return MaskPair(gr, gi, M.clip_bound)


def reduce_blocks(g: np.ndarray, block_size: int) -> np.ndarray:
    starts = np.arange(0, g.shape[0], block_size)
    return np.add.reduceat(g, starts, axis=0)


def expand_blocks(p: np.ndarray, block_size: int, n_frames: int) -> np.ndarray:
    return np.repeat(p, block_size, axis=0)[:n_frames]


def time_domain_error(problem: _Problem, S_hat) -> float:
    return float(np.linalg.norm(problem.resynth(S_hat) - problem.x))


def _inconsistency(problem: _Problem, S_hat) -> float:
    norm = np.linalg.norm(S_hat)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(S_hat - project(S_hat, problem.c, problem.x.shape[0])) / norm)


def fit_masks(Y: Spectrogram, x, mode, opts: FitOptions | None = None):
    """Gradient descent on block-shared masks with halving backtracking.

    Each iteration tries the step ``step_size`` and halves it (up to 30
    times) until the loss does not increase. Stops after ``max_iters``
    accepted steps, when the relative decrease falls below ``tol``, or when
    no halving helps and the loss is already at rounding level. Raises
    ``Divergence`` if no step can be accepted away from such a plateau.

    Returns the clipped masks and the per-iteration trace (row 0 is the
    initial point).
    """
    opts = opts or FitOptions()
    prob = _Problem(Y, x, mode)
    T, F = Y.shape
    B = opts.block_size
    n_blocks = -(-T // B)
    K = opts.clip_bound
    fill = 1.0 if opts.init == "ones" else 0.0
    pr = np.full((n_blocks, F), fill)
    pi = np.full((n_blocks, F), fill)

    def masks(pr_, pi_):
        return expand_blocks(pr_, B, T), expand_blocks(pi_, B, T)

    def record(pr_, pi_, loss):
        S_hat = prob.estimate(*masks(pr_, pi_))
        trace.append(loss, time_domain_error(prob, S_hat), _inconsistency(prob, S_hat))

    if opts.precondition:
        hr, hi = (reduce_blocks(h, B) for h in prob.hessian_diagonal())
        # floor keeps near-zero-curvature entries (Re/Im Y ~ 0) from taking huge steps
        floor = PRECOND_FLOOR * max(hr.max(), hi.max(), np.finfo(float).tiny)
        scale_r, scale_i = 1.0 / np.maximum(hr, floor), 1.0 / np.maximum(hi, floor)
    else:
        scale_r = scale_i = 1.0

    trace = ConvergenceTrace()
    loss = prob.loss(*masks(pr, pi))
    initial = loss
    record(pr, pi, loss)

    for _ in range(opts.max_iters):
        if loss == 0.0:
            trace.stop_reason = "zero loss"
            break
        gr, gi = prob.gradient(*masks(pr, pi))
        gr, gi = reduce_blocks(gr, B) * scale_r, reduce_blocks(gi, B) * scale_i
        step = opts.step_size
        best = np.inf
        for _halving in range(MAX_HALVINGS + 1):
            cand_r = np.clip(pr - step * gr, -K, K)
            cand_i = np.clip(pi - step * gi, -K, K)
            new_loss = prob.loss(*masks(cand_r, cand_i))
            best = min(best, new_loss)
            if new_loss <= loss:
                break
            step *= 0.5
        else:
            if best <= loss * (1.0 + 1e-12) or best - loss <= 1e-300:
                trace.stop_reason = "stalled"
                break
            raise Divergence(
                f"no decreasing step after {MAX_HALVINGS} halvings "
                f"(loss {loss:.6g}, best trial {best:.6g}, initial {initial:.6g})"
            )
        if new_loss > DIVERGENCE_FACTOR * initial:
            raise Divergence(f"loss {new_loss:.6g} exceeds {DIVERGENCE_FACTOR:g} x initial")
        pr, pi = cand_r, cand_i
        decrease = (loss - new_loss) / loss
        loss = new_loss
        record(pr, pi, loss)
        if decrease < opts.tol:
            trace.stop_reason = "tolerance"
            break
    else:
        trace.stop_reason = "max_iters"

    mr, mi = masks(pr, pi)
    n_clipped = int(np.count_nonzero(np.abs(mr) == K) + np.count_nonzero(np.abs(mi) == K))
    return MaskPair(mr, mi, K, n_clipped), trace
