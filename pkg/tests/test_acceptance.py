"""Acceptance criteria, one PASS/FAIL line each.

Lines are collected in ``RESULTS`` and printed in the pytest terminal
summary (see conftest.py). Run ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from conftest import random_spectrogram, sine_mixture
from csmask.consistency import consistency_operator, griffin_lim
from csmask.masking import MaskPair, apply_magnitude_mask, apply_mask, oracle_irm, oracle_ratio_masks
from csmask.metrics import snr_db
from csmask.mixer import SNR_GRID_DB, gen_sine, gen_white_noise, mix_at_snr
from csmask.optim import FitOptions, fit_masks, loss_gradient, loss_value
from csmask.stft import istft, istft_adjoint, make_config, max_length_for_frames, stft

pytestmark = pytest.mark.acceptance

RESULTS = {}

PR_TOL = 1e-10
CONSISTENCY_TOL = 1e-10
LOCALITY_TOL = 1e-12
ADJOINT_TOL = 1e-10
GRAD_TOL = 1e-6
FD_STEP = 1e-6
ORACLE_MIN_SNR = 50.0
ORACLE_MAX_CLIPPED = 1e-3
GL_SLACK = 1e-12
GL_MAX_RATIO = 0.1
MIXER_TOL_DB = 0.01
IDENTITY_TOL = 1e-10


def record(num, name, ok, detail):
    RESULTS[num] = f"criterion {num:>2} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    assert ok, RESULTS[num]


@pytest.fixture(scope="module")
def cfg():
    return make_config(1024, 512, "hann_periodic")


def test_1_perfect_reconstruction(cfg):
    start = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        r = np.random.default_rng(seed)
        x = r.standard_normal(int(r.integers(1000, 50001)))
        worst = max(worst, float(np.max(np.abs(istft(stft(x, cfg)).samples - x))))
    elapsed = time.perf_counter() - start
    record(1, "perfect reconstruction", worst <= PR_TOL and elapsed < 10.0,
           f"max error {worst:.2e}, {elapsed:.2f} s")


def test_2_consistency_operator(cfg):
    worst = {"idempotence": 0.0, "fixed point": 0.0, "locality": 0.0, "linearity": 0.0}
    T = 12
    for seed in range(20):
        r = np.random.default_rng(seed)
        S = random_spectrogram(r, cfg, T)
        C1 = consistency_operator(S)
        C2 = consistency_operator(C1)
        worst["idempotence"] = max(worst["idempotence"],
                                   np.linalg.norm(C2.data - C1.data) / np.linalg.norm(C1.data))

        x = r.standard_normal(int(r.integers(2000, 20000)))
        Sx = stft(x, cfg)
        worst["fixed point"] = max(worst["fixed point"],
                                   np.linalg.norm(consistency_operator(Sx).data - Sx.data)
                                   / np.linalg.norm(Sx.data))

        t0 = int(r.integers(1, T - 1))
        bumped = S.data.copy()
        bumped[t0] += r.standard_normal(cfg.n_bins) + 1j * r.standard_normal(cfg.n_bins)
        delta = consistency_operator(S.with_data(bumped)).data - C1.data
        outside = np.delete(np.abs(delta), [t0 - 1, t0, t0 + 1], axis=0)
        worst["locality"] = max(worst["locality"], float(outside.max()))

        S2 = random_spectrogram(r, cfg, T)
        a, b = r.standard_normal(2)
        lhs = consistency_operator(S.with_data(a * S.data + b * S2.data)).data
        rhs = a * C1.data + b * consistency_operator(S2).data
        worst["linearity"] = max(worst["linearity"], np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
    ok = (worst["idempotence"] <= CONSISTENCY_TOL and worst["fixed point"] <= CONSISTENCY_TOL
          and worst["locality"] <= LOCALITY_TOL and worst["linearity"] <= CONSISTENCY_TOL)
    record(2, "consistency operator", ok, ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


def test_3_adjoint(cfg):
    worst = 0.0
    r = np.random.default_rng(3)
    for _ in range(50):
        T = int(r.integers(2, 20))
        length = max_length_for_frames(T, cfg) - int(r.integers(0, 512))
        S = random_spectrogram(r, cfg, T, length)
        w = r.standard_normal(length)
        G = istft_adjoint(w, cfg, T).data
        y = istft(S).samples
        lhs = float(y @ w)
        rhs = float(np.sum(S.data.real * G.real + S.data.imag * G.imag))
        scale = np.linalg.norm(y) * np.linalg.norm(w)
        worst = max(worst, abs(lhs - rhs) / scale)
    record(3, "adjoint dot test", worst <= ADJOINT_TOL, f"max relative gap {worst:.2e}")


def test_4_gradient_check():
    c = make_config(8, 4, "hann_periodic")
    worst = 0.0
    for mode in ("spectrogram", "time"):
        r = np.random.default_rng(4)
        x = r.standard_normal(20)
        Y = stft(x + 0.5 * r.standard_normal(20), c)
        M = MaskPair(r.standard_normal(Y.shape), r.standard_normal(Y.shape))
        g = loss_gradient(M, Y, x, mode)
        exact, approx = [], []
        for _ in range(20):
            part = int(r.integers(2))
            idx = (int(r.integers(Y.shape[0])), int(r.integers(Y.shape[1])))
            vals = []
            for sgn in (1, -1):
                mr, mi = M.mr.copy(), M.mi.copy()
                (mr, mi)[part][idx] += sgn * FD_STEP
                vals.append(loss_value(MaskPair(mr, mi), Y, x, mode))
            approx.append((vals[0] - vals[1]) / (2 * FD_STEP))
            exact.append((g.mr, g.mi)[part][idx])
        exact, approx = np.array(exact), np.array(approx)
        worst = max(worst, np.linalg.norm(exact - approx) / np.linalg.norm(exact))
    record(4, "gradient check", worst <= GRAD_TOL,
           f"T = {Y.shape[0]}, max relative error {worst:.2e}")


def test_5_oracle_exactness(cfg):
    mix = sine_mixture(seed=0, snr_db=0.0)
    Y, S = stft(mix.noisy, cfg), stft(mix.clean, cfg)
    M = oracle_ratio_masks(S, Y)
    snr = snr_db(mix.clean, istft(apply_mask(Y, M)))
    frac = M.clipped_fraction
    record(5, "oracle exactness", frac < ORACLE_MAX_CLIPPED and snr >= ORACLE_MIN_SNR,
           f"{100 * frac:.3f}% of mask entries clipped, SNR {snr:.2f} dB")


def test_6_csm_beats_irm(cfg):
    wins, margins = 0, []
    for seed in range(10):
        mix = sine_mixture(seed=seed, snr_db=0.0)
        Y, S = stft(mix.noisy, cfg), stft(mix.clean, cfg)
        csm = snr_db(mix.clean, istft(apply_mask(Y, oracle_ratio_masks(S, Y))))
        N_sp = Y.with_data(Y.data - S.data)
        irm = snr_db(mix.clean, istft(apply_magnitude_mask(Y, oracle_irm(S, N_sp))))
        wins += csm > irm
        margins.append(csm - irm)
    record(6, "oracle CSM beats IRM", wins == 10,
           f"{wins}/10 seeds, smallest margin {min(margins):.2f} dB")


def test_7_convergence_comparison(cfg):
    opts = FitOptions(max_iters=500, block_size=4)
    wins, identity = 0, 0.0
    for seed in range(10):
        mix = sine_mixture(seed=seed, snr_db=0.0)
        Y = stft(mix.noisy, cfg)
        M_t, t_time = fit_masks(Y, mix.clean, "time", opts)
        _, t_spec = fit_masks(Y, mix.clean, "spectrogram", opts)
        wins += t_time.time_domain_error[-1] <= t_spec.time_domain_error[-1]
        S_hat = apply_mask(Y, M_t)
        gap = np.max(np.abs(istft(S_hat).samples - istft(consistency_operator(S_hat)).samples))
        identity = max(identity, float(gap))
    record(7, "time-domain objective converges lower", wins >= 9 and identity <= IDENTITY_TOL,
           f"{wins}/10 seeds, resynthesis identity gap {identity:.2e}")


def test_8_griffin_lim(cfg):
    sine = gen_sine(440.0, 1.0, 16000)
    A = np.abs(stft(sine, cfg).data)
    _, trace = griffin_lim(A, cfg, 100, length=len(sine))
    err = np.array(trace.magnitude_error)
    rise = float(np.max(np.diff(err)))
    ratio = err[50] / err[0]
    record(8, "Griffin-Lim", rise <= GL_SLACK and ratio <= GL_MAX_RATIO,
           f"largest step change {rise:.2e}, error after 50 iterations {ratio:.4f} x initial")


def test_9_mixer():
    clean = gen_sine(440.0, 1.0, 16000, amplitude=0.5)
    worst = 0.0
    for seed in range(5):
        noise = gen_white_noise(1.0, 16000, seed)
        for snr in SNR_GRID_DB:
            mix = mix_at_snr(clean, noise, snr, seed=seed)
            worst = max(worst, abs(snr_db(clean, mix.noisy) - snr), abs(mix.achieved_snr_db - snr))
    record(9, "mixer SNR grid", worst <= MIXER_TOL_DB, f"max deviation {worst:.2e} dB")


def test_10_resynthesis_identity(cfg):
    worst = 0.0
    for seed in range(20):
        r = np.random.default_rng(100 + seed)
        Y = random_spectrogram(r, cfg, int(r.integers(2, 40)))
        M = MaskPair(r.uniform(-10, 10, Y.shape), r.uniform(-10, 10, Y.shape))
        S_hat = apply_mask(Y, M)
        gap = np.max(np.abs(istft(S_hat).samples - istft(consistency_operator(S_hat)).samples))
        worst = max(worst, float(gap))
    record(10, "resynthesis identity", worst <= IDENTITY_TOL, f"max gap {worst:.2e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
