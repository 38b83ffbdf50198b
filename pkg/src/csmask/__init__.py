"""Consistency-aware spectrogram masking.

STFT/ISTFT with explicit DFT kernels, the consistency projection
``stft(istft(.))``, oracle masks and mask fitting under spectrogram-domain
or time-domain objectives.
"""
from csmask.consistency import (
    GriffinLimTrace,
    consistency_operator,
    griffin_lim,
    inconsistency,
)
from csmask.masking import (
    MagnitudeMask,
    MaskPair,
    apply_magnitude_mask,
    apply_mask,
    oracle_irm,
    oracle_ratio_masks,
)
from csmask.metrics import EvalReport, segmental_snr, snr_db, spectrogram_distance
from csmask.mixer import Mixture, gen_sine, gen_white_noise, mix_at_snr
from csmask.optim import (
    SPECTROGRAM_LOSS,
    TIME_DOMAIN_LOSS,
    ConvergenceTrace,
    FitOptions,
    ObjectiveMode,
    fit_masks,
    loss_gradient,
    loss_value,
)
from csmask.signal_io import Waveform, read_wav, write_wav
from csmask.stft import (
    DftKernel,
    Spectrogram,
    StftConfig,
    dft_kernels,
    frame_signal,
    istft,
    istft_adjoint,
    make_config,
    stft,
)

__version__ = "0.1.0"
