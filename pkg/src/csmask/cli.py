"""Command-line front end: ``csmask {mix,enhance-oracle,fit,analyze,griffin-lim}``.

Every subcommand records its resolved parameters in a manifest (JSON)
next to its outputs. Exit codes: 0 success, 2 usage or input errors,
3 numerical failures (divergence, invalid STFT geometry).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

import csmask
from csmask.consistency import griffin_lim, inconsistency
from csmask.errors import CsmError, NumericalError
from csmask.masking import (
    DEFAULT_CLIP,
    DEFAULT_EPS,
    apply_magnitude_mask,
    apply_mask,
    oracle_irm,
    oracle_ratio_masks,
)
from csmask.metrics import evaluate
from csmask.mixer import gen_white_noise, mix_at_snr
from csmask.optim import FitOptions, as_mode, fit_masks
from csmask.signal_io import ENCODINGS, Waveform, read_wav, require_same_rate, write_wav
from csmask.stft import (
    DEFAULT_FRAME_LEN,
    DEFAULT_HOP,
    ENGINES,
    WINDOW_KINDS,
    istft,
    make_config,
    stft,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3
MASK_ALIASES = {"csm": "csm", "crm": "csm", "irm": "irm"}
GL_TRACE_COLUMNS = ("iter", "magnitude_error", "inconsistency")
FIT_TRACE_COLUMNS = ("iter", "loss", "time_domain_error", "inconsistency")


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    version: str = csmask.__version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json() + "\n")
        return path


def sidecar(path, suffix: str) -> Path:
    """``out/enh.wav`` -> ``out/enh.<suffix>``."""
    path = Path(path)
    return path.with_name(f"{path.stem}.{suffix}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _stft_params(args):
    return {"n": args.n, "hop": args.hop, "window": args.window, "engine": args.engine}


def _config(args):
    return make_config(args.n, args.hop, args.window, args.engine)


def _add_stft_flags(p):
    p.add_argument("--n", type=int, default=DEFAULT_FRAME_LEN, help="frame length N (even)")
    p.add_argument("--hop", type=int, default=DEFAULT_HOP, help="hop R")
    p.add_argument("--window", choices=WINDOW_KINDS, default="hann_periodic")
    p.add_argument("--engine", choices=ENGINES, default="kernel",
                   help="explicit DFT matrices or FFT (same transform)")


def _add_encoding_flag(p):
    p.add_argument("--encoding", choices=ENCODINGS, default="float32", help="output WAV encoding")


def _snr_tag(snr):
    return f"{snr:+g}".replace(".", "p")


# -- subcommands -----------------------------------------------------------

def cmd_mix(args):
    clean = read_wav(args.clean)
    if args.noise is not None:
        noise = read_wav(args.noise)
        noise_desc = {"noise": str(args.noise)}
    else:
        duration = (len(clean) + args.offset) / clean.sample_rate
        noise = gen_white_noise(duration, clean.sample_rate, args.noise_seed)
        noise_desc = {"noise_seed": args.noise_seed}
    require_same_rate(clean, noise)

    snrs = args.snr
    out = Path(args.out)
    outputs = {}
    for snr in snrs:
        target = out if len(snrs) == 1 else out.with_name(f"{out.stem}_snr{_snr_tag(snr)}{out.suffix}")
        mix = mix_at_snr(clean, noise, snr, offset=args.offset, seed=args.noise_seed)
        res = write_wav(target, mix.noisy, args.encoding)
        outputs[str(target)] = {
            "target_snr_db": snr,
            "achieved_snr_db": mix.achieved_snr_db,
            "noise_scale": mix.noise_scale,
            "n_clipped": res.n_clipped,
        }
        print(f"{target}: achieved SNR {mix.achieved_snr_db:.4f} dB (target {snr:g} dB)")
    manifest = RunManifest(
        "mix",
        {"snr_db": snrs, "offset": args.offset, "encoding": args.encoding, **noise_desc},
        inputs={"clean": str(args.clean), **noise_desc},
        outputs=outputs,
    )
    manifest.write(sidecar(out, "manifest.json"))
    return EXIT_OK


def _load_pair(noisy_path, clean_path):
    noisy = read_wav(noisy_path)
    clean = read_wav(clean_path)
    require_same_rate(noisy, clean)
    if len(noisy) != len(clean):
        raise CsmError(f"noisy has {len(noisy)} samples, clean has {len(clean)}")
    return noisy, clean


def _finish(args, manifest, enhanced, S_hat, S_clean, clean):
    out = Path(args.out)
    res = write_wav(out, enhanced, args.encoding)
    report = evaluate(clean, enhanced, S_hat, S_clean)
    report_path = sidecar(out, "report.json")
    report_path.write_text(report.to_json() + "\n")
    manifest.outputs.update({"wav": str(out), "report": str(report_path), "n_clipped": res.n_clipped})
    manifest.write(sidecar(out, "manifest.json"))
    print(report.to_json())
    return report


def cmd_enhance_oracle(args):
    mask = MASK_ALIASES[args.mask]
    noisy, clean = _load_pair(args.noisy, args.clean)
    c = _config(args)
    Y = stft(noisy, c)
    S = stft(clean, c)
    params = {"mask": mask, **_stft_params(args), "eps": args.eps, "clip": args.clip,
              "encoding": args.encoding}
    manifest = RunManifest("enhance-oracle", params,
                           inputs={"noisy": str(args.noisy), "clean": str(args.clean)})
    if mask == "csm":
        M = oracle_ratio_masks(S, Y, args.eps, args.clip)
        S_hat = apply_mask(Y, M)
        manifest.outputs["clipped_fraction"] = M.clipped_fraction
    else:
        N_sp = Y.with_data(Y.data - S.data)
        S_hat = apply_magnitude_mask(Y, oracle_irm(S, N_sp))
    enhanced = istft(S_hat)
    _finish(args, manifest, enhanced, S_hat, S, clean)
    return EXIT_OK


def cmd_fit(args):
    noisy, clean = _load_pair(args.noisy, args.clean)
    c = _config(args)
    Y = stft(noisy, c)
    mode = as_mode(args.mode)
    opts = FitOptions(step_size=args.step, max_iters=args.iters, tol=args.tol,
                      block_size=args.block, init=args.init, clip_bound=args.clip,
                      precondition=not args.no_precondition)
    M, trace = fit_masks(Y, clean, mode, opts)
    S_hat = apply_mask(Y, M)
    enhanced = istft(S_hat)
    _write_csv(args.trace, FIT_TRACE_COLUMNS, trace.rows())
    params = {"mode": mode.kind, "beta": mode.beta, **_stft_params(args),
              "eta": args.step, "iters": args.iters, "tol": args.tol, "block": args.block,
              "init": args.init, "clip": args.clip, "precondition": opts.precondition,
              "encoding": args.encoding}
    manifest = RunManifest("fit", params,
                           inputs={"noisy": str(args.noisy), "clean": str(args.clean)},
                           outputs={"trace": str(args.trace), "stop_reason": trace.stop_reason,
                                    "iterations": len(trace) - 1})
    _finish(args, manifest, enhanced, S_hat, stft(clean, c), clean)
    return EXIT_OK


def cmd_analyze(args):
    w = read_wav(args.input)
    c = _config(args)
    S = stft(w, c)
    result = {"path": str(args.input), "n_samples": len(w), "inconsistency_stft": inconsistency(S)}
    params = {**_stft_params(args), "mask": args.mask}
    inputs = {"in": str(args.input)}
    if args.mask is not None:
        if args.clean is None:
            raise CsmError("--mask needs --clean to build the oracle mask")
        mask = MASK_ALIASES[args.mask]
        noisy, clean = _load_pair(args.input, args.clean)
        S_clean = stft(clean, c)
        if mask == "csm":
            S_hat = apply_mask(S, oracle_ratio_masks(S_clean, S, args.eps, args.clip))
        else:
            S_hat = apply_magnitude_mask(S, oracle_irm(S_clean, S.with_data(S.data - S_clean.data)))
        result["mask"] = mask
        result["inconsistency_masked"] = inconsistency(S_hat)
        params.update({"eps": args.eps, "clip": args.clip})
        inputs["clean"] = str(args.clean)
    manifest = RunManifest("analyze", params, inputs=inputs)
    result["manifest"] = asdict(manifest)
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_griffin_lim(args):
    w = read_wav(args.input)
    c = _config(args)
    A = np.abs(stft(w, c).data)
    init = "zeros" if args.init == "zeros" else "seeded_random"
    wave, trace = griffin_lim(A, c, args.iters, init, seed=args.seed, length=len(w),
                              sample_rate=w.sample_rate)
    res = write_wav(args.out, wave, args.encoding)
    _write_csv(args.trace, GL_TRACE_COLUMNS, trace.rows())
    manifest = RunManifest(
        "griffin-lim",
        {**_stft_params(args), "iters": args.iters, "init": init, "seed": args.seed,
         "encoding": args.encoding},
        inputs={"in": str(args.input)},
        outputs={"wav": str(args.out), "trace": str(args.trace), "n_clipped": res.n_clipped,
                 "initial_magnitude_error": trace.magnitude_error[0],
                 "final_magnitude_error": trace.magnitude_error[-1]},
    )
    manifest.write(sidecar(args.out, "manifest.json"))
    print(f"magnitude error {trace.magnitude_error[0]:.6g} -> {trace.magnitude_error[-1]:.6g} "
          f"after {args.iters} iterations")
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="csmask", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {csmask.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mix", help="mix clean speech with noise at target SNRs")
    p.add_argument("--clean", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--noise", help="noise WAV (same sample rate, long enough)")
    src.add_argument("--noise-seed", type=int, help="generate seeded white noise instead")
    p.add_argument("--snr", type=float, action="append", required=True,
                   help="target SNR in dB; repeat for a grid (e.g. -6 -3 0 3 6)")
    p.add_argument("--offset", type=int, default=0, help="start sample within the noise")
    p.add_argument("--out", required=True)
    _add_encoding_flag(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("enhance-oracle", help="enhance with an oracle mask")
    p.add_argument("--noisy", required=True)
    p.add_argument("--clean", required=True)
    p.add_argument("--mask", choices=sorted(MASK_ALIASES), required=True,
                   help="csm (alias crm): real/imag ratio masks; irm: magnitude mask")
    p.add_argument("--out", required=True)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--clip", type=float, default=DEFAULT_CLIP)
    _add_stft_flags(p)
    _add_encoding_flag(p)
    p.set_defaults(func=cmd_enhance_oracle)

    defaults = FitOptions()
    p = sub.add_parser("fit", help="fit masks by gradient descent")
    p.add_argument("--noisy", required=True)
    p.add_argument("--clean", required=True)
    p.add_argument("--mode", choices=("spec", "time"), required=True)
    p.add_argument("--iters", type=int, default=defaults.max_iters)
    p.add_argument("--block", type=int, default=defaults.block_size)
    p.add_argument("--step", type=float, default=defaults.step_size)
    p.add_argument("--tol", type=float, default=defaults.tol)
    p.add_argument("--init", choices=("ones", "zeros"), default=defaults.init)
    p.add_argument("--clip", type=float, default=defaults.clip_bound)
    p.add_argument("--no-precondition", action="store_true",
                   help="plain gradient steps instead of diagonally scaled ones")
    p.add_argument("--trace", required=True, help="CSV: iter,loss,time_domain_error,inconsistency")
    p.add_argument("--out", required=True)
    _add_stft_flags(p)
    _add_encoding_flag(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("analyze", help="report spectrogram inconsistency as JSON")
    p.add_argument("--in", dest="input", required=True)
    chain = p.add_mutually_exclusive_group()
    chain.add_argument("--spec-from-wav", action="store_true",
                       help="analyze stft(input) only (default)")
    chain.add_argument("--mask", choices=sorted(MASK_ALIASES),
                       help="also analyze the oracle-masked spectrogram (needs --clean)")
    p.add_argument("--clean")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--clip", type=float, default=DEFAULT_CLIP)
    p.add_argument("--out", help="also write the JSON here")
    _add_stft_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("griffin-lim", help="resynthesize from the STFT magnitude only")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--init", choices=("zeros", "random"), default="zeros")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", required=True, help="CSV: iter,magnitude_error,inconsistency")
    p.add_argument("--out", required=True)
    _add_stft_flags(p)
    _add_encoding_flag(p)
    p.set_defaults(func=cmd_griffin_lim)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        name = exc.filename or (exc.args[0] if exc.args else "")
        print(f"csmask {args.command}: file not found: {name}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"csmask {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CsmError as exc:
        print(f"csmask {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
