"""Compare the compiled and numpy framing/overlap-add kernels.

Also times full stft/istft round trips for both backends and both DFT
engines, since the frame loop only dominates for short frames.

    python benchmarks/bench_ola.py --seconds 10 --repeat 5
"""
import argparse
import timeit

import numpy as np

from csmask import ola
from csmask.stft import istft, make_config, stft


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(x, frame_lens, repeat):
    print(f"{'N':>6} {'R':>5} {'frames':>7} {'backend':>8} {'frame ms':>9} {'ola ms':>9}")
    for n in frame_lens:
        hop = n // 2
        win = np.hanning(n)
        n_frames = (len(x) - n) // hop + 1
        frames = ola.frame_windowed(x, win, hop, n_frames)
        for name in ola.available_backends():
            ola.use_backend(name)
            tf = best_of(lambda: ola.frame_windowed(x, win, hop, n_frames), repeat)
            to = best_of(lambda: ola.overlap_add_windowed(frames, win, hop), repeat)
            print(f"{n:>6} {hop:>5} {n_frames:>7} {name:>8} {1e3 * tf:>9.3f} {1e3 * to:>9.3f}")


def bench_roundtrip(x, frame_lens, repeat):
    print(f"\n{'N':>6} {'engine':>7} {'backend':>8} {'round trip ms':>14}")
    for n in frame_lens:
        for engine in ("kernel", "fft"):
            c = make_config(n, n // 2, engine=engine)
            for name in ola.available_backends():
                ola.use_backend(name)
                t = best_of(lambda: istft(stft(x, c)), repeat)
                print(f"{n:>6} {engine:>7} {name:>8} {1e3 * t:>14.2f}")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seconds", type=float, default=10.0, help="signal length at 16 kHz")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--frame-lens", type=int, nargs="+", default=[16, 64, 256, 1024])
    args = p.parse_args(argv)

    x = np.random.default_rng(0).standard_normal(int(args.seconds * 16000))
    print(f"backends: {', '.join(ola.available_backends())}; signal {len(x)} samples")
    previous = ola.backend_name()
    try:
        bench_kernels(x, args.frame_lens, args.repeat)
        bench_roundtrip(x, args.frame_lens, args.repeat)
    finally:
        ola.use_backend(previous)


if __name__ == "__main__":
    main()
