"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Kernel timings import both backends side by side; the end-to-end row runs a
trial sweep in a subprocess per backend, since the backend is fixed at import.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from echo_tdoa import _kernels_py

try:
    from echo_tdoa import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

TRIALS_SNIPPET = """
import time
from echo_tdoa.experiment import ExperimentConfig, run_trial
from echo_tdoa.geometry import Point3
cfg = ExperimentConfig(sigma=0.01)
run_trial(cfg, Point3(0.3, 1.2), 0.0, 0)
t = time.perf_counter()
for i in range({n}):
    run_trial(cfg, Point3(0.3, 1.2), (i % 31) * 5e-4, i)
print((time.perf_counter() - t) / {n})
"""


def kernel_cases(rng):
    w, tp = rng.normal(size=3750), rng.normal(size=3750)
    c = rng.normal(size=3750)
    env = np.abs(c) + 1.0
    return {
        "train_window (3750)": lambda k: k.train_window(-2e-3, 250e3, 3750, 38e3, 42e3, 15e-3, 1.0),
        "xcorr_direct (3750)": lambda k: k.xcorr_direct(w, tp),
        "peak_refine (3750)": lambda k: k.peak_refine(c),
        "guided_peak_refine (3750)": lambda k: k.guided_peak_refine(c, env, 3),
    }


def best_of(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def trial_time(pure: bool, n: int) -> float:
    env = dict(os.environ)
    env.pop("ECHO_TDOA_PURE_PYTHON", None)
    if pure:
        env["ECHO_TDOA_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", TRIALS_SNIPPET.format(n=n)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=300)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numpy [us]':>12s} {'cython [us]':>12s} {'speedup':>8s}")
    for name, call in kernel_cases(rng).items():
        t_py = best_of(lambda: call(_kernels_py), args.repeat) * 1e6
        if _kernels_cy is None:
            print(f"{name:28s} {t_py:12.1f} {'n/a':>12s}")
            continue
        t_cy = best_of(lambda: call(_kernels_cy), args.repeat) * 1e6
        print(f"{name:28s} {t_py:12.1f} {t_cy:12.1f} {t_py / t_cy:7.1f}x")

    t_py = trial_time(True, args.trials) * 1e3
    line = f"{'run_trial, 3 anchors':28s} {t_py * 1e3:12.1f}"
    if _kernels_cy is not None:
        t_cy = trial_time(False, args.trials) * 1e3
        line += f" {t_cy * 1e3:12.1f} {t_py / t_cy:7.1f}x"
    print(line)


if __name__ == "__main__":
    main()
