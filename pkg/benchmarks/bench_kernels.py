"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Also times one full stability report under each backend (fresh
interpreter per backend, since ``HILL_KREIN_NUMBA`` is read at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from hill_krein.hillspec import potential_coefficients
from hill_krein.kernels import numba_impl, numpy_impl
from hill_krein.waveforms import sample_profile, wave_params

REPORT_SNIPPET = (
    "import time; from hill_krein import kernels, kreinindex as ki; "
    "ki.stability_report(1.0, 2.0, 'one', N=64, with_jl=False); "
    "t = time.perf_counter(); ki.stability_report(1.0, 2.0, 'one', N=256); "
    "print(kernels.BACKEND, time.perf_counter() - t)"
)


def best(fn, repeat):
    fn()  # warm-up, includes JIT compilation for numba
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_sncndn(repeat):
    u = np.linspace(-30.0, 30.0, 200_000)
    rows = []
    for m in (0.25, 0.9999):
        t_np = best(lambda: numpy_impl.sncndn(u, m), repeat)
        t_nb = best(lambda: numba_impl.sncndn(u, m), repeat)
        rows.append((f"sncndn  n={u.size} m={m}", t_np, t_nb))
    return rows


def bench_potential(repeat):
    rows = []
    for N in (256, 512, 1024):
        prof = sample_profile("cnoidal", wave_params(0.8, 2 * np.pi), N)
        coef = potential_coefficients(prof.phi)
        t_np = best(lambda: numpy_impl.trig_potential_matrix(coef, N), repeat)
        t_nb = best(lambda: numba_impl.trig_potential_matrix(coef, N), repeat)
        rows.append((f"trig_potential_matrix N={N}", t_np, t_nb))
        t_np = best(lambda: numpy_impl.sine_potential_matrix(coef, N), repeat)
        t_nb = best(lambda: numba_impl.sine_potential_matrix(coef, N), repeat)
        rows.append((f"sine_potential_matrix N={N}", t_np, t_nb))
    return rows


def bench_report():
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, HILL_KREIN_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", REPORT_SNIPPET], env=env, capture_output=True, text=True, check=True)
        backend, seconds = res.stdout.split()
        out[backend] = float(seconds)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--skip-report", action="store_true")
    args = parser.parse_args()

    print(f"{'kernel':40s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, t_np, t_nb in bench_sncndn(args.repeat) + bench_potential(args.repeat):
        print(f"{name:40s} {t_np * 1e3:8.3f}ms {t_nb * 1e3:8.3f}ms {t_np / t_nb:7.1f}x")
    if not args.skip_report:
        times = bench_report()
        print("\nstability_report(kappa=1, gamma=2, B=1, N=256), with J L:")
        for backend, seconds in times.items():
            print(f"  {backend:6s} {seconds:.3f}s")


if __name__ == "__main__":
    main()
