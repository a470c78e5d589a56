"""Time the pair-integral kernel with the numpy fallback and the compiled core.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from entangled_compton import kernels
from entangled_compton.pulse import LaserPulse, PhaseCoefficients
from entangled_compton.quadrature import pair_integrals

CASES = (
    ("2k nodes", 128),
    ("8k nodes", 512),
    ("32k nodes", 2048),
)


def time_backend(backend, pulse, first, second, n_panels, repeat):
    pair_integrals(pulse, first, second, backend=backend, n_panels=n_panels)  # warm the grid cache
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        result = pair_integrals(pulse, first, second, backend=backend, n_panels=n_panels)
        best = min(best, time.perf_counter() - t)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    pulse = LaserPulse(0.1, 1e-5, 40.0)
    first = PhaseCoefficients(0.8, 0.3 + 0.0j, 4.0)
    second = PhaseCoefficients(1.7, -0.2 + 0.1j, -3.0)
    names = sorted(kernels.BACKENDS)
    print(f"backends: {', '.join(names)} (active: {kernels.ACTIVE})")
    print(f"{'case':<12s}" + "".join(f"{n:>14s}" for n in names) + f"{'speedup':>10s}{'max rel diff':>14s}")
    for label, n_panels in CASES:
        timings, results = {}, {}
        for name in names:
            timings[name], results[name] = time_backend(name, pulse, first, second, n_panels, args.repeat)
        line = f"{label:<12s}" + "".join(f"{timings[n] * 1e3:>12.2f}ms" for n in names)
        if "compiled" in timings:
            ref = results["python"].total
            diff = np.abs(results["compiled"].total - ref).max() / np.abs(ref).max()
            line += f"{timings['python'] / timings['compiled']:>9.1f}x{diff:>14.1e}"
        print(line)


if __name__ == "__main__":
    main()
