"""Timing comparison of the corner-phase integrator backends.

The backend (compiled kernels vs pure numpy) is fixed when ``cornerimpact``
is imported, so each backend runs in its own subprocess with
``CORNERIMPACT_BACKEND`` set.  Every case is warmed once (JIT compilation,
scipy setup) and then timed best-of-``--repeat``.

Usage:  python3 benchmarks/bench_integrator.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json
import math
import time

from cornerimpact import (
    ConeGeometry, InitialData, SimConfig, characteristic_roots,
    integrate_corner, scaled_params_direct, simulate_full,
)
from cornerimpact._backend import BACKEND

UNIT = InitialData(-1.0, 1.0, 1.0)
DAMP2 = characteristic_roots(2.0)
ACUTE = ConeGeometry(math.pi / 3.0)
OBTUSE = ConeGeometry(2.0 * math.pi / 3.0)
REPEAT = int(__import__("sys").argv[1])

cases = {
    "corner, eta=1e-3, obtuse, to exit":
        lambda: integrate_corner(
            scaled_params_direct(1e-3, "derive", UNIT, DAMP2), OBTUSE,
            rtol=1e-10, atol=1e-12),
    "corner, eta=1e-2, acute, free run to tau=103":
        lambda: integrate_corner(
            scaled_params_direct(1e-2, "derive", UNIT, DAMP2), ACUTE,
            rtol=1e-10, atol=1e-12, stop_at_event=False, horizon=103.0),
    "full pipeline, k=1e4, acute, T=2":
        lambda: simulate_full(SimConfig().override(
            mode="physical", k=1e4, T=2.0)),
    "full pipeline, k=1e4, obtuse, T=2":
        lambda: simulate_full(SimConfig().override(
            mode="physical", k=1e4, T=2.0,
            theta_bar=2.0 * math.pi / 3.0)),
}

results = {"backend": BACKEND}
for name, case in cases.items():
    case()                                   # warm: JIT, caches
    best = math.inf
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        case()
        best = min(best, time.perf_counter() - t0)
    results[name] = best
print(json.dumps(results))
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ, CORNERIMPACT_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)],
                         env=env, capture_output=True, text=True)
    if out.returncode != 0:
        raise RuntimeError(f"{backend} worker failed:\n{out.stderr}")
    return json.loads(out.stdout.splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timed repetitions per case (default 5)")
    args = parser.parse_args()

    numpy_res = run_backend("numpy", args.repeat)
    try:
        numba_res = run_backend("numba", args.repeat)
    except RuntimeError as exc:
        print(f"compiled backend unavailable, numpy timings only\n({exc})")
        numba_res = None
    if numba_res is not None and numba_res["backend"] != "numba":
        print("numba not importable in the worker, numpy timings only")
        numba_res = None

    names = [k for k in numpy_res if k != "backend"]
    width = max(len(n) for n in names)
    if numba_res is None:
        print(f"{'case':<{width}}  {'numpy':>10}")
        for name in names:
            print(f"{name:<{width}}  {numpy_res[name] * 1e3:>8.2f} ms")
        return

    print(f"{'case':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>7}")
    for name in names:
        tn, tj = numpy_res[name], numba_res[name]
        print(f"{name:<{width}}  {tn * 1e3:>8.2f} ms  {tj * 1e3:>8.2f} ms"
              f"  {tn / tj:>6.2f}x")


if __name__ == "__main__":
    main()
