#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Both backend modules are imported side by side, so a single run times the
same workloads through both implementations and reports the speedup.  The
optional end-to-end mode runs a full surface verification in a subprocess
per backend (the backend is chosen at import time via MAXGRAPHS_KERNELS,
so it cannot be switched within one process).

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 100,1000,10000 --end-to-end
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from maxgraphs import _kernels_py

try:
    from maxgraphs import _kernels
except ImportError:
    _kernels = None


def _time(fn, min_time=0.2):
    """Best-of-three timing with timeit-style autoranging, seconds per call."""
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            break
        reps *= 2
    best = dt / reps
    for _ in range(2):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def _workloads(sizes, rng):
    """(name, kwargs-free callables per backend) pairs for the kernel API."""
    # two-slit curve data, the n = 1 workhorse from the tests
    b = np.array([-3.0, 1.0])
    c = np.array([-1.0, 3.0])
    ct, st, A = np.cos(0.3), np.sin(0.3), 1.0

    jobs = []
    for m in sizes:
        z = rng.uniform(-6, 6, m) + 1j * rng.uniform(0.1, 4, m)
        jobs.append((
            "branch_prod n=%d" % m,
            lambda k, z=z: k.branch_prod(c, b, z),
        ))
    x = rng.uniform(-2.9, 0.9, sizes[-1])
    jobs.append((
        "branch_prod_slit n=%d" % sizes[-1],
        lambda k, x=x: k.branch_prod_slit(c, b, x, True),
    ))
    jobs.append((
        "panel_forms_line",
        lambda k: k.panel_forms_line(b, c, ct, st, A, 0.5 + 2j, 4.0 + 0.5j),
    ))
    jobs.append((
        "panel_forms_sqrt",
        lambda k: k.panel_forms_sqrt(b, c, ct, st, A, 1.0, 0.5 + 2j, 0.0, 1.0),
    ))
    return jobs


def bench_kernels(sizes, out):
    rng = np.random.default_rng(7)
    jobs = _workloads(sizes, rng)
    w = max(len(name) for name, _ in jobs)
    out.write("%-*s  %12s  %12s  %8s\n" % (w, "workload", "python", "compiled", "speedup"))
    for name, fn in jobs:
        tp = _time(lambda: fn(_kernels_py))
        if _kernels is None:
            out.write("%-*s  %10.3f us  %12s  %8s\n" % (w, name, tp * 1e6, "n/a", "n/a"))
            continue
        ref = fn(_kernels_py)
        got = fn(_kernels)
        ref = ref[0] if isinstance(ref, tuple) else ref
        got = got[0] if isinstance(got, tuple) else got
        if not np.allclose(got, ref, rtol=1e-12, atol=1e-14):
            raise AssertionError("backend mismatch in %s" % name)
        tc = _time(lambda: fn(_kernels))
        out.write("%-*s  %10.3f us  %10.3f us  %7.1fx\n"
                  % (w, name, tp * 1e6, tc * 1e6, tp / tc))


def bench_end_to_end(out):
    """Full two-slit verification, one subprocess per backend."""
    code = (
        "import time, maxgraphs as mg\n"
        "t0 = time.perf_counter()\n"
        "curve = mg.make_curve([-3, -1, 1, 3])\n"
        "for tau in mg.enumerate_admissible(curve):\n"
        "    data = mg.build_data(curve, tau, theta=0.3)\n"
        "    mg.verify_surface(data)\n"
        "print(time.perf_counter() - t0)\n"
    )
    times = {}
    for backend in ("python", "compiled"):
        env = dict(os.environ, MAXGRAPHS_KERNELS=backend)
        r = subprocess.run([sys.executable, "-c", code], env=env,
                           capture_output=True, text=True)
        if r.returncode != 0:
            out.write("verify 4 surfaces (%s): failed\n%s\n" % (backend, r.stderr))
            return
        times[backend] = float(r.stdout)
        out.write("verify 4 surfaces (%s): %7.2f s\n" % (backend, times[backend]))
    out.write("end-to-end speedup: %.1fx\n" % (times["python"] / times["compiled"]))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,1000,10000",
                    help="comma separated branch_prod array sizes")
    ap.add_argument("--end-to-end", action="store_true",
                    help="also time a full verification per backend")
    args = ap.parse_args(argv)

    sizes = sorted(int(s) for s in args.sizes.split(","))
    if _kernels is None:
        sys.stderr.write("compiled extension not built; timing python backend only\n")
    bench_kernels(sizes, sys.stdout)
    if args.end_to_end:
        bench_end_to_end(sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
