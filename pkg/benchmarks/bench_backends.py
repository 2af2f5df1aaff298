"""Time the compiled kernels against the pure-Python reference.

Usage: python benchmarks/bench_backends.py [--repeat N] [--json]

Each workload runs best-of-N on both backends with identical inputs and
reports the speedup; a result mismatch turns the row into an error so a
fast-but-wrong kernel cannot slip through.
"""

import argparse
import json
import math
import random
import sys
import time

from adelic_zeta import _pykernels as pyk
from adelic_zeta.lfun import primes_up_to

try:
    from adelic_zeta import _ckernels as ck
except ImportError:
    ck = None


def best_of(repeat, fn, *args):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def rel_err(a, b):
    if isinstance(a, tuple):
        a = a[0]
        b = b[0]
    if isinstance(a, list):
        return 0.0 if list(a) == list(b) else math.inf
    return abs(complex(a) - complex(b)) / max(1.0, abs(complex(a)))


def workloads():
    rng = random.Random(2026)
    sum_data = [rng.uniform(-1.0, 1.0) * 10 ** rng.randint(-6, 6) for _ in range(1_000_000)]
    scales = [0.01 * (1 + k) for k in range(400)]
    primes = list(primes_up_to(200_000))
    zeta_rows = [(1.0, -1.0)] * len(primes)

    def lattice(mod):
        return [mod.gauss_poly_lattice_sum(s, (0.0, 0.0, 1.0), 1e-17)[0] for s in scales]

    yield "neumaier_sum 1e6 floats", lambda mod: mod.neumaier_sum(sum_data)
    yield "lattice sums, 400 scales", lattice
    yield "euler product, 17984 primes", lambda mod: mod.euler_product(
        primes, zeta_rows, 1.1 + 30.0j
    )
    yield "eta24 q-expansion to 20000", lambda mod: mod.eta24_coefficients(20000)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if ck is None:
        print("compiled backend unavailable; nothing to compare")
        return 0

    rows = []
    for name, work in workloads():
        t_py, out_py = best_of(args.repeat, work, pyk)
        t_c, out_c = best_of(args.repeat, work, ck)
        err = (
            max(rel_err(a, b) for a, b in zip(out_py, out_c))
            if isinstance(out_py, list) and not isinstance(out_py[0], int)
            else rel_err(out_py, out_c)
        )
        if not err <= 1e-12:
            print(f"MISMATCH in {name}: rel err {err:.2e}", file=sys.stderr)
            return 1
        rows.append(
            {"workload": name, "python_s": t_py, "c_s": t_c, "speedup": t_py / t_c}
        )

    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    width = max(len(r["workload"]) for r in rows)
    print(f"{'workload':<{width}}  python      c           speedup")
    for r in rows:
        print(
            f"{r['workload']:<{width}}  {r['python_s']:<10.4f}  {r['c_s']:<10.4f} "
            f" {r['speedup']:6.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
