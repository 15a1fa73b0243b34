"""Compare the compiled kernels with the numpy fallback.

Times each raw kernel on both backends, then a full certified expansion with
the package loaded once per backend (in a subprocess, since the backend is
chosen at import).

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from hqcf import _pykernels

try:
    from hqcf import _ckernels
except ImportError:
    _ckernels = None

P = 65521


def _rand(rng, n, lead=False):
    a = rng.integers(0, P, n, dtype=np.int64)
    if lead:
        a[0] = 1
    return a


def kernel_cases(quick: bool):
    rng = np.random.default_rng(0)
    n = 200 if quick else 800
    a, b = _rand(rng, n), _rand(rng, n)
    big = _rand(rng, 4 * n)
    den = _rand(rng, n // 2, lead=True)
    dst = _rand(rng, 20 * n)
    src = _rand(rng, 10 * n)
    sparse = np.zeros(50 * n, dtype=np.int64)
    sparse[-1] = 1
    return {
        f"conv_mod {n}x{n}": lambda k: k.conv_mod(a, b, P),
        f"poly_divmod {4 * n}/{n // 2}": lambda k: k.poly_divmod(big, den[::-1].copy(), P),
        f"series_div n={n}": lambda k: k.series_div(a, den, n, P),
        f"axpy len={10 * n}": lambda k: k.axpy(dst, src, 7, 3, P),
        f"first_nonzero len={50 * n}": lambda k: k.first_nonzero(sparse, 0),
    }


def time_call(fn, repeat):
    timer = timeit.Timer(fn)
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


EXPAND = """
import json, time
from hqcf import kernels
from hqcf.solvers import SolveRequest, expand_family
req = SolveRequest({family!r}, {p}, {t}, -64)
start = time.perf_counter()
exp = expand_family(req, {n})
print(json.dumps({{"backend": kernels.BACKEND, "seconds": time.perf_counter() - start,
                  "letters": exp.letters.to_json()}}))
"""


def time_expansion(pure: bool, family: str, p: int, t: int, n: int) -> dict:
    env = dict(os.environ)
    env.pop("HQCF_PURE_PYTHON", None)
    if pure:
        env["HQCF_PURE_PYTHON"] = "1"
    code = EXPAND.format(family=family, p=p, t=t, n=n)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller sizes, fewer expansions")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; only the fallback can be timed", file=sys.stderr)

    print(f"{'kernel':<28}{'cython':>12}{'python':>12}{'speedup':>10}")
    for name, call in kernel_cases(args.quick).items():
        tp = time_call(lambda: call(_pykernels), args.repeat)
        if _ckernels is not None:
            tc = time_call(lambda: call(_ckernels), args.repeat)
            print(f"{name:<28}{tc * 1e6:>10.1f}us{tp * 1e6:>10.1f}us{tp / tc:>9.1f}x")
        else:
            print(f"{name:<28}{'-':>12}{tp * 1e6:>10.1f}us{'-':>10}")

    runs = [("baum_sweet", 3, 1, 100), ("mahler", 2, 2, 100)]
    if not args.quick:
        runs += [("baum_sweet", 5, 1, 200), ("mahler", 3, 1, 200), ("baum_sweet", 3, 2, 200)]
    print(f"\n{'expansion':<28}{'cython':>12}{'python':>12}{'speedup':>10}")
    for family, p, t, n in runs:
        slow = time_expansion(True, family, p, t, n)
        label = f"{family} p={p} t={t} n={n}"
        if _ckernels is None:
            print(f"{label:<28}{'-':>12}{slow['seconds']:>11.2f}s{'-':>10}")
            continue
        fast = time_expansion(False, family, p, t, n)
        if fast["letters"] != slow["letters"]:
            print(f"{label}: backends disagree", file=sys.stderr)
            return 1
        print(f"{label:<28}{fast['seconds']:>11.2f}s{slow['seconds']:>11.2f}s"
              f"{slow['seconds'] / fast['seconds']:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
