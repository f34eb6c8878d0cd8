"""Compare the compiled and pure-Python polynomial kernels.

    python3 benchmarks/bench_kernel.py [--repeat N]

Times the raw kernels on identical dict inputs, then one end-to-end
workload (random normal forms) under each backend in a fresh interpreter.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from dliekit import _pykernel

try:
    from dliekit import _ckernel
except ImportError:
    _ckernel = None


def random_dict(rng: random.Random, nvars: int, terms: int, deg: int) -> dict:
    out = {}
    for _ in range(terms):
        k = tuple(rng.randint(0, deg) for _ in range(nvars))
        c = rng.choice([rng.randint(-9, 9), Fraction(rng.randint(-9, 9), rng.randint(1, 5))])
        if c:
            out[k] = _pykernel.norm(c)
    return out


def kernel_table(repeat: int) -> list[tuple[str, float, float | None]]:
    rng = random.Random(0)
    a, b = random_dict(rng, 3, 40, 5), random_dict(rng, 3, 40, 5)
    cases = {
        "add": lambda k: k.add(a, b),
        "sub": lambda k: k.sub(a, b),
        "scale": lambda k: k.scale(a, Fraction(3, 7)),
        "mul": lambda k: k.mul(a, b),
        "deriv": lambda k: k.deriv(a, 1),
    }
    rows = []
    for name, fn in cases.items():
        if _ckernel is not None and fn(_ckernel) != fn(_pykernel):
            raise SystemExit(f"kernels disagree on {name}")
        py = min(timeit.repeat(lambda: fn(_pykernel), number=repeat, repeat=3)) / repeat
        cy = None
        if _ckernel is not None:
            cy = min(timeit.repeat(lambda: fn(_ckernel), number=repeat, repeat=3)) / repeat
        rows.append((name, py, cy))
    return rows


WORKLOAD = """
import random, time
from dliekit import library as lib, poly_core
from dliekit.tensor_env import QuotientKind, normal_form, random_tensor
T = lib.extension("der2_x")
rng = random.Random(0)
els = [random_tensor(rng, T, max_len=4) for _ in range(500)]
t = time.perf_counter()
for el in els:
    normal_form(el, QuotientKind.URhoTilde)
    normal_form(el, QuotientKind.UTensor)
print(poly_core.BACKEND, time.perf_counter() - t)
"""


def workload(pure: bool) -> tuple[str, float]:
    env = dict(os.environ, DLIEKIT_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    backend, secs = out.stdout.split()
    return backend, float(secs)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=2000)
    args = p.parse_args(argv)
    print(f"{'kernel':<8}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, py, cy in kernel_table(args.repeat):
        if cy is None:
            print(f"{name:<8}{py * 1e6:>12.2f}{'n/a':>12}{'':>10}")
        else:
            print(f"{name:<8}{py * 1e6:>12.2f}{cy * 1e6:>12.2f}{py / cy:>9.2f}x")
    rows = [workload(True), workload(False)]
    print()
    for backend, secs in rows:
        print(f"normal forms ({backend}): {secs:.3f} s")


if __name__ == "__main__":
    main()
