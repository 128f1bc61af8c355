"""Compare the compiled table kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 8 12 16] [--repeat 5]

Prints one line per (kernel, n) with best-of-repeat timings and the speedup.
"""
import argparse
import timeit

import numpy as np

from symdecomp import _kernels_py
from symdecomp.obdd import dense_transitions, obdd_from_table, TruthTable

try:
    from symdecomp import _kernels as compiled
except ImportError:
    compiled = None


def random_obdd(n: int, rng: np.random.Generator):
    bits = rng.integers(0, 2, size=1 << n, dtype=np.uint8)
    return obdd_from_table(TruthTable.from_array(n, bits))


def bench(fn, args, repeat: int) -> float:
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[8, 12, 16])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback is timed")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18}{'n':>4}{'numpy (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for n in args.n:
        d = random_obdd(n, rng)
        trans = dense_transitions(d)
        table = _kernels_py.eval_all(trans)
        cases = [
            ("eval_all", "eval_all", (trans,)),
            ("residual_classes", "residual_classes", (table, n)),
        ]
        for label, name, fargs in cases:
            slow = bench(getattr(_kernels_py, name), fargs, args.repeat)
            if compiled is not None:
                fast = bench(getattr(compiled, name), fargs, args.repeat)
                print(f"{label:<18}{n:>4}{slow * 1e6:>14.1f}{fast * 1e6:>14.1f}{slow / fast:>9.1f}x")
            else:
                print(f"{label:<18}{n:>4}{slow * 1e6:>14.1f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
