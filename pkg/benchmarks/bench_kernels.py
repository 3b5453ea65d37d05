"""Compare the compiled merge kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 20 40 80] [--repeat 3]

Times greedy best-pair contraction (dominated by trial merges) and an
order-adjacent sequence replay on random tournaments, once per backend.
"""

import argparse
import time

import numpy as np

from tournament_tww import _accel
from tournament_tww.graph import random_tournament
from tournament_tww.structure import from_graph
from tournament_tww.twin_width import greedy_contraction, width_of_sequence


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    backends = _accel.available()
    if "compiled" not in backends:
        print("compiled kernels not built; only the python backend is timed")
    old = _accel.backend_name()
    print(f"{'n':>5} {'task':<16}" + "".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    try:
        for n in args.sizes:
            s = from_graph(random_tournament(n, np.random.default_rng(args.seed)))
            order = list(range(1, n + 1))
            tasks = {
                "greedy-best": lambda: greedy_contraction(s, "best-pair")[0].width,
                "replay": lambda: width_of_sequence(s, greedy_contraction(s, "order-adjacent", order)[1]).width,
            }
            for name, fn in tasks.items():
                times, widths = [], set()
                for b in backends:
                    _accel.set_backend(b)
                    t, w = best_of(fn, args.repeat)
                    times.append(t)
                    widths.add(w)
                assert len(widths) == 1, "backends disagree"
                row = f"{n:>5} {name:<16}" + "".join(f"{t:>11.4f}s" for t in times)
                if len(times) > 1:
                    row += f"  {times[0] / times[1]:>7.1f}x"
                print(row)
    finally:
        _accel.set_backend(old)


if __name__ == "__main__":
    main()
