"""Time the compiled kernels against the pure-Python ones on real tower data.

    python3 benchmarks/bench_kernels.py [portrait] [-n LEVEL] [--repeat R]
"""
import argparse
import time
from pathlib import Path

import numpy as np

from lamina import _kernels_py
from lamina.lamination import Tower
from lamina.portrait import load_portrait_pair
from lamina.relations import _passage_step

try:
    from lamina import _kernels as _compiled
except ImportError:
    _compiled = None

ROOT = Path(__file__).resolve().parent.parent


def workloads(tower, n):
    """Argument tuples for each kernel, taken from a level-n tower."""
    below = tower.gaps("white", n - 1)
    here = tower.angles(n)
    starts = here.embed[below.arcs]
    white = tower.relation("white", n).labels
    black = tower.relation("black", n).labels
    size = len(white)
    gaps = tower.gaps("white", n)
    return {
        "pullback_labels": (len(here), starts, *tower.lift_tables, tower.base_successors["white"]),
        "join_labels": (white, black),
        "class_links": (white,),
        "cycle_ids": (_passage_step(tower, n),),
        "first_crossing": (white,),
        "canonical_labels": (np.arange(size, dtype=np.int64),),
        "count_components": (size + gaps.count, gaps.gap_of_arc, white + gaps.count),
    }


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("portrait", nargs="?", default=str(ROOT / "portraits" / "g.portrait"))
    parser.add_argument("-n", type=int, default=7)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    tower = Tower(load_portrait_pair(args.portrait))
    jobs = workloads(tower, args.n)
    print(f"portrait {args.portrait}, level {args.n}, {len(tower.angles(args.n))} angles")
    if _compiled is None:
        print("compiled kernels not built; only the pure-Python times are shown")
    print(f"{'kernel':<18} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fargs in jobs.items():
        slow = best_of(getattr(_kernels_py, name), fargs, args.repeat)
        if _compiled is None:
            print(f"{name:<18} {slow:>10.4f}")
            continue
        fast = best_of(getattr(_compiled, name), fargs, args.repeat)
        same = _same(getattr(_kernels_py, name)(*fargs), getattr(_compiled, name)(*fargs))
        print(f"{name:<18} {slow:>10.4f} {fast:>10.4f} {slow / fast:>7.1f}x" + ("" if same else "  MISMATCH"))


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


if __name__ == "__main__":
    main()
