"""How often the slice lower bounds land within a given relative gap of the spectral norm.

Usage: python3 scripts/run_lower_bound_experiment.py [--count N] [--shape 2x2x3] [--dist normal|uniform]
"""

import argparse
import time

from tensornorm.experiment import format_table, run_experiment
from tensornorm.tensorio import DISTRIBUTIONS, parse_shape


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--shape", type=parse_shape, default=(2, 2, 3))
    ap.add_argument("--dist", choices=DISTRIBUTIONS, default="normal")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=500)
    args = ap.parse_args()
    t0 = time.perf_counter()
    res = run_experiment(args.shape, args.count, seed=args.seed, dist=args.dist, n_grid=args.grid)
    print(format_table(res))
    print(f"# {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
