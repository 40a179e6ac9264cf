"""Run the full bounds report on seeded random tensors and tally failed inequalities."""

import argparse
from collections import Counter

from tensornorm.bounds import build_report
from tensornorm.config import RunConfig
from tensornorm.tensorio import parse_shape, random_tensor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shape", type=parse_shape, action="append")
    ap.add_argument("--count", type=int, default=30)
    args = ap.parse_args()
    shapes = args.shape or [(2, 2, 3), (3, 3, 3), (2, 4, 5)]
    cfg = RunConfig(restarts=16, nuclear_restarts=4)
    fails, errors = Counter(), Counter()
    for s in range(args.count):
        rep = build_report(random_tensor(shapes[s % len(shapes)], s), cfg)
        fails.update(v.name for v in rep.failures())
        errors.update(rep.errors)
    print(f"{args.count} tensors over shapes {shapes}")
    print(f"failed verdicts: {dict(fails) or 'none'}")
    print(f"errors: {dict(errors) or 'none'}")


if __name__ == "__main__":
    main()
