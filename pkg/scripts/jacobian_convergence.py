"""Relative gap between the two sides of the stratified integral formula as the sample count grows."""

import argparse

from conebranch.checks import jacobian_integrands
from conebranch.jordan import build_algebra
from conebranch.stratified import verify_jacobian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    counts = [10 ** 4, 10 ** 5, 10 ** 6]
    for fam, size in (("spin", 2), ("sym", 2)):
        A = build_algebra(fam, size)
        for name, f in jacobian_integrands(A).items():
            errs = [verify_jacobian(A, f, args.seed, c).rel_err for c in counts]
            print(f"{A.name:8} {name:24} " + " ".join(f"{e:10.3g}" for e in errs))


if __name__ == "__main__":
    main()
