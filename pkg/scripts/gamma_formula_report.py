"""Compare Gamma_alpha * (MC integral over X) with closed forms for every test algebra."""

import argparse
import warnings

from conebranch.errors import IntegrabilityWarning
from conebranch.jordan import build_algebra
from conebranch.representation import gamma_alpha, gamma_pi_formula, gamma_pi_standard, gamma_piX_numeric, make_scalar_rep
from conebranch.stratified import sample_X

CASES = [("spin", 2, 3), ("spin", 3, 3), ("spin", 4, 4), ("sym", 2, 4), ("herm", 2, 4), ("sym", 3, 5)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10 ** 6)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    print(f"{'algebra':8} {'lambda':>6} {'MC product':>14} {'stderr':>10} {'cone gamma':>12} {'short form':>12}")
    for fam, size, lam in CASES:
        A = build_algebra(fam, size)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrabilityWarning)
            rep = make_scalar_rep(A, lam)
        est = gamma_piX_numeric(A, rep, sample_X(A, args.seed, args.samples))
        ga = gamma_alpha(A, rep.alpha)
        print(f"{A.name:8} {lam:>6} {ga * est.value:14.8g} {ga * est.stderr:10.3g} "
              f"{gamma_pi_standard(A, lam):12.8g} {gamma_pi_formula(A, lam):12.8g}")


if __name__ == "__main__":
    main()
