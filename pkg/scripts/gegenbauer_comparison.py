"""Print lift(v^p) on Spin(2) beside the rescaled monic Gegenbauer polynomial."""

import argparse
from fractions import Fraction

from conebranch.jordan import build_algebra
from conebranch.orthopoly import gegenbauer_scaled, lift
from conebranch.poly import MultiPoly
from conebranch.representation import make_scalar_rep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=Fraction, default=Fraction(3))
    ap.add_argument("--pmax", type=int, default=6)
    args = ap.parse_args()
    A = build_algebra("spin", 2)
    rep = make_scalar_rep(A, args.lam)
    for p in range(args.pmax + 1):
        P = lift(A, rep, MultiPoly.monomial(1, (p,)))
        G = gegenbauer_scaled(p, rep.alpha)
        print(f"p={p} {'equal' if P == G else 'DIFFERENT'}")
        print(f"  lift:       {P.pretty()}")
        print(f"  gegenbauer: {G.pretty()}")


if __name__ == "__main__":
    main()
