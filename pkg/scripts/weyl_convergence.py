"""Weyl-relation residuals on the shielded block as the Fock cutoff grows.

    python3 scripts/weyl_convergence.py --cutoffs 10 20 40 80 160
"""

import argparse

from opalg.fock import FockMode, weyl_exchange_residual, weyl_relation_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoffs", type=int, nargs="+", default=[10, 20, 40, 80])
    ap.add_argument("--x", type=float, nargs=2, default=[1.0, 0.0])
    ap.add_argument("--y", type=float, nargs=2, default=[0.0, 1.0])
    args = ap.parse_args()
    print(f"{'d':>5}  {'relation':>10}  {'exchange':>10}")
    for d in args.cutoffs:
        mode = FockMode(d)
        rel = weyl_relation_residual(args.x, args.y, mode)
        ex = weyl_exchange_residual(args.x, args.y, mode)
        print(f"{d:>5}  {rel:10.3e}  {ex:10.3e}")


if __name__ == "__main__":
    main()
