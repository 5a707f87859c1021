"""Dixmier-mean estimates for a few eigenvalue sequences across horizons.

    python3 scripts/dixmier_horizons.py --horizons 1e5 1e6 1e7
"""

import argparse

from opalg.dixmier import EigenSequence, singularity_witness

SEQUENCES = {
    "1/k": lambda n: EigenSequence.from_formula("1/k", n),
    "1/k^2": lambda n: EigenSequence.from_formula("k**-2.0", n),
    "log(1+k)/k": lambda n: EigenSequence.from_formula("log(1+k)/k", n),
    "rank 2": lambda n: EigenSequence.from_values([1.0, 1.0], n),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizons", type=float, nargs="+", default=[1e5, 1e6, 1e7])
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()
    print(f"{'sequence':>12} {'horizon':>9} {'estimate':>11} {'spread':>9} {'dilation':>9} {'head<=1000':>10} {'trace cl.':>9}")
    for name, make in SEQUENCES.items():
        for h in args.horizons:
            h = int(h)
            try:
                w = singularity_witness(make(h), h, args.depth)
            except ValueError as exc:
                print(f"{name:>12} {h:9.0e}  {exc}")
                continue
            head = max([*w.head_shifts.values(), *w.sigma_head_shifts.values()], default=0.0)
            print(
                f"{name:>12} {h:9.0e} {w.estimate:11.6f} {w.spread:9.2e} "
                f"{w.dilation_shift:9.2e} {head:10.2e} {str(w.trace_class):>9}"
            )


if __name__ == "__main__":
    main()
