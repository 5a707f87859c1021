"""Worst-case joint fidelity of a 1 -> 2 cloner as its normal weight varies.

Also reports how far the reference cloner is from shift covariance and what
the grid twirl does to that distance.

    python3 scripts/cloner_scan.py --cutoff 20 --points 5 --steps 11
"""

import argparse
import time

import numpy as np

from opalg.cloner import (
    NORMAL,
    ClonerDecomposition,
    coherent_test_states,
    covariance_residual,
    covariantize,
    decomposed_fidelity_scan,
    symmetric_splitter_cloner,
)
from opalg.fock import FockMode, phase_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoff", type=int, default=20)
    ap.add_argument("--points", type=int, default=5, help="grid points per axis")
    ap.add_argument("--spacing", type=float, default=0.5)
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--twirl", action="store_true", help="also covariantize the reference cloner")
    args = ap.parse_args()

    mode = FockMode(args.cutoff)
    grid = phase_grid(args.points, args.spacing)
    psi = symmetric_splitter_cloner(mode)
    t0 = time.perf_counter()
    scan = decomposed_fidelity_scan(ClonerDecomposition({NORMAL: 1.0}, psi), grid, mode, args.steps)
    print(f"{'c12':>6}  {'F':>10}  {'c12*F(psi)':>10}")
    for c, f in scan.rows:
        print(f"{c:6.2f}  {f:10.6f}  {c * scan.normal_fidelity:10.6f}")
    print(f"affine deviation {scan.affine_deviation:.2e}, argmax c12 = {scan.argmax}")
    print(f"fidelity spread over the grid {scan.flatness:.4f} ({time.perf_counter() - t0:.1f}s)")

    if args.twirl:
        tests = coherent_test_states(mode, [np.zeros(2), np.array([args.spacing, 0.0])])
        before = covariance_residual(psi, grid, tests, mode)
        tw = covariantize(psi, grid, mode)
        after = covariance_residual(tw, grid, tests, mode)
        print(f"covariance residual: reference {before:.3e}, twirled {after:.3e} ({len(tw.kraus)} Kraus operators)")


if __name__ == "__main__":
    main()
