"""Causality ratio C(tau, rho) of the massless scaled Gaussian for several times.

Writes one plot-ready CSV per tau with columns rho, C.

    python scripts/causality_curves.py --out runs/causality --taus 2 5 10
"""
import argparse
from pathlib import Path

import numpy as np

from relamp import causality as caus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("runs/causality"))
    ap.add_argument("--taus", type=float, nargs="+", default=[2.0, 5.0, 10.0])
    ap.add_argument("--rho-max", type=float, default=10.0)
    ap.add_argument("--step", type=float, default=0.1)
    ap.add_argument("--mass-ratio", type=float, default=0.0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    grid = caus.rho_grid(args.step, args.rho_max, args.step)
    for tau in args.taus:
        c = caus.causality_scan(tau, grid, mass_ratio=args.mass_ratio)
        np.savetxt(args.out / f"C_tau{tau:g}.csv", np.column_stack([c.rho, c.ratio]), delimiter=",",
                   header="rho,C", comments="", fmt="%.17g")
        print(f"tau = {tau:5g}: min C = {c.min:.7f} at rho = {c.argmin:.2f}, "
              f"{len(c.violations())} grid points below 1, C(rho_max) = {c.ratio[-1]:.7f}")


if __name__ == "__main__":
    main()
