"""How far the boosted average event strays from Lambda x as the packet widens.

Scans sigma_p at fixed pbar and boost, printing the measured relative
deviation next to the beta^2 (sigma_p/|pbar|)^2 estimate.
"""
import argparse

import numpy as np

from relamp import position as pos
from relamp.amplitudes import ParticleSpec, gaussian


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pbar", type=float, default=5.0)
    ap.add_argument("--beta0", type=float, nargs=3, default=[0.0, 0.5, 0.0])
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.02, 0.05, 0.1, 0.2, 0.4])
    args = ap.parse_args()

    par = ParticleSpec(1.0, 0)
    print(f"{'sigma_p':>8} {'deviation':>11} {'bound':>11} {'ratio':>7}")
    for s in args.sigmas:
        psi = gaussian(par, [args.pbar, 0, 0], s, [1.0, -2.0, 0.5])
        try:
            ev = pos.average_event(psi, args.beta0, args.t)
        except ValueError as exc:
            print(f"{s:8.3g}  refused: {exc}")
            continue
        print(f"{s:8.3g} {ev.relative_deviation:11.3e} {ev.epsilon_bound:11.3e} {ev.relative_deviation / ev.epsilon_bound:7.3f}")
    # the x'-formula also carries a time integral identity worth seeing once
    lhs, rhs = pos.t_integral_check(gaussian(par, [args.pbar, 0, 0], 0.1, [1.0, -2.0, 0.5]), args.beta0)
    print("T-integral identity residual:", float(np.max(np.abs(lhs - rhs))))


if __name__ == "__main__":
    main()
