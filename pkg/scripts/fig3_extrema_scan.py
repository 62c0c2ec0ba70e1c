"""Count local extrema of the super-Ohmic QSL curve over a range of driving times.

The decay rate of the s = 3.5 bath changes sign once, at omega_c t = tan(pi/s),
so the curve shows one dip and no later peak. This scan makes that visible.
"""

import argparse
import math

import numpy as np

from qslfilter import FilterOp, OhmicSpec, filtered_trajectory, phase_damping, qsl_general


def extrema(y: np.ndarray) -> tuple[list[int], list[int]]:
    d = np.sign(np.diff(y))
    d = d[d != 0]
    mins = [i for i in range(1, len(d)) if d[i - 1] < 0 < d[i]]
    maxs = [i for i in range(1, len(d)) if d[i - 1] > 0 > d[i]]
    return mins, maxs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--s", type=float, default=3.5)
    parser.add_argument("--k", type=float, default=0.5)
    parser.add_argument("--steps", type=int, default=200)
    args = parser.parse_args()
    channel = phase_damping(OhmicSpec(args.s))
    traj = filtered_trajectory(channel, FilterOp(args.k))
    print(f"rate sign change at t = {math.tan(math.pi / args.s):.6f}")
    taus = np.linspace(0.0, 10.0, args.steps + 1)
    for tau_d in (0.25, 0.5, 1.0, 2.0, 4.0):
        y = np.array([qsl_general(traj, t, tau_d).tau_qsl for t in taus])
        mins, maxs = extrema(y)
        where = ", ".join(f"{taus[i]:.2f}" for i in mins) or "-"
        print(f"tau_d={tau_d:<5g} minima {len(mins)} at [{where}], maxima {len(maxs)}")


if __name__ == "__main__":
    main()
