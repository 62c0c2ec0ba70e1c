"""Error of the forward-difference Riemann oracle against the engine as n grows."""

import argparse

from qslfilter import FilterOp, OhmicSpec, RtnSpec, filtered_trajectory, qsl_general
from qslfilter.engine import make_channel
from qslfilter.oracles import riemann_filtered_qsl

CASES = {
    "s=0.5": OhmicSpec(0.5),
    "s=3.5": OhmicSpec(3.5),
    "rtn alpha=0.2": RtnSpec(0.2),
    "rtn alpha=2": RtnSpec(2.0),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=float, default=0.3)
    parser.add_argument("--tau", type=float, default=0.7)
    parser.add_argument("--tau-d", type=float, default=1.0)
    args = parser.parse_args()
    ns = (1_000, 4_000, 16_000, 64_000, 256_000)
    print("case".ljust(16) + "".join(f"n={n:<10d}" for n in ns))
    for name, spec in CASES.items():
        traj = filtered_trajectory(make_channel(spec), FilterOp(args.k))
        exact = qsl_general(traj, args.tau, args.tau_d).tau_qsl
        errs = [abs(riemann_filtered_qsl(spec, args.k, args.tau, args.tau_d, n=n).tau_qsl - exact) / exact for n in ns]
        print(name.ljust(16) + "".join(f"{e:<12.2e}" for e in errs))


if __name__ == "__main__":
    main()
