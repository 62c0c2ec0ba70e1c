"""QSL times at the Ohmic Markovian point (s = 1, k = 1/2, tau = tau_d = 1).

Prints the engine, Riemann oracle and closed forms side by side, for both the
normalized filtered state and the trace-1/2 family.
"""

import math

from qslfilter import FilterOp, OhmicSpec, filtered_trajectory, phase_damping, qsl_closed_form_pd, qsl_general
from qslfilter.oracles import riemann_filtered_qsl


def main() -> None:
    spec = OhmicSpec(1.0)
    channel = phase_damping(spec)
    for normalized, scale in ((True, 1.0), (False, 0.5)):
        res = qsl_general(filtered_trajectory(channel, FilterOp(0.5), normalized=normalized), 1.0, 1.0)
        ref = riemann_filtered_qsl(spec, 0.5, 1.0, 1.0, scale=scale)
        label = "normalized" if normalized else "trace 1/2"
        print(f"{label:>10}: engine ml {res.tau_ml:.9f} mt {res.tau_mt:.9f} | oracle ml {ref.tau_ml:.9f} mt {ref.tau_mt:.9f}")
    ml = qsl_closed_form_pd(spec, 0.5, 1.0, 1.0, "ml")
    paper = qsl_closed_form_pd(spec, 0.5, 1.0, 1.0, "paper")
    print(f"closed form ml {ml:.9f}, paper variant {paper:.9f}, ratio {ml / paper:.9f} (2 sqrt 2 = {2 * math.sqrt(2):.9f})")


if __name__ == "__main__":
    main()
