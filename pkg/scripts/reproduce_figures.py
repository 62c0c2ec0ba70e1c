"""Regenerate all five figure presets as CSV and SVG.

    python3 scripts/reproduce_figures.py --out figures
"""

import argparse
import time
from pathlib import Path

from qslfilter.cli import FIGURES, cmd_figure


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures")
    parser.add_argument("--steps", type=int, default=None, help="override the number of tau intervals")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    overrides = {} if args.steps is None else {"steps": args.steps}
    for name in sorted(FIGURES):
        start = time.perf_counter()
        paths = cmd_figure(name, out, svg=True, **overrides)
        print(f"{name}: {', '.join(str(p) for p in paths)} ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
