"""Command-line front end.

    qslfilter figure fig3 --out figures --svg
    qslfilter sweep --model rtn --alpha 2 --k 0.2,0.8 --tau-end 5 --steps 50
    qslfilter validate --level full --seed 7

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .channels import OhmicSpec, RtnSpec
from .engine import COLUMNS, VARIANTS, QuadConfig, SweepRow, sweep
from .filtering import FilterOp
from .oracles import run_validation
from .svg import line_plot

MODELS = ("phase-damping", "rtn")
FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "phase-damping"
    s: float = 1.0
    omega_c: float = 1.0
    alpha: float = 2.0
    delta: float = 1.0
    k: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    tau_start: float = 0.0
    tau_end: float = 10.0
    steps: int = 400
    tau_d: float = 1.0
    variant: str = "paper"
    points: int = 128
    tol: float = 1e-11
    out: str | None = None
    format: str = "csv"

    def validate(self) -> RunConfig:
        if self.model not in MODELS:
            raise ConfigError(f"model: must be one of {MODELS}, got {self.model!r}")
        try:
            self.channel_spec()
        except ValueError as exc:
            key = "s/omega_c" if self.model == "phase-damping" else "alpha/delta"
            raise ConfigError(f"{key}: {exc}") from None
        if not self.k:
            raise ConfigError("k: need at least one filter parameter")
        for k in self.k:
            try:
                FilterOp(k)
            except ValueError as exc:
                raise ConfigError(f"k: {exc}") from None
        if self.tau_start < 0:
            raise ConfigError(f"tau_start: must be >= 0, got {self.tau_start}")
        if self.tau_end < self.tau_start:
            raise ConfigError("tau_end: must be >= tau_start")
        if self.steps < 0 or (self.steps == 0 and self.tau_end != self.tau_start):
            raise ConfigError(f"steps: must be >= 1, got {self.steps}")
        if not self.tau_d > 0:
            raise ConfigError(f"tau_d: must be > 0, got {self.tau_d}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant: must be one of {VARIANTS}, got {self.variant!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: must be one of {FORMATS}, got {self.format!r}")
        if self.points < 64:
            raise ConfigError(f"points: need at least 64 per driving window, got {self.points}")
        if not self.tol > 0:
            raise ConfigError(f"tol: must be > 0, got {self.tol}")
        return self

    def channel_spec(self) -> OhmicSpec | RtnSpec:
        if self.model == "phase-damping":
            return OhmicSpec(self.s, self.omega_c)
        return RtnSpec(self.alpha, self.delta)

    def taus(self) -> np.ndarray:
        if self.steps == 0:
            return np.array([self.tau_start])
        return np.linspace(self.tau_start, self.tau_end, self.steps + 1)

    def model_parameters(self) -> dict:
        keys = ("s", "omega_c") if self.model == "phase-damping" else ("alpha", "delta")
        return {key: getattr(self, key) for key in keys}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if key == "k":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def load_config(path: str | Path) -> dict:
    """Read a flat ``key = value`` file. Unknown keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from None
    values = {}
    for key, raw in parser["run"].items():
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES:
            raise ConfigError(f"{key}: unknown configuration key")
        values[name] = _coerce(name, raw)
    return values


FIGURES = {
    "fig1": dict(model="phase-damping", s=0.5),
    "fig2": dict(model="phase-damping", s=1.0),
    "fig3": dict(model="phase-damping", s=3.5),
    "fig4": dict(model="rtn", alpha=0.2, delta=1.0),
    "fig5": dict(model="rtn", alpha=2.0, delta=1.0),
}

FIGURE_TITLES = {
    "fig1": "sub-Ohmic bath, s = 0.5",
    "fig2": "Ohmic bath, s = 1",
    "fig3": "super-Ohmic bath, s = 3.5",
    "fig4": "telegraph noise, alpha*delta = 1/5",
    "fig5": "telegraph noise, alpha*delta = 2",
}


def figure_config(name: str, **overrides) -> RunConfig:
    if name not in FIGURES:
        raise ConfigError(f"figure: unknown preset {name!r}, expected one of {sorted(FIGURES)}")
    return RunConfig(**{**FIGURES[name], **overrides}).validate()


def run_config(cfg: RunConfig) -> list[SweepRow]:
    return sweep(cfg.channel_spec(), cfg.k, cfg.taus(), cfg.tau_d, QuadConfig(cfg.points, cfg.tol), cfg.variant)


def _fmt(x) -> str:
    return f"{x:.12g}"


def header_lines(cfg: RunConfig, extra: dict | None = None) -> list[str]:
    lines = [f"# qslfilter {__version__}"]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val}")
    params = asdict(cfg)
    params["k"] = ",".join(_fmt(k) for k in cfg.k)
    params.pop("out")
    for key, val in params.items():
        lines.append(f"# {key}={_fmt(val) if isinstance(val, float) else val}")
    return lines


def render_csv(cfg: RunConfig, rows: list[SweepRow], extra: dict | None = None) -> str:
    buf = io.StringIO()
    for line in header_lines(cfg, extra):
        buf.write(line + "\n")
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(getattr(row, c)) for c in COLUMNS) + "\n")
    return buf.getvalue()


def render_json(cfg: RunConfig, rows: list[SweepRow], extra: dict | None = None) -> str:
    params = {**(extra or {}), **{k: v for k, v in asdict(cfg).items() if k != "out"}}
    return json.dumps({"parameters": params, "columns": list(COLUMNS), "rows": [r.as_dict() for r in rows]}, indent=1) + "\n"


def render_svg(cfg: RunConfig, rows: list[SweepRow], title: str = "") -> str:
    series = {}
    for k in cfg.k:
        sel = [r for r in rows if r.k == k]
        series[f"k = {k:g}"] = ([r.tau for r in sel], [r.tau_qsl for r in sel])
    return line_plot(series, title=title or cfg.model, xlabel="initial time tau", ylabel=f"QSL time ({cfg.variant})")


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"out: cannot write {path}: {exc}") from None


def cmd_figure(name: str, out_dir: str | Path = ".", svg: bool = False, **overrides) -> list[Path]:
    cfg = figure_config(name, **overrides)
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise ConfigError(f"out: {out_dir} is not a directory")
    rows = run_config(cfg)
    written = [out_dir / f"{name}.csv"]
    _write(written[0], render_csv(cfg, rows, {"figure": name}))
    if svg:
        written.append(out_dir / f"{name}.svg")
        _write(written[1], render_svg(cfg, rows, f"{name}: {FIGURE_TITLES[name]}"))
    return written


def cmd_sweep(cfg: RunConfig) -> str:
    cfg.validate()
    if cfg.out and not Path(cfg.out).resolve().parent.is_dir():
        raise ConfigError(f"out: directory of {cfg.out} does not exist")
    rows = run_config(cfg)
    text = {"csv": render_csv, "json": render_json}.get(cfg.format, None)
    body = text(cfg, rows) if text else render_svg(cfg, rows)
    if cfg.out:
        _write(Path(cfg.out), body)
    return body


def cmd_validate(level: str = "quick", seed: int = 0):
    return run_validation(level, seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qslfilter", description="Quantum speed limit times of filtered dephasing qubits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="reproduce a figure preset")
    fig.add_argument("name", choices=sorted(FIGURES))
    fig.add_argument("--out", default=".", help="output directory")
    fig.add_argument("--svg", action="store_true", help="also write an SVG plot")

    sw = sub.add_parser("sweep", help="custom (k, tau) sweep")
    sw.add_argument("--config", help="flat key = value file; flags override it")
    sw.add_argument("--model", choices=MODELS)
    sw.add_argument("--s", type=float)
    sw.add_argument("--omega-c", dest="omega_c", type=float)
    sw.add_argument("--alpha", type=float)
    sw.add_argument("--delta", type=float)
    sw.add_argument("--k", help="comma-separated filter parameters")
    sw.add_argument("--tau-start", dest="tau_start", type=float)
    sw.add_argument("--tau-end", dest="tau_end", type=float)
    sw.add_argument("--steps", type=int, help="number of tau intervals")
    sw.add_argument("--tau-d", dest="tau_d", type=float)
    sw.add_argument("--variant", choices=VARIANTS)
    sw.add_argument("--points", type=int, help="Simpson intervals per driving window")
    sw.add_argument("--out", help="output file (default: stdout)")
    sw.add_argument("--format", choices=FORMATS)

    va = sub.add_parser("validate", help="run the oracle cross-checks")
    va.add_argument("--level", choices=("quick", "full"), default="quick")
    va.add_argument("--seed", type=int, default=0)
    return parser


def sweep_config_from_args(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for name in _FIELD_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = _coerce(name, flag) if name == "k" else flag
    return RunConfig(**values).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure":
            for path in cmd_figure(args.name, args.out, args.svg):
                print(path)
            return 0
        if args.command == "sweep":
            cfg = sweep_config_from_args(args)
            body = cmd_sweep(cfg)
            if not cfg.out:
                sys.stdout.write(body)
            return 0
        report = cmd_validate(args.level, args.seed)
        print(report.render())
        return 0 if report.ok else 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
