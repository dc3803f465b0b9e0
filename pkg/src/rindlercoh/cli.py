"""Command-line front end.

Every output starts with a provenance header whose ``command`` line
reproduces the file (apart from the ``created`` timestamp) when re-run.
Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import logging
import os
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ChannelError
from .gaussian import CONVENTIONS, UnphysicalStateError
from .mismatch import mismatch_sweep, mode_mismatch
from .modes import InvalidModeSpec, ModeSpec, build_grid, sample_input, sample_output
from .overlaps import DEFAULT_RTOL, ENGINE_VERSION, overlap_curve
from .quadrature import QuadratureError
from .reports import Table, read_table, render_svg, table_to_text
from .special import BesselConvergenceError
from .sweeps import (
    SCAN_COLUMNS,
    ScanConfig,
    ScanConfigError,
    ScanRecord,
    coherence_surface,
    median_contour,
    random_scan,
    scan_provenance,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("rindlercoh")

CACHE_ENV = "RINDLERCOH_CACHE_DIR"
# options that never change the produced file
_NOT_RECORDED = {"command", "output", "config", "cache_dir", "no_cache", "workers", "verbose",
                 "golden"}


class UsageError(Exception):
    pass


def parse_values(text: str) -> list[float]:
    """``lo:hi:n`` (n evenly spaced points, ends included) or a comma list."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return [lo] if n == 1 else [float(v) for v in np.linspace(lo, hi, n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n or a comma list, got {text!r}")


def parse_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return lo, hi


def _common(p: argparse.ArgumentParser, formats=("csv", "json", "svg")):
    p.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=formats, default="csv")
    p.add_argument("--config", help="TOML file with option defaults (flat keys)")
    p.add_argument("-v", "--verbose", action="store_true")


def _waveform(p, accel=True, omega0=5.0):
    if accel:
        p.add_argument("--accel", type=float, default=0.1)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--omega0", type=float, default=omega0)
    p.add_argument("--mass", type=float, default=0.1)


def _cache(p):
    p.add_argument("--cache-dir", default=None,
                   help=f"overlap cache directory (default: ${CACHE_ENV} or ~/.cache/rindlercoh)")
    p.add_argument("--no-cache", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rindlercoh",
        description="Gaussian coherence of localized two-mode states seen by accelerated observers",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", help="input/output packet profiles at t = 0")
    _waveform(p)
    p.add_argument("--region", choices=("I", "II"), default="I")
    _common(p)

    p = sub.add_parser("overlaps", help="Bogolyubov coefficients versus acceleration")
    p.add_argument("--accels", type=parse_values, default=parse_values("0.02:0.2:10"))
    _waveform(p, accel=False)
    p.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
    _cache(p)
    _common(p)

    p = sub.add_parser("surface", help="coherence over an (accel_I, accel_II) grid")
    p.add_argument("--accels-i", type=parse_values, default=parse_values("0.001:0.2:8"))
    p.add_argument("--accels-ii", type=parse_values, default=parse_values("0.001:0.2:8"))
    p.add_argument("--r", type=float, default=1.0)
    _waveform(p, accel=False)
    p.add_argument("--convention", choices=CONVENTIONS, default="physical")
    _cache(p)
    _common(p)

    p = sub.add_parser("mismatch", help="mode mismatch sweeps")
    p.add_argument("--panel", choices=("acceleration", "waveform"), default="acceleration")
    p.add_argument("--accels", type=parse_values, default=parse_values("0.02:0.2:10"),
                   help="acceleration panel: grid for both observers")
    p.add_argument("--widths", type=parse_values, default=parse_values("1:2:5"))
    p.add_argument("--omega0s", type=parse_values, default=parse_values("4:6:5"))
    _waveform(p, omega0=4.7)
    p.add_argument("--golden", help="also write the fiducial mismatch as a JSON fixture")
    _cache(p)
    _common(p)

    p = sub.add_parser("scan", help="random state scan")
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--r-range", type=parse_pair, default=(1.0, 3.0))
    p.add_argument("--accel-range", type=parse_pair, default=(0.01, 0.2))
    p.add_argument("--width-range", type=parse_pair, default=(1.0, 3.0))
    p.add_argument("--omega0-range", type=parse_pair, default=(4.0, 6.0))
    p.add_argument("--mass", type=float, default=0.1)
    p.add_argument("--convention", choices=CONVENTIONS, default="physical")
    _cache(p)
    _common(p)

    p = sub.add_parser("contour", help="median-coherence contour of a scan CSV")
    p.add_argument("--input", required=True, help="CSV written by 'scan'")
    p.add_argument("--r-bins", type=int, default=10)
    p.add_argument("--m-bins", type=int, default=10)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--mismatch-scale", choices=("log", "linear"), default="log")
    _common(p)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser, argv):
    """Re-parse with TOML defaults; unknown keys are rejected."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    sub = _subparser(parser, args.command)
    actions = {a.dest: a for a in sub._actions if a.dest != "help"}
    defaults = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in actions or dest in ("config", "command"):
            parser.error(f"unknown key {key!r} in config {args.config}")
        if isinstance(value, dict):
            parser.error(f"config {args.config}: nested tables are not supported ({key})")
        action = actions[dest]
        if isinstance(value, list):
            value = ",".join(str(v) for v in value) if dest not in (
                "r_range", "accel_range", "width_range", "omega0_range") else ":".join(map(str, value))
        if action.type is not None and isinstance(value, str):
            try:
                value = action.type(value)
            except argparse.ArgumentTypeError as exc:
                parser.error(f"config {args.config}: {key}: {exc}")
        elif action.type is not None:
            value = action.type(str(value)) if action.type in (parse_values, parse_pair) else value
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _command_line(args) -> str:
    """Canonical command reproducing this run, with every option spelled out."""
    parts = ["rindlercoh", args.command]
    for key, value in sorted(vars(args).items()):
        if key in _NOT_RECORDED or value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                parts.append(flag)
            continue
        if isinstance(value, list):
            value = ",".join(repr(float(v)) for v in value)
        elif isinstance(value, tuple):
            value = ":".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        parts += [flag, str(value)]
    return shlex.join(parts)


def _provenance(args, extra: dict | None = None) -> dict:
    prov = {
        "tool": f"rindlercoh {__version__}",
        "engine_version": ENGINE_VERSION,
        "command": _command_line(args),
    }
    prov.update(extra or {})
    prov["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return prov


def _cache_dir(args):
    if getattr(args, "no_cache", False):
        return None
    if args.cache_dir:
        return args.cache_dir
    return os.environ.get(CACHE_ENV) or str(Path.home() / ".cache" / "rindlercoh")


def _emit(args, table: Table, plot: dict):
    if args.format == "svg":
        try:
            text = render_svg(table, **plot)
        except ValueError as exc:
            raise UsageError(f"cannot plot: {exc}")
    else:
        text = table_to_text(table, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)


def _spec(args, accel, region="I") -> ModeSpec:
    return ModeSpec(region, accel, args.width, args.omega0, args.mass)


def cmd_modes(args):
    spec = _spec(args, args.accel, args.region)
    grid = build_grid(spec)
    phi = sample_input(spec, grid)
    psi = sample_output(spec, grid)
    sign = spec.region.sign
    xs = sign * grid
    rows = [(float(x), float(a), float(b)) for x, a, b in zip(xs, phi.values, psi.values)]
    if sign < 0:
        rows.reverse()
    prov = _provenance(args, {"accel": args.accel, "width": args.width, "omega0": args.omega0,
                              "mass": args.mass, "region": args.region,
                              "C_input": phi.norm_constant, "C_output": psi.norm_constant})
    table = Table(["x", "input", "output"], rows, prov)
    _emit(args, table, dict(plot_kind="lines", x="x", y=["input", "output"],
                            title="input and output packets"))


def cmd_overlaps(args):
    base = ModeSpec("I", args.accels[0] if args.accels else 0.1, args.width, args.omega0,
                    args.mass, guards=False)
    rows = []
    for accel, res in overlap_curve(base, args.accels, args.rtol, _cache_dir(args)):
        if isinstance(res, Exception):
            log.warning("accel=%g skipped: %s", accel, res)
            rows.append((accel, None, None, None, None))
        else:
            rows.append((accel, res.alpha.real, res.alpha.imag, res.beta.real, res.beta.imag))
    prov = _provenance(args, {"width": args.width, "omega0": args.omega0, "mass": args.mass,
                              "rtol": args.rtol})
    table = Table(["accel", "alpha_re", "alpha_im", "beta_re", "beta_im"], rows, prov)
    _emit(args, table, dict(plot_kind="lines", x="accel", y=["alpha_re", "beta_re"],
                            title="Bogolyubov coefficients"))


def cmd_surface(args):
    rows = coherence_surface(args.accels_i, args.accels_ii, args.r, args.width, args.omega0,
                             args.mass, args.convention, _cache_dir(args))
    for row in rows:
        if row.skipped:
            log.warning("(%g, %g) skipped: %s", row.accel_I, row.accel_II, row.skipped)
    prov = _provenance(args, {"r": args.r, "width": args.width, "omega0": args.omega0,
                              "mass": args.mass, "convention": args.convention})
    table = Table(["accel_I", "accel_II", "coherence"],
                  [(r.accel_I, r.accel_II, r.coherence) for r in rows], prov)
    _emit(args, table, dict(plot_kind="heatmap", x="accel_I", y="accel_II", value="coherence",
                            title="coherence of the accelerated state"))


def cmd_mismatch(args):
    cache = _cache_dir(args)
    if args.panel == "acceleration":
        fixed = {"width": args.width, "omega0": args.omega0, "mass": args.mass}
        varying = {"accel_I": args.accels, "accel_II": args.accels}
    else:
        fixed = {"accel": args.accel, "mass": args.mass}
        varying = {"width": args.widths, "omega0": args.omega0s}
    names = list(varying)
    rows = mismatch_sweep(fixed, varying, cache)
    for row in rows:
        if row.skipped:
            log.warning("(%s=%g, %s=%g) skipped: %s", names[0], row.param1, names[1],
                        row.param2, row.skipped)
    prov = _provenance(args, {"panel": args.panel, "param1": names[0], "param2": names[1],
                              "fixed": fixed})
    table = Table(["param1", "param2", "mismatch"],
                  [(r.param1, r.param2, r.mismatch) for r in rows], prov)
    _emit(args, table, dict(plot_kind="heatmap", x="param1", y="param2", value="mismatch",
                            title=f"mode mismatch ({args.panel} panel)"))
    if args.golden:
        write_golden_mismatch(args.golden)


def write_golden_mismatch(path) -> dict:
    spec = ModeSpec("I", 0.1, 2.0, 4.7, 0.1)
    res = mode_mismatch(spec)
    payload = {"accel": 0.1, "width": 2.0, "omega0": 4.7, "mass": 0.1,
               "mismatch": res.value, "grid_points": res.grid_points,
               "engine_version": ENGINE_VERSION}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")
    return payload


def _scan_config(args) -> ScanConfig:
    return ScanConfig(seed=args.seed, count=args.count, r_range=args.r_range,
                      accel_range=args.accel_range, width_range=args.width_range,
                      omega0_range=args.omega0_range, mass=args.mass,
                      convention=args.convention, workers=args.workers)


def cmd_scan(args):
    config = _scan_config(args)
    records = random_scan(config, _cache_dir(args))
    prov = _provenance(args, scan_provenance(config))
    rows = [tuple(getattr(rec, c) for c in SCAN_COLUMNS) for rec in records]
    table = Table(list(SCAN_COLUMNS), rows, prov)
    _emit(args, table, dict(plot_kind="scatter", x="r", y="mismatch", value="coherence",
                            title="random scan"))


def cmd_contour(args):
    try:
        src = read_table(args.input)
    except (OSError, StopIteration) as exc:
        raise UsageError(f"cannot read scan table {args.input}: {exc}")
    missing = set(SCAN_COLUMNS) - set(src.columns)
    if missing:
        raise UsageError(f"{args.input} lacks columns {sorted(missing)}")
    records = [ScanRecord(**{c: row[src.columns.index(c)] for c in SCAN_COLUMNS})
               for row in src.rows]
    res = median_contour(records, args.r_bins, args.m_bins, args.min_count, args.mismatch_scale)
    if res.diagnostic:
        log.warning("contour: %s", res.diagnostic)
    rows = [(k, float(r), float(m)) for k, line in enumerate(res.polylines) for r, m in line]
    # hash the scan content, ignoring its creation timestamp
    body = [ln for ln in Path(args.input).read_text().splitlines(keepends=True)
            if not ln.startswith("# created:")]
    digest = hashlib.sha256("".join(body).encode()).hexdigest()[:16]
    prov = _provenance(args, {"input_sha256": digest, "level": res.level,
                              "flagged_bins": res.flagged_bins,
                              "diagnostic": res.diagnostic or "none"})
    table = Table(["piece", "r", "mismatch"], rows, prov)
    _emit(args, table, dict(plot_kind="lines", x="r", y=["mismatch"],
                            title="median coherence contour"))


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest(verbose=args.verbose) else 1


COMMANDS = {
    "modes": cmd_modes,
    "overlaps": cmd_overlaps,
    "surface": cmd_surface,
    "mismatch": cmd_mismatch,
    "scan": cmd_scan,
    "contour": cmd_contour,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        status = COMMANDS[args.command](args)
    except (UsageError, InvalidModeSpec, ScanConfigError) as exc:
        print(f"rindlercoh {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, QuadratureError, BesselConvergenceError, UnphysicalStateError,
            ChannelError) as exc:
        print(f"rindlercoh {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
