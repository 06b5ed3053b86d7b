"""Command-line harness: ``echo-tdoa {grid,cdf,trial}``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from ._core import BACKEND
from .config import ConfigError, _mode, _switch, parse_config
from .experiment import (ExperimentConfig, GridResult, Mode, cdf_at, empirical_cdf,
                         grid_sweep, trial_detail, trial_seed)
from .geometry import Point3


@dataclass
class RunManifest:
    config: dict
    version: str
    master_seed: int
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0

    def render(self) -> str:
        lines = [f"tool_version = {self.version}",
                 f"kernel_backend = {BACKEND}",
                 f"master_seed = {self.master_seed}",
                 f"duration_s = {self.duration_s:.3f}",
                 "outputs = " + ", ".join(self.outputs),
                 "config = " + json.dumps(self.config, sort_keys=True)]
        return "\n".join(lines) + "\n"


def fmt(x: float) -> str:
    return format(x, ".9g")


def _csv(rows, header: str) -> str:
    return header + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)


def heatmap_pgm(config: ExperimentConfig, result: GridResult) -> bytes:
    """Binary PGM, one pixel per grid point, top row = largest y."""
    nx, ny = len(config.xs), len(config.ys)
    fracs = [p[2] for p in result.points]
    pixels = bytearray()
    for row in reversed(range(ny)):
        for col in range(nx):
            pixels.append(int(math.floor(255.0 * (1.0 - fracs[row * nx + col]) + 0.5)))
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + bytes(pixels)


def _errors_in_metres(config: ExperimentConfig, result: GridResult) -> list[float]:
    scale = config.v if config.mode is Mode.TDOA_2ANCHOR else 1.0
    return [t[3] * scale for t in result.per_trial_errors]


def run_and_write(config: ExperimentConfig, out_dir: str | Path, heatmap: bool = False,
                  result: GridResult | None = None) -> RunManifest:
    """Run a grid sweep (unless ``result`` is given) and write all output files.

    Files written on failure are removed again.
    """
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if result is None:
        result = grid_sweep(config)

    files = {
        "grid.csv": _csv(result.points, "x_m,y_m,error_fraction"),
        "trials.csv": _csv(result.per_trial_errors, "x_m,y_m,latency_s,error"),
        "cdf.csv": _csv(empirical_cdf(_errors_in_metres(config, result)), "error_m,probability"),
    }
    manifest = RunManifest(config.to_dict(), __version__, config.master_seed)
    written = []
    try:
        for name, text in files.items():
            (out / name).write_text(text, encoding="ascii", newline="\n")
            written.append(name)
        if heatmap:
            (out / "heatmap.pgm").write_bytes(heatmap_pgm(config, result))
            written.append("heatmap.pgm")
        manifest.outputs = written + ["manifest.txt"]
        manifest.duration_s = time.perf_counter() - start
        (out / "manifest.txt").write_text(manifest.render(), encoding="utf-8")
    except OSError:
        for name in written + ["manifest.txt"]:
            (out / name).unlink(missing_ok=True)
        raise
    return manifest


def _progress(done: int, total: int):
    print(f"\r  rows {done}/{total}", end="" if done < total else "\n", file=sys.stderr)


def _summary(config: ExperimentConfig, result: GridResult) -> str:
    fr = result.fractions()
    errs = _errors_in_metres(config, result)
    cdf = empirical_cdf(errs)
    return (f"mode={config.mode.value} sigma={config.sigma:g} "
            f"heuristic={'on' if config.heuristic_on else 'off'} points={len(fr)} "
            f"mean_error_fraction={fr.mean():.4f} P(err<=1cm)={cdf_at(cdf, 0.01):.4f}")


def cmd_grid(config: ExperimentConfig, args) -> int:
    result = grid_sweep(config, progress=_progress if args.verbose else None)
    run_and_write(config, args.out, heatmap=args.heatmap, result=result)
    print(_summary(config, result))
    return 0


def cmd_cdf(config: ExperimentConfig, args) -> int:
    out = Path(args.out)
    curves = {}
    for label, on in (("heuristic_off", False), ("heuristic_on", True)):
        cfg = replace(config, heuristic_on=on)
        result = grid_sweep(cfg, progress=_progress if args.verbose else None)
        run_and_write(cfg, out / label, heatmap=args.heatmap, result=result)
        curves[label] = empirical_cdf(_errors_in_metres(cfg, result))
        print(_summary(cfg, result))
    xs = sorted({x for c in curves.values() for x, _ in c})
    rows = [(x, cdf_at(curves["heuristic_off"], x), cdf_at(curves["heuristic_on"], x)) for x in xs]
    (out / "cdf_compare.csv").write_text(_csv(rows, "error_m,p_heuristic_off,p_heuristic_on"),
                                         encoding="ascii", newline="\n")
    return 0


def cmd_trial(config: ExperimentConfig, args) -> int:
    mobile = Point3(args.x, args.y)
    seed = args.trial_seed if args.trial_seed is not None else trial_seed(config.master_seed, 0, 0)
    detail = trial_detail(config, mobile, args.latency, seed)
    dump = {
        "mobile": [mobile.x, mobile.y],
        "latency_s": args.latency,
        "trial_seed": seed,
        "heuristic": config.heuristic_on,
        "toa_mod_s": {str(t.anchor_id): t.toa_mod for t in detail.toas},
        "peak_value": {str(t.anchor_id): t.peak_value for t in detail.toas},
        "reference_id": detail.raw.reference_id,
        "raw_range_diff_m": {str(e.anchor_id): e.d for e in detail.raw.diffs},
        "used_range_diff_m": {str(e.anchor_id): e.d for e in detail.used.diffs},
        "wrap_corrected": {str(e.anchor_id): e.corrected for e in detail.used.diffs},
        "estimate": None if detail.estimate is None else [detail.estimate.x, detail.estimate.y],
        "error": detail.error if math.isfinite(detail.error) else None,
    }
    print(json.dumps(dump, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--sigma", type=float, help="noise standard deviation")
    common.add_argument("--pitch", type=float, help="grid pitch, m")
    common.add_argument("--heuristic", type=_switch, metavar="on|off")
    common.add_argument("--mode", type=_mode, metavar="tdoa2|pos3")
    common.add_argument("--heatmap", action="store_true", help="also write heatmap.pgm")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="echo-tdoa", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("grid", parents=[common], help="error-fraction map over the grid")
    sub.add_parser("cdf", parents=[common], help="positioning-error CDFs, heuristic off vs on")
    t = sub.add_parser("trial", parents=[common], help="single-trial debug dump")
    t.add_argument("--x", type=float, required=True)
    t.add_argument("--y", type=float, required=True)
    t.add_argument("--latency", type=float, default=0.0)
    t.add_argument("--trial-seed", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for key, attr in ((("experiment", "seed"), "seed"), (("channel", "sigma"), "sigma"),
                      (("experiment", "pitch"), "pitch"), (("experiment", "heuristic"), "heuristic"),
                      (("experiment", "mode"), "mode")):
        if getattr(args, attr) is not None:
            overrides[key] = getattr(args, attr)
    try:
        config = parse_config(args.config, overrides)
        handler = {"grid": cmd_grid, "cdf": cmd_cdf, "trial": cmd_trial}[args.command]
        return handler(config, args)
    except (ConfigError, OSError, ValueError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"echo-tdoa: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
