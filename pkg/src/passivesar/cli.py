"""Command-line entry point: ``passivesar {evaluate,resolution-map,image,verify}``.

Exit status is 0 on success, 1 when an evaluation fails and 2 for usage or
scenario validation errors. Errors are also written to stderr as one JSON
object per line.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import echosim
from .comms import path_capacity, write_rate_trace_csv
from .mission import (ScenarioError, evaluate_mission, load_scenario, report_csv,
                      report_table)
from .sargeom import platform_states, resolution_cell, scene_resolution_evaluator
from .threat import threat_trace, write_threat_trace_csv

EXIT_OK, EXIT_EVAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _error(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)


def _pick_path(spec, name: str):
    if name not in spec.paths:
        raise UsageError(f"unknown path {name!r}; valid paths: {', '.join(spec.paths)}")
    return spec.paths[name]


def _cmd_evaluate(args, spec) -> int:
    report = evaluate_mission(spec, jobs=args.jobs)
    out = Path(args.csv or f"{spec.name}_report.csv")
    out.write_text(report_csv(report))
    print(report_table(report))
    print(f"report written to {out}")
    if args.traces:
        tdir = Path(args.traces)
        tdir.mkdir(parents=True, exist_ok=True)
        for name, fp in spec.paths.items():
            with open(tdir / f"{name}_threat.csv", "w") as fh:
                write_threat_trace_csv(threat_trace(fp, spec.terrain, spec.threat), fh)
            with open(tdir / f"{name}_rate.csv", "w") as fh:
                write_rate_trace_csv(path_capacity(fp, spec.comms), fh)
    for row in report.rows:
        if row.error:
            _error("evaluation", row.error, path=row.name)
    return EXIT_OK if report.ok else EXIT_EVAL


def _cmd_resolution_map(args, spec) -> int:
    fp = _pick_path(spec, args.path)
    window = spec.window_for(fp)
    s_bar, samples, factor = scene_resolution_evaluator(spec.illuminator, fp, window,
                                                        spec.scene, spec.radar)
    out = Path(args.out or f"{spec.name}_{args.path}_resolution.csv")
    with open(out, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_m", "y_m", "rho_r_m", "rho_a_m", "psi_rad", "S_c_m2"])
        for s in samples:
            w.writerow([f"{s.target[0]:.3f}", f"{s.target[1]:.3f}", f"{s.rho_r:.6g}",
                        f"{s.rho_a:.6g}", f"{s.psi:.6g}", f"{s.S_c:.6g}"])
    print(f"S_c_bar = {s_bar:.4f} m^2, disequilibrium = {factor:.4f}; grid written to {out}")
    return EXIT_OK


def _target_positions(spec, n: int, random: bool, seed: int | None):
    if not random:
        from .sargeom import SceneSpec
        return SceneSpec(spec.scene.center, spec.scene.range_extent,
                         spec.scene.azimuth_extent, n).sample_points()
    rng = np.random.default_rng(seed)
    u = rng.uniform(-0.5, 0.5, size=(n, 2))
    pts = np.tile(spec.scene.center, (n, 1))
    pts[:, 0] += u[:, 0] * spec.scene.range_extent
    pts[:, 1] += u[:, 1] * spec.scene.azimuth_extent
    return pts


def _cmd_image(args, spec) -> int:
    fp = _pick_path(spec, args.path)
    window = spec.window_for(fp)
    targets = _target_positions(spec, args.targets, args.random_targets, args.seed)
    echo = echosim.simulate_echo([(p, 1.0) for p in targets], spec.illuminator, fp, window,
                                 spec.radar)
    tx_state, rx_state = platform_states(spec.illuminator, fp, window.center_time)
    center = targets[int(np.argmin(np.linalg.norm(targets[:, :2] - spec.scene.center[:2], axis=1)))]
    grid = echosim.image_grid_for(resolution_cell(tx_state, rx_state, center, spec.radar),
                                  max_pixels=args.pixels)
    if args.spacing:
        grid = echosim.ImageGrid.centered(center, args.spacing, args.pixels)
    image = echosim.backproject(echo, grid, spec.illuminator, fp, window, spec.radar)
    prefix = args.out or f"{spec.name}_{args.path}_image"
    echosim.write_psim(image, f"{prefix}.psim")
    with open(f"{prefix}_db.csv", "w") as fh:
        echosim.write_db_csv(image, fh)
    print(f"{image.grid.shape[0]}x{image.grid.shape[1]} image around "
          f"({center[0]:.1f}, {center[1]:.1f}) written to {prefix}.psim and {prefix}_db.csv")
    return EXIT_OK


def _cmd_verify(args, spec) -> int:
    fp = _pick_path(spec, args.path)
    window = spec.window_for(fp)
    rows = echosim.verify_resolution(spec.scene, spec.illuminator, fp, window, spec.radar,
                                     n_targets=args.targets)
    for r in rows:
        t = r.prediction.target
        print(f"{r.label:<5} ({t[0]:.1f}, {t[1]:.1f}) predicted S_c={r.predicted:.4f} m^2 "
              f"measured={r.measured:.4f} m^2 ratio={r.ratio:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="passivesar", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=None, help="seed for random target placement")
    ap.add_argument("--jobs", type=int, default=1, help="maximum parallel path evaluations")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="mission report for every candidate path")
    p.add_argument("scenario")
    p.add_argument("--csv", help="output CSV (default <scenario>_report.csv)")
    p.add_argument("--traces", help="directory for per-path threat and link-rate traces")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("resolution-map", help="dump the scene resolution grid as CSV")
    p.add_argument("scenario")
    p.add_argument("--path", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_resolution_map)

    p = sub.add_parser("image", help="simulate echoes and backproject an image")
    p.add_argument("scenario")
    p.add_argument("--path", required=True)
    p.add_argument("--targets", type=int, default=25)
    p.add_argument("--random-targets", action="store_true",
                   help="place targets uniformly at random (see --seed)")
    p.add_argument("--pixels", type=int, default=129)
    p.add_argument("--spacing", type=float, help="pixel spacing in meters")
    p.add_argument("--out", help="output file prefix")
    p.set_defaults(func=_cmd_image)

    p = sub.add_parser("verify", help="compare predicted and imaged resolution cells")
    p.add_argument("scenario")
    p.add_argument("--path", required=True)
    p.add_argument("--targets", type=int, default=25)
    p.set_defaults(func=_cmd_verify)

    for p in sub.choices.values():
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        _error("usage", "--jobs must be at least 1")
        return EXIT_USAGE
    try:
        spec = load_scenario(args.scenario)
        return args.func(args, spec)
    except ScenarioError as exc:
        _error("validation", str(exc), field=exc.field)
        return EXIT_USAGE
    except UsageError as exc:
        _error("usage", str(exc))
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        _error("evaluation", f"{type(exc).__name__}: {exc}")
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
