"""Scenario configuration, per-path mission evaluation and report output.

A scenario is a YAML file. Every distance-like field (positions, extents,
radii, grid spacing, bulges, clearances) is given in ``length_unit``, which
defaults to km; everything else is SI (m/s, Hz, W, kg, s, and the radar
wavelength in meters). Loading normalizes the file to meters and keeps that
normalized copy so a scenario can be written back out and reloaded
unchanged.
"""
from __future__ import annotations

import copy
import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .comms import CommParams, LinkBudgetReport, check_los_assumption, path_capacity
from .energy import EnergyBreakdown, PlatformParams, path_energy
from .flightpath import FlightPath, make_arc_path, make_line_path, path_length
from .geom import HillSpec, TerrainModel, height_at, load_ascii_grid, synth_terrain
from .sargeom import (ApertureWindow, IlluminatorTrajectory, RadarParams, SceneSpec,
                      aperture_window, echo_data_size, scene_resolution_evaluator, window_speed)
from .threat import ThreatParams, threat_trace

log = logging.getLogger(__name__)

LENGTH_UNITS = {"m": 1.0, "km": 1000.0}
BUNDLED = ("scenario_s4", "scenario_desk")


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    name: str
    terrain: TerrainModel
    platform: PlatformParams
    illuminator: IlluminatorTrajectory
    radar: RadarParams
    scene: SceneSpec
    comms: CommParams
    threat: ThreatParams
    paths: dict[str, FlightPath]
    aperture_center_time: float | None
    source: dict = field(repr=False)

    def window_for(self, path: FlightPath) -> ApertureWindow:
        return aperture_window(path, self.radar.aperture_time, near=self.scene.center,
                               center_time=self.aperture_center_time)


# --------------------------------------------------------------------------- loading

def _get(d: dict, key: str, where: str, default=...):
    if not isinstance(d, dict):
        raise ScenarioError(where, "expected a mapping")
    if key not in d or d[key] is None:
        if default is ...:
            raise ScenarioError(f"{where}.{key}" if where else key, "missing required field")
        return default
    return d[key]


def _num(d, key, where, default=...) -> float | None:
    val = _get(d, key, where, default)
    if val is None:
        return None
    if isinstance(val, str):
        # PyYAML reads exponents without a sign ("1.0e8") as strings
        try:
            return float(val)
        except ValueError:
            pass
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"{where}.{key}", f"expected a number, got {val!r}")
    return float(val)


def _vec(d, key, where, n=(3,), default=...) -> list[float]:
    val = _get(d, key, where, default)
    if val is None:
        return None
    if not isinstance(val, (list, tuple)) or len(val) not in n:
        raise ScenarioError(f"{where}.{key}", f"expected {' or '.join(map(str, n))} numbers")
    try:
        return [float(v) for v in val]
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}.{key}", f"non-numeric entry in {val!r}") from None


def _normalize(raw: dict, base_dir: Path) -> dict:
    """Convert a parsed scenario to meters, filling only the documented defaults."""
    if not isinstance(raw, dict):
        raise ScenarioError("", "scenario file must contain a mapping")
    unit = raw.get("length_unit", "km")
    if unit not in LENGTH_UNITS:
        raise ScenarioError("length_unit", f"must be one of {sorted(LENGTH_UNITS)}")
    k = LENGTH_UNITS[unit]
    L = lambda x: None if x is None else x * k  # noqa: E731
    LV = lambda v: None if v is None else [x * k for x in v]  # noqa: E731
    out: dict = {"name": str(raw.get("name", "scenario")), "length_unit": "m"}

    t = _get(raw, "terrain", "")
    if "grid_file" in t:
        gf = Path(t["grid_file"])
        out["terrain"] = {"grid_file": str(gf if gf.is_absolute() else (base_dir / gf).resolve())}
    else:
        hills = []
        for i, h in enumerate(_get(t, "hills", "terrain", [])):
            w = f"terrain.hills[{i}]"
            hills.append({"center": LV(_vec(h, "center", w, (2,))),
                          "peak_height": L(_num(h, "peak_height", w)),
                          "radius": L(_num(h, "radius", w)),
                          "profile": str(_get(h, "profile", w, "cone"))})
        ext = _get(t, "extent", "terrain")
        try:
            (x0, x1), (y0, y1) = ext
            extent = [[L(float(x0)), L(float(x1))], [L(float(y0)), L(float(y1))]]
        except (TypeError, ValueError):
            raise ScenarioError("terrain.extent", "expected [[xmin, xmax], [ymin, ymax]]") from None
        out["terrain"] = {"base_height": L(_num(t, "base_height", "terrain")),
                          "extent": extent, "spacing": L(_num(t, "spacing", "terrain")),
                          "hills": hills}

    p = _get(raw, "platform", "")
    cruise = _num(p, "cruise_speed", "platform", None)
    out["platform"] = {
        "mass": _num(p, "mass", "platform"),
        "gravity": _num(p, "gravity", "platform", 9.81),
        "drag_c1": _num(p, "drag_c1", "platform"),
        "drag_c2": _num(p, "drag_c2", "platform"),
        "v_a": _num(p, "v_a", "platform", cruise if cruise is not None else ...),
        "v_min": _num(p, "v_min", "platform"),
        "v_max": _num(p, "v_max", "platform"),
        "a_max": _num(p, "a_max", "platform"),
        "clamp_regeneration": bool(_get(p, "clamp_regeneration", "platform", False)),
        "cruise_speed": cruise,
    }

    il = _get(raw, "illuminator", "")
    out["illuminator"] = {"position": LV(_vec(il, "position", "illuminator")),
                          "velocity": _vec(il, "velocity", "illuminator"),
                          "ref_time": _num(il, "ref_time", "illuminator", 0.0)}

    r = _get(raw, "radar", "")
    out["radar"] = {key: _num(r, key, "radar") for key in
                    ("wavelength", "bandwidth", "prf", "sample_rate", "aperture_time")}
    out["radar"]["bits_per_sample"] = int(_num(r, "bits_per_sample", "radar", 128))

    s = _get(raw, "scene", "")
    n_s = _get(s, "n_samples", "scene", 25)
    out["scene"] = {"center": LV(_vec(s, "center", "scene", (2, 3))),
                    "range_extent": L(_num(s, "range_extent", "scene")),
                    "azimuth_extent": L(_num(s, "azimuth_extent", "scene")),
                    "n_samples": list(n_s) if isinstance(n_s, (list, tuple)) else int(n_s)}

    c = _get(raw, "comms", "")
    win = _get(c, "window", "comms", None)
    out["comms"] = {"bandwidth": _num(c, "bandwidth", "comms"),
                    "tx_power": _num(c, "tx_power", "comms"),
                    "ref_gain": _num(c, "ref_gain", "comms"),
                    "noise_power": _num(c, "noise_power", "comms"),
                    "station": LV(_vec(c, "station", "comms")),
                    "window": None if win is None else [int(win[0]), int(win[1])]}

    th = _get(raw, "threat", "")
    out["threat"] = {key: L(_num(th, key, "threat"))
                     for key in ("safe_clearance", "sample_step", "lateral_probe")}

    ap = raw.get("aperture") or {}
    out["aperture"] = {"center_time": _num(ap, "center_time", "aperture", None)}

    paths = []
    for i, ps in enumerate(_get(raw, "paths", "")):
        w = f"paths[{i}]"
        kind = _get(ps, "kind", w)
        entry = {"name": str(_get(ps, "name", w)), "kind": kind}
        if kind in ("line", "arc"):
            entry["start"] = LV(_vec(ps, "start", w))
            entry["end"] = LV(_vec(ps, "end", w))
            entry["n"] = int(_num(ps, "n", w))
            entry["speed"] = _num(ps, "speed", w, cruise if cruise is not None else ...)
            if kind == "arc":
                entry["bulge"] = L(_num(ps, "bulge", w))
                entry["plane"] = str(_get(ps, "plane", w))
        elif kind == "waypoints":
            pts = _get(ps, "points", w)
            try:
                entry["points"] = [[float(x) * k for x in pt] for pt in pts]
            except (TypeError, ValueError):
                raise ScenarioError(f"{w}.points", "expected a list of [x, y, z]") from None
            spd = _get(ps, "speeds", w, cruise if cruise is not None else ...)
            entry["speeds"] = [float(v) for v in spd] if isinstance(spd, list) else float(spd)
        else:
            raise ScenarioError(f"{w}.kind", f"unknown path kind {kind!r}")
        paths.append(entry)
    if not paths:
        raise ScenarioError("paths", "at least one path is required")
    names = [p["name"] for p in paths]
    if len(set(names)) != len(names):
        raise ScenarioError("paths", f"duplicate path names in {names}")
    out["paths"] = paths
    return out


def _build_path(entry: dict) -> FlightPath:
    if entry["kind"] == "line":
        return make_line_path(entry["start"], entry["end"], entry["n"], entry["speed"])
    if entry["kind"] == "arc":
        return make_arc_path(entry["start"], entry["end"], entry["bulge"], entry["plane"],
                             entry["n"], entry["speed"])
    return FlightPath(np.array(entry["points"]), entry["speeds"])


def _guard(where: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ScenarioError:
        raise
    except (ValueError, TypeError, OSError) as exc:
        raise ScenarioError(where, str(exc)) from exc


def build_scenario(norm: dict) -> ScenarioSpec:
    """Construct and cross-validate a scenario from its normalized (meter) form."""
    t = norm["terrain"]
    if "grid_file" in t:
        terrain = _guard("terrain.grid_file", load_ascii_grid, t["grid_file"])
    else:
        hills = [_guard(f"terrain.hills[{i}]", HillSpec, tuple(h["center"]), h["peak_height"],
                        h["radius"], h["profile"]) for i, h in enumerate(t["hills"])]
        terrain = _guard("terrain", synth_terrain, t["base_height"], hills,
                         tuple(map(tuple, t["extent"])), t["spacing"])

    pl = {k: v for k, v in norm["platform"].items() if k != "cruise_speed"}
    platform = _guard("platform", PlatformParams, **pl)
    il = norm["illuminator"]
    illuminator = IlluminatorTrajectory(il["position"], il["velocity"], il["ref_time"])
    radar = _guard("radar", RadarParams, **norm["radar"])

    s = norm["scene"]
    center = list(s["center"])
    if not terrain.contains(center[0], center[1]):
        raise ScenarioError("scene.center", f"{center[:2]} outside terrain footprint {terrain.bounds}")
    if len(center) == 2:
        center.append(height_at(terrain, center[0], center[1]))
    n_s = tuple(s["n_samples"]) if isinstance(s["n_samples"], list) else s["n_samples"]
    scene = _guard("scene", SceneSpec, center, s["range_extent"], s["azimuth_extent"], n_s)
    corners = scene.sample_points()
    if not np.all(terrain.contains(corners[:, 0], corners[:, 1])):
        raise ScenarioError("scene", "scene extent leaves the terrain footprint")

    c = norm["comms"]
    if not terrain.contains(c["station"][0], c["station"][1]):
        raise ScenarioError("comms.station", f"{c['station'][:2]} outside terrain footprint")
    window = None if c["window"] is None else tuple(c["window"])
    comms = _guard("comms", CommParams, c["bandwidth"], c["tx_power"], c["ref_gain"],
                   c["noise_power"], c["station"], window)
    threat = _guard("threat", ThreatParams, **norm["threat"])

    paths = {}
    for entry in norm["paths"]:
        where = f"paths[{entry['name']}]"
        fp = _guard(where, _build_path, entry)
        if not np.all(terrain.contains(fp.points[:, 0], fp.points[:, 1])):
            raise ScenarioError(where, "path leaves the terrain footprint")
        if window is not None and window[1] > len(fp) - 1:
            raise ScenarioError("comms.window", f"end index {window[1]} beyond path {entry['name']}")
        paths[entry["name"]] = fp

    return ScenarioSpec(norm["name"], terrain, platform, illuminator, radar, scene, comms, threat,
                        paths, norm["aperture"]["center_time"], copy.deepcopy(norm))


def resolve_scenario(name_or_path) -> Path:
    """A filesystem path, or the name of a bundled scenario (``scenario_s4``, ``scenario_desk``)."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    bundled = resources.files("passivesar") / "scenarios" / f"{p.stem}.yaml"
    if p.suffix in ("", ".yaml") and bundled.is_file():
        return Path(str(bundled))
    raise ScenarioError("scenario", f"no such file or bundled scenario: {name_or_path}")


def load_scenario(file) -> ScenarioSpec:
    path = resolve_scenario(file)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError("scenario", f"parse error in {path}: {exc}") from exc
    return build_scenario(_normalize(raw, path.parent))


def dump_scenario(spec: ScenarioSpec, file) -> None:
    """Write the normalized scenario (meters) so that reloading reproduces it."""
    Path(file).write_text(yaml.safe_dump(spec.source, sort_keys=False))


# --------------------------------------------------------------------------- evaluation

@dataclass
class PathReport:
    name: str
    length: float = math.nan
    energy: EnergyBreakdown | None = None
    threat: float = math.nan
    S_c_bar: float = math.nan
    disequilibrium: float = math.nan
    N_a: int = 0
    N_r: int = 0
    link: LinkBudgetReport | None = None
    los_fraction: float = math.nan
    warnings: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def D_echo(self) -> float:
        return math.nan if self.link is None else self.link.D_echo

    @property
    def D_com(self) -> float:
        return math.nan if self.link is None else self.link.D_com

    @property
    def feasible(self) -> bool | None:
        return None if self.link is None else self.link.feasible


@dataclass
class MissionReport:
    scenario: str
    rows: list[PathReport]

    def row(self, name: str) -> PathReport:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(r.error is None for r in self.rows)


def evaluate_path(spec: ScenarioSpec, name: str) -> PathReport:
    fp = spec.paths[name]
    row = PathReport(name)
    try:
        row.length = path_length(fp)
        row.energy = path_energy(fp, spec.platform)
        row.warnings.extend(row.energy.warnings)
        trace = threat_trace(fp, spec.terrain, spec.threat)
        row.threat = trace.value
        if trace.collision:
            row.warnings.append("path touches terrain")
        window = spec.window_for(fp)
        row.S_c_bar, _, row.disequilibrium = scene_resolution_evaluator(
            spec.illuminator, fp, window, spec.scene, spec.radar)
        v = window_speed(fp, window)
        row.N_a, row.N_r, d_echo = echo_data_size(spec.scene, window, v, spec.radar,
                                                  spec.illuminator, fp)
        row.link = path_capacity(fp, spec.comms).with_echo(d_echo)
        row.los_fraction = check_los_assumption(fp, spec.comms, spec.terrain)
        if row.los_fraction < 1.0:
            row.warnings.append(f"station visible from {row.los_fraction:.1%} of comms window")
    except (ValueError, ArithmeticError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        log.error("path %s failed: %s", name, row.error)
    return row


def evaluate_mission(spec: ScenarioSpec, jobs: int = 1, paths=None) -> MissionReport:
    """Evaluate every (or the named) candidate path; rows keep scenario order."""
    names = list(spec.paths) if paths is None else list(paths)
    if jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda n: evaluate_path(spec, n), names))
    else:
        rows = [evaluate_path(spec, n) for n in names]
    return MissionReport(spec.name, rows)


CSV_COLUMNS = ["path", "length_m", "energy_J", "f_threat", "S_c_bar_m2", "disequilibrium",
               "D_echo_bits", "D_com_bits", "feasible"]


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def report_csv(report: MissionReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        if r.error is not None:
            w.writerow([r.name] + [""] * 7 + ["error"])
            continue
        w.writerow([r.name, _fmt(r.length), _fmt(r.energy.total), _fmt(r.threat), _fmt(r.S_c_bar),
                    _fmt(r.disequilibrium), str(int(r.D_echo)), _fmt(r.D_com),
                    "yes" if r.feasible else "no"])
    return buf.getvalue()


def report_table(report: MissionReport) -> str:
    head = (f"{'path':<10}{'length km':>10}{'energy kJ':>11}{'energy Wh':>11}{'threat':>9}"
            f"{'S_c_bar m2':>12}{'diseq':>8}{'D_echo Gb':>11}{'D_com Gb':>10}  feasible")
    lines = [f"Mission report: {report.scenario}", head, "-" * len(head)]
    notes = []
    for r in report.rows:
        if r.error is not None:
            lines.append(f"{r.name:<10}  FAILED: {r.error}")
            continue
        lines.append(
            f"{r.name:<10}{r.length / 1e3:>10.3f}{r.energy.total / 1e3:>11.2f}"
            f"{r.energy.total_wh:>11.2f}{r.threat:>9.4f}{r.S_c_bar:>12.2f}{r.disequilibrium:>8.3f}"
            f"{r.D_echo / 1e9:>11.3f}{r.D_com / 1e9:>10.2f}  {'yes' if r.feasible else 'NO'}")
        notes.extend(f"  {r.name}: {w}" for w in r.warnings)
    if notes:
        lines += ["warnings:"] + notes
    return "\n".join(lines)
