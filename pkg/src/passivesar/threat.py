"""Terrain threat of a flight path.

The threat value is a clearance-deficit proxy: the path is resampled at a
fixed arc-length step, each sample takes the smallest clearance over itself
and a ring of eight lateral probes, and contributes

    max(0, (d_safe - c_min) / d_safe) ** 2

(saturating at 1 on or below the surface). The path threat is the mean
contribution, so it lives in [0, 1] and is 0 for any path that keeps at
least ``d_safe`` from the ground.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .flightpath import FlightPath
from .geom import OutOfBoundsError, TerrainModel, clearance

_PROBE_ANGLES = np.arange(8) * (np.pi / 4.0)


@dataclass(frozen=True)
class ThreatParams:
    safe_clearance: float
    sample_step: float
    lateral_probe: float

    def __post_init__(self):
        for name in ("safe_clearance", "sample_step", "lateral_probe"):
            if not getattr(self, name) > 0:
                raise ValueError(f"threat {name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class ThreatTrace:
    points: np.ndarray        # (n, 3) resampled path positions
    min_clearance: np.ndarray  # (n,)
    contribution: np.ndarray  # (n,)

    @property
    def value(self) -> float:
        return math.fsum(self.contribution) / len(self.contribution)

    @property
    def collision(self) -> bool:
        return bool(np.any(self.min_clearance <= 0))


def resample_path(path: FlightPath, step: float) -> np.ndarray:
    """Points spaced ``step`` apart in arc length, always including both ends."""
    pts = path.points
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    n = max(int(math.ceil(s[-1] / step)), 1)
    q = np.linspace(0.0, s[-1], n + 1)
    return np.column_stack([np.interp(q, s, pts[:, k]) for k in range(3)])


def threat_trace(path: FlightPath, terrain: TerrainModel, tp: ThreatParams) -> ThreatTrace:
    samples = resample_path(path, tp.sample_step)
    inside = terrain.contains(samples[:, 0], samples[:, 1])
    if not np.all(inside):
        bad = samples[np.argmin(inside)]
        raise OutOfBoundsError(f"path leaves terrain footprint at {bad.round(3).tolist()}")
    c_min = clearance(terrain, samples)
    ring = tp.lateral_probe * np.column_stack(
        [np.cos(_PROBE_ANGLES), np.sin(_PROBE_ANGLES), np.zeros(8)])
    probes = samples[:, None, :] + ring[None, :, :]
    ok = terrain.contains(probes[..., 0], probes[..., 1])
    # probes past the footprint edge are ignored rather than extrapolated
    probe_c = np.full(ok.shape, np.inf)
    probe_c[ok] = clearance(terrain, probes[ok])
    c_min = np.minimum(c_min, probe_c.min(axis=1))
    deficit = np.maximum(0.0, (tp.safe_clearance - c_min) / tp.safe_clearance)
    contribution = np.where(c_min <= 0, 1.0, deficit**2)
    return ThreatTrace(samples, c_min, contribution)


def path_threat(path: FlightPath, terrain: TerrainModel, tp: ThreatParams) -> float:
    """Mean clearance-deficit threat of ``path``, in [0, 1]."""
    return threat_trace(path, terrain, tp).value


def write_threat_trace_csv(trace: ThreatTrace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x_m", "y_m", "z_m", "min_clearance_m", "threat"])
    for p, c, t in zip(trace.points, trace.min_clearance, trace.contribution):
        w.writerow([f"{p[0]:.3f}", f"{p[1]:.3f}", f"{p[2]:.3f}", f"{c:.3f}", f"{t:.6g}"])
