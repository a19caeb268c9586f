"""UAV-to-ground-station data link capacity over a flight path.

Free-space line-of-sight channel; each segment transmits for its traversal
time at the Shannon rate ``B log2(1 + P beta0 / (sigma^2 l^2))`` with ``l`` the
segment-midpoint distance to the station.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .flightpath import FlightPath, segment_kinematics
from .geom import TerrainModel, line_of_sight


@dataclass(frozen=True)
class CommParams:
    bandwidth: float
    tx_power: float
    ref_gain: float
    noise_power: float
    station: np.ndarray
    window: tuple[int, int] | None = None  # 0-based waypoint indices; None = whole path

    def __post_init__(self):
        object.__setattr__(self, "station", np.asarray(self.station, dtype=float))
        for name in ("bandwidth", "tx_power", "ref_gain", "noise_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"comms {name} must be positive, got {getattr(self, name)}")

    @property
    def ref_snr(self) -> float:
        return self.tx_power * self.ref_gain / self.noise_power

    def segment_range(self, path: FlightPath) -> range:
        """Segments covered by the window; segment ``i`` joins waypoints ``i`` and ``i+1``."""
        start, end = (0, len(path) - 1) if self.window is None else self.window
        if not (0 <= start <= end <= len(path) - 1):
            raise ValueError(f"comms window {self.window} outside path of {len(path)} waypoints")
        return range(start, end)


@dataclass(frozen=True)
class LinkBudgetReport:
    D_com: float
    duration: np.ndarray
    distance: np.ndarray
    rate: np.ndarray
    D_echo: float | None = None

    @property
    def margin(self) -> float | None:
        return None if self.D_echo is None else self.D_com - self.D_echo

    @property
    def feasible(self) -> bool | None:
        return None if self.D_echo is None else self.D_com >= self.D_echo

    def with_echo(self, d_echo: float) -> "LinkBudgetReport":
        return replace(self, D_echo=float(d_echo))


def shannon_rate(l, cp: CommParams):
    l = np.asarray(l, dtype=float)
    if np.any(l <= 0):
        raise ValueError("link distance must be positive")
    return cp.bandwidth * np.log2(1.0 + cp.ref_snr / l**2)


def segment_capacity(T: float, l: float, cp: CommParams) -> float:
    """Bits deliverable in ``T`` seconds at distance ``l``."""
    if T <= 0:
        raise ValueError(f"segment duration must be positive, got {T}")
    return float(T * shannon_rate(l, cp))


def path_capacity(path: FlightPath, cp: CommParams) -> LinkBudgetReport:
    seg = cp.segment_range(path)
    if len(seg) == 0:
        raise ValueError("comms window contains no segment")
    idx = np.arange(seg.start, seg.stop)
    kin = segment_kinematics(path)
    mid = 0.5 * (path.points[idx] + path.points[idx + 1])
    dist = np.linalg.norm(mid - cp.station, axis=1)
    rate = shannon_rate(dist, cp)
    dur = kin.duration[idx]
    return LinkBudgetReport(math.fsum(dur * rate), dur, dist, rate)


def check_los_assumption(path: FlightPath, cp: CommParams, terrain: TerrainModel,
                         step: float | None = None) -> float:
    """Fraction of window segments whose midpoint sees the station."""
    seg = cp.segment_range(path)
    if len(seg) == 0:
        warnings.warn("empty comms window; line of sight trivially satisfied", stacklevel=2)
        return 1.0
    visible = 0
    for i in seg:
        mid = 0.5 * (path.points[i] + path.points[i + 1])
        visible += line_of_sight(terrain, mid, cp.station, step)
    return visible / len(seg)


def write_rate_trace_csv(report: LinkBudgetReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["segment", "duration_s", "distance_m", "rate_bps"])
    for i, (t, l, r) in enumerate(zip(report.duration, report.distance, report.rate)):
        w.writerow([i, f"{t:.6f}", f"{l:.3f}", f"{r:.6g}"])
