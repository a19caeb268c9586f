"""Discrete UAV flight paths, per-segment kinematics and path generators."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import unit


@dataclass(frozen=True, eq=False)
class FlightPath:
    """Ordered waypoints ``points`` (N x 3, meters) with tangent speeds (m/s)."""

    points: np.ndarray
    speeds: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        spd = np.array(self.speeds, dtype=float)
        if spd.ndim == 0:
            spd = np.full(len(pts), float(spd))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be an (N, 3) array, got shape {pts.shape}")
        if len(pts) < 2:
            raise ValueError("a flight path needs at least two waypoints")
        if spd.shape != (len(pts),):
            raise ValueError(f"need one speed per waypoint, got {spd.shape} for {len(pts)} points")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(spd))):
            raise ValueError("non-finite waypoint or speed")
        if np.any(spd <= 0):
            raise ValueError("waypoint speeds must be positive")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg == 0):
            i = int(np.flatnonzero(seg == 0)[0])
            raise ValueError(f"zero-length segment between waypoints {i} and {i + 1}")
        pts.setflags(write=False)
        spd.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "speeds", spd)

    def __len__(self):
        return len(self.points)

    def reversed(self) -> "FlightPath":
        return FlightPath(self.points[::-1], self.speeds[::-1])

    def translated(self, offset) -> "FlightPath":
        return FlightPath(self.points + np.asarray(offset, dtype=float), self.speeds)


@dataclass(frozen=True, eq=False)
class SegmentKinematics:
    """Per-segment motion, one row per segment (``N_dp - 1`` rows).

    Attributes
    ----------
    v : (M, 3) mean velocity along the segment chord
    a : (M, 3) finite-difference acceleration between waypoint tangent velocities
    duration : (M,) traversal time
    climb : (M,) altitude change of the platform
    """

    v: np.ndarray
    a: np.ndarray
    duration: np.ndarray
    climb: np.ndarray

    def __len__(self):
        return len(self.duration)


def waypoint_tangents(points: np.ndarray) -> np.ndarray:
    """Unit tangent at each waypoint.

    Interior points use the central chord ``P[k+1] - P[k-1]``; the two ends use
    the second-order one-sided difference ``-3P0 + 4P1 - P2`` (first order when
    only two points exist).
    """
    pts = np.asarray(points, dtype=float)
    d = np.empty_like(pts)
    if len(pts) == 2:
        d[:] = pts[1] - pts[0]
        return unit(d)
    d[1:-1] = pts[2:] - pts[:-2]
    d[0] = -3.0 * pts[0] + 4.0 * pts[1] - pts[2]
    d[-1] = 3.0 * pts[-1] - 4.0 * pts[-2] + pts[-3]
    # Estimates collapse on exact reversals; fall back to the incoming chord.
    for k in np.flatnonzero(np.linalg.norm(d, axis=1) == 0):
        d[k] = pts[1] - pts[0] if k == 0 else pts[k] - pts[k - 1]
    return unit(d)


def segment_kinematics(path: FlightPath) -> SegmentKinematics:
    pts, spd = path.points, path.speeds
    chord = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(chord, axis=1)
    seg_speed = 0.5 * (spd[:-1] + spd[1:])
    duration = seg_len / seg_speed
    v = seg_speed[:, None] * chord / seg_len[:, None]
    v_wp = spd[:, None] * waypoint_tangents(pts)
    a = np.diff(v_wp, axis=0) / duration[:, None]
    climb = pts[1:, 2] - pts[:-1, 2]
    return SegmentKinematics(v, a, duration, climb)


def path_length(path: FlightPath) -> float:
    return math.fsum(np.linalg.norm(np.diff(path.points, axis=0), axis=1))


def waypoint_times(path: FlightPath) -> np.ndarray:
    """Arrival time at each waypoint, starting from 0 at the first one."""
    kin = segment_kinematics(path)
    return np.concatenate([[0.0], np.cumsum(kin.duration)])


def path_state(path: FlightPath, t):
    """Position and velocity at time(s) ``t`` along the path.

    Motion is uniform along each segment at the segment mean speed, so the
    position is piecewise linear in time and the velocity piecewise constant.
    Times outside the traversal raise ``ValueError``.
    """
    t = np.asarray(t, dtype=float)
    times = waypoint_times(path)
    if np.any(t < -1e-9) or np.any(t > times[-1] + 1e-9):
        raise ValueError(f"time outside path traversal [0, {times[-1]:.3f}] s")
    kin = segment_kinematics(path)
    i = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(kin) - 1)
    frac = ((t - times[i]) / kin.duration[i])[..., None]
    pos = path.points[i] + frac * (path.points[i + 1] - path.points[i])
    return pos, kin.v[i]


def make_line_path(start, end, n: int, speed: float) -> FlightPath:
    if n < 2:
        raise ValueError(f"a line path needs n >= 2 points, got {n}")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = start + t * (end - start)
    pts[0], pts[-1] = start, end
    return FlightPath(pts, np.full(n, float(speed)))


def make_arc_path(start, end, bulge: float, plane: str, n: int, speed: float) -> FlightPath:
    """Circular arc from ``start`` to ``end`` with sagitta ``bulge``.

    ``plane="horizontal"`` displaces the arc sideways in xy; a positive bulge
    goes to the right of the direction of travel. ``plane="vertical"`` bends
    the arc inside the plane holding the chord and the z axis; positive is up.
    """
    if n < 3:
        raise ValueError(f"an arc path needs n >= 3 points, got {n}")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    chord_vec = end - start
    if plane == "horizontal":
        horiz = np.array([chord_vec[0], chord_vec[1], 0.0])
        if np.linalg.norm(horiz) == 0:
            raise ValueError("horizontal arc needs a horizontal chord component")
        side = np.array([horiz[1], -horiz[0], 0.0]) / np.linalg.norm(horiz)
        chord = float(np.linalg.norm(horiz))
    elif plane == "vertical":
        chord = float(np.linalg.norm(chord_vec))
        along = chord_vec / chord
        zhat = np.array([0.0, 0.0, 1.0])
        side = zhat - along * along[2]
        if np.linalg.norm(side) < 1e-12:
            raise ValueError("vertical arc undefined for a vertical chord")
        side = side / np.linalg.norm(side)
    else:
        raise ValueError(f"plane must be 'horizontal' or 'vertical', got {plane!r}")
    if bulge == 0:
        raise ValueError("arc bulge must be non-zero")
    b = abs(bulge)
    if b >= chord:
        raise ValueError(f"bulge {bulge} must be smaller than the chord {chord}")
    side = side * math.copysign(1.0, bulge)
    radius = (chord**2 / 4.0 + b**2) / (2.0 * b)
    half_angle = 2.0 * math.atan2(2.0 * b, chord)
    theta = np.linspace(-half_angle, half_angle, n)
    u = (np.sin(theta) / math.sin(half_angle) + 1.0) / 2.0
    offset = radius * (np.cos(theta) - math.cos(half_angle))
    # for horizontal arcs z follows the chord linearly
    pts = start + u[:, None] * chord_vec + offset[:, None] * side
    pts[0], pts[-1] = start, end
    return FlightPath(pts, np.full(n, float(speed)))

