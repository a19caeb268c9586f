"""Fixed-wing flight energy: drag power and the segment-sum path energy.

Path energy is the sum over segments of drag work, gravitational potential
change and kinetic energy change. Drag power uses the fixed-wing form

    P = c1 |v|^3 + c2 / |v| * (va^2 / |v|^2 + (|a|^2 - (a.v / |v|)^2) / g^2)

where the bracketed acceleration term is the squared normal (centripetal)
load factor contribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flightpath import FlightPath, segment_kinematics


@dataclass(frozen=True)
class PlatformParams:
    mass: float
    drag_c1: float
    drag_c2: float
    v_a: float
    v_min: float
    v_max: float
    a_max: float
    gravity: float = 9.81
    clamp_regeneration: bool = False

    def __post_init__(self):
        for name in ("mass", "drag_c1", "drag_c2", "v_a", "v_min", "v_max", "a_max", "gravity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"platform {name} must be positive, got {getattr(self, name)}")
        if not self.v_min < self.v_max:
            raise ValueError(f"v_min ({self.v_min}) must be below v_max ({self.v_max})")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy terms in joules. ``total`` is their exact sum."""

    drag: float
    potential: float
    kinetic: float
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def total(self) -> float:
        return self.drag + self.potential + self.kinetic

    @property
    def total_wh(self) -> float:
        return self.total / 3600.0


def drag_power(v, a, p: PlatformParams):
    """Power (W) needed to overcome drag at velocity ``v`` and acceleration ``a``.

    Both arguments may be single 3-vectors or ``(n, 3)`` stacks.

    Raises
    ------
    ValueError
        If any speed is below ``p.v_min``; the model diverges as ``|v| -> 0``.
    """
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    speed = np.linalg.norm(v, axis=-1)
    if np.any(speed < p.v_min):
        raise ValueError(f"speed {np.min(speed):.3f} m/s below v_min={p.v_min} m/s")
    a_sq = np.sum(a * a, axis=-1)
    a_along = np.sum(a * v, axis=-1) / speed
    normal_sq = np.maximum(a_sq - a_along**2, 0.0)
    out = p.drag_c1 * speed**3 + (p.drag_c2 / speed) * (
        p.v_a**2 / speed**2 + normal_sq / p.gravity**2)
    return float(out) if out.ndim == 0 else out


def _telescoped(values: np.ndarray) -> float:
    # fsum over (x[k+1], -x[k]) pairs is an exactly rounded telescoping sum
    terms = np.empty(2 * (len(values) - 1))
    terms[0::2] = values[1:]
    terms[1::2] = -values[:-1]
    return math.fsum(terms)


def path_energy(path: FlightPath, p: PlatformParams) -> EnergyBreakdown:
    """Total flight energy of ``path`` split into drag, potential and kinetic parts.

    With ``p.clamp_regeneration`` a segment never costs less than its drag
    work: descending segments recover nothing, and the potential/kinetic parts
    report only what was actually counted.
    """
    kin = segment_kinematics(path)
    seg_speed = np.linalg.norm(kin.v, axis=1)
    if np.any(seg_speed < p.v_min) or np.any(seg_speed > p.v_max):
        raise ValueError(
            f"segment speeds span [{seg_speed.min():.3f}, {seg_speed.max():.3f}] m/s, "
            f"outside platform limits [{p.v_min}, {p.v_max}]")
    warnings = []
    a_mag = np.linalg.norm(kin.a, axis=1)
    if np.any(a_mag > p.a_max):
        warnings.append(f"acceleration {a_mag.max():.3f} m/s^2 exceeds a_max={p.a_max}")

    drag_seg = drag_power(kin.v, kin.a, p) * kin.duration
    drag = math.fsum(drag_seg)
    mg = p.mass * p.gravity
    half_m = 0.5 * p.mass
    if not p.clamp_regeneration:
        potential = mg * _telescoped(path.points[:, 2])
        kinetic = half_m * _telescoped(path.speeds**2)
        return EnergyBreakdown(drag, potential, kinetic, tuple(warnings))

    pot_seg = mg * kin.climb
    kin_seg = half_m * (path.speeds[1:] ** 2 - path.speeds[:-1] ** 2)
    recovering = pot_seg + kin_seg < 0
    pot_seg = np.where(recovering, 0.0, pot_seg)
    kin_seg = np.where(recovering, 0.0, kin_seg)
    return EnergyBreakdown(drag, math.fsum(pot_seg), math.fsum(kin_seg), tuple(warnings))
