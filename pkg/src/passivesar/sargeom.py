"""Bistatic SAR geometry: range histories, gradient resolution and data sizing.

Ground-plane resolution follows the gradient method. The bistatic range
``R(x) = |x - p_tx| + |x - p_rx|`` and the Doppler ``f_d(x) = -(1/lambda) dR/dt``
are differentiated with respect to the target's horizontal position; the
range resolution is ``c / (B |grad R|)``, the azimuth resolution is the Doppler
resolution ``1 / T_a`` over ``|grad f_d|``, and the cell is the parallelogram
spanned by the two iso-line spacings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flightpath import FlightPath, path_state, waypoint_times

SPEED_OF_LIGHT = 299_792_458.0
SIN_PSI_MIN = 1e-3
GRADIENT_MIN = 1e-9


class DegenerateGeometryError(ValueError):
    """Resolution is undefined: vanishing gradient or parallel iso-lines."""


@dataclass(frozen=True)
class IlluminatorTrajectory:
    """Linear-motion transmitter: ``x(t) = ref_position + ref_velocity * (t - ref_time)``."""

    ref_position: np.ndarray
    ref_velocity: np.ndarray
    ref_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "ref_position", np.asarray(self.ref_position, dtype=float))
        object.__setattr__(self, "ref_velocity", np.asarray(self.ref_velocity, dtype=float))

    def state(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        pos = self.ref_position + self.ref_velocity * (t - self.ref_time)
        return pos, np.broadcast_to(self.ref_velocity, pos.shape)


@dataclass(frozen=True)
class RadarParams:
    wavelength: float
    bandwidth: float
    prf: float
    sample_rate: float
    aperture_time: float
    bits_per_sample: int = 128

    def __post_init__(self):
        for name in ("wavelength", "bandwidth", "prf", "sample_rate", "aperture_time",
                     "bits_per_sample"):
            if not getattr(self, name) > 0:
                raise ValueError(f"radar {name} must be positive, got {getattr(self, name)}")
        if self.sample_rate < self.bandwidth:
            raise ValueError("sample_rate must be at least the bandwidth")


@dataclass(frozen=True)
class SceneSpec:
    """Rectangular scene; range extent along x, azimuth extent along y.

    ``n_samples`` is either a perfect square (an ``n x n`` grid) or an explicit
    ``(n_range, n_azimuth)`` pair. The scene is treated as planar at ``center[2]``.
    """

    center: np.ndarray
    range_extent: float
    azimuth_extent: float
    n_samples: int | tuple[int, int] = 25

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not (self.range_extent > 0 and self.azimuth_extent > 0):
            raise ValueError("scene extents must be positive")
        self.grid_shape  # validates n_samples

    @property
    def grid_shape(self) -> tuple[int, int]:
        n = self.n_samples
        if isinstance(n, (tuple, list)):
            nr, na = int(n[0]), int(n[1])
        else:
            nr = na = math.isqrt(int(n))
            if nr * nr != int(n):
                raise ValueError(f"n_samples={n} is not a perfect square; give (n_r, n_a)")
        if nr < 1 or na < 1:
            raise ValueError("scene needs at least one sample")
        return nr, na

    def sample_points(self) -> np.ndarray:
        """Evenly spaced grid including the scene corners, shape ``(N_s, 3)``."""
        nr, na = self.grid_shape
        xs = self.center[0] + (np.linspace(-0.5, 0.5, nr) if nr > 1 else np.zeros(1)) * self.range_extent
        ys = self.center[1] + (np.linspace(-0.5, 0.5, na) if na > 1 else np.zeros(1)) * self.azimuth_extent
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, self.center[2])])


@dataclass(frozen=True)
class ApertureWindow:
    start_index: int
    center_time: float
    duration: float

    @property
    def start_time(self) -> float:
        return self.center_time - 0.5 * self.duration

    def pulse_times(self, prf: float) -> np.ndarray:
        """Slow-time instants of the pulses, symmetric about ``center_time``."""
        n = max(int(math.floor(self.duration * prf + 1e-9)), 1)
        return self.center_time + (np.arange(n) - 0.5 * (n - 1)) / prf


@dataclass(frozen=True)
class ResolutionSample:
    target: np.ndarray
    rho_r: float
    rho_a: float
    psi: float
    S_c: float
    range_dir: np.ndarray     # unit ground range-gradient direction
    azimuth_dir: np.ndarray   # unit ground Doppler-gradient direction


def aperture_window(path: FlightPath, duration: float, near=None,
                    center_time: float | None = None) -> ApertureWindow:
    """Window of length ``duration`` inside the traversal.

    Centered at ``center_time`` if given, otherwise at the waypoint closest to
    ``near``; shifted when needed so it fits inside the path.
    """
    times = waypoint_times(path)
    if duration > times[-1]:
        raise ValueError(f"aperture {duration} s longer than path traversal {times[-1]:.3f} s")
    if center_time is None:
        if near is None:
            raise ValueError("need either center_time or a point to center on")
        d = np.linalg.norm(path.points - np.asarray(near, dtype=float), axis=1)
        center_time = float(times[int(np.argmin(d))])
    half = 0.5 * duration
    center_time = min(max(center_time, half), times[-1] - half)
    start_index = int(np.searchsorted(times, center_time - half, side="right") - 1)
    return ApertureWindow(max(start_index, 0), float(center_time), float(duration))


def bistatic_range(tx, rx, target):
    tx, rx, target = (np.asarray(v, dtype=float) for v in (tx, rx, target))
    return np.linalg.norm(tx - target, axis=-1) + np.linalg.norm(rx - target, axis=-1)


def range_gradient_ground(tx, rx, target) -> np.ndarray:
    """Horizontal gradient of the bistatic range with respect to target position."""
    tx, rx, target = (np.asarray(v, dtype=float) for v in (tx, rx, target))
    d_tx = target - tx
    d_rx = target - rx
    n_tx = np.linalg.norm(d_tx, axis=-1, keepdims=True)
    n_rx = np.linalg.norm(d_rx, axis=-1, keepdims=True)
    if np.any(n_tx == 0) or np.any(n_rx == 0):
        raise DegenerateGeometryError("target coincides with a platform")
    return (d_tx / n_tx + d_rx / n_rx)[..., :2]


def doppler_gradient_ground(tx_state, rx_state, target, wavelength: float) -> np.ndarray:
    """Horizontal gradient (Hz/m) of the bistatic Doppler with respect to target position.

    For one platform at ``p`` moving with ``v``, with ``u = (p - x)/r``, the
    Doppler is ``-(u . v)/lambda`` and its gradient is ``(I - u u^T) v / (lambda r)``.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    target = np.asarray(target, dtype=float)
    grad = 0.0
    for pos, vel in (tx_state, rx_state):
        d = np.asarray(pos, dtype=float) - target
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        if np.any(r == 0):
            raise DegenerateGeometryError("target coincides with a platform")
        u = d / r
        vel = np.asarray(vel, dtype=float)
        perp = vel - u * np.sum(u * vel, axis=-1, keepdims=True)
        grad = grad + perp / r
    return (grad / wavelength)[..., :2]


def bistatic_doppler(tx_state, rx_state, target, wavelength: float):
    """Instantaneous bistatic Doppler frequency (Hz) of a static target."""
    target = np.asarray(target, dtype=float)
    rate = 0.0
    for pos, vel in (tx_state, rx_state):
        d = np.asarray(pos, dtype=float) - target
        rate = rate + np.sum(d * np.asarray(vel, dtype=float), axis=-1) / np.linalg.norm(d, axis=-1)
    return -rate / wavelength


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def resolution_cell(tx_state, rx_state, target, radar: RadarParams) -> ResolutionSample:
    target = np.asarray(target, dtype=float)
    g_r = range_gradient_ground(tx_state[0], rx_state[0], target)
    g_f = doppler_gradient_ground(tx_state, rx_state, target, radar.wavelength)
    n_r = float(np.linalg.norm(g_r))
    n_f = float(np.linalg.norm(g_f))
    where = f"target {np.round(target, 3).tolist()}"
    if n_r < GRADIENT_MIN:
        raise DegenerateGeometryError(f"{where}: vanishing range gradient (forward scatter)")
    if n_f < GRADIENT_MIN / radar.wavelength:
        raise DegenerateGeometryError(f"{where}: vanishing Doppler gradient")
    sin_psi = abs(float(_cross2(g_r, g_f))) / (n_r * n_f)
    if sin_psi < SIN_PSI_MIN:
        raise DegenerateGeometryError(f"{where}: range and Doppler gradients are parallel")
    psi = math.asin(min(sin_psi, 1.0))
    rho_r = SPEED_OF_LIGHT / (radar.bandwidth * n_r)
    rho_a = 1.0 / (radar.aperture_time * n_f)
    return ResolutionSample(target, rho_r, rho_a, psi, rho_r * rho_a / sin_psi,
                            g_r / n_r, g_f / n_f)


def platform_states(tx_traj: IlluminatorTrajectory, path: FlightPath, t):
    return tx_traj.state(t), path_state(path, t)


def scene_resolution_evaluator(tx_traj: IlluminatorTrajectory, path: FlightPath,
                               window: ApertureWindow, scene: SceneSpec, radar: RadarParams):
    """Spatially penalized mean cell area over the scene sample grid.

    Returns ``(S_bar, samples, disequilibrium)`` where
    ``S_bar = (S_max / S_min) * mean(S_c)`` and ``disequilibrium = S_max / S_min``.
    """
    tx_state, rx_state = platform_states(tx_traj, path, window.center_time)
    samples = [resolution_cell(tx_state, rx_state, p, radar) for p in scene.sample_points()]
    areas = [s.S_c for s in samples]
    factor = max(areas) / min(areas)
    return factor * (math.fsum(areas) / len(areas)), samples, factor


def _ceil(x: float) -> int:
    # tolerate round-off on values that are integral in exact arithmetic
    return int(math.ceil(x * (1.0 - 1e-12)))


def azimuth_samples(azimuth_extent: float, speed: float, aperture_time: float, prf: float) -> int:
    if speed <= 0:
        raise ValueError(f"platform speed must be positive, got {speed}")
    return _ceil((azimuth_extent / speed + aperture_time) * prf)


def range_samples(delta_range: float, sample_rate: float) -> int:
    return _ceil(delta_range / SPEED_OF_LIGHT * sample_rate)


def window_speed(path: FlightPath, window: ApertureWindow) -> float:
    """Mean speed over the aperture window (distance covered / duration)."""
    times = waypoint_times(path)
    t0, t1 = window.start_time, window.start_time + window.duration
    overlap = np.clip(np.minimum(times[1:], t1) - np.maximum(times[:-1], t0), 0.0, None)
    seg_speed = 0.5 * (path.speeds[1:] + path.speeds[:-1])
    return math.fsum(overlap * seg_speed) / window.duration


def echo_data_size(scene: SceneSpec, window: ApertureWindow, v: float, radar: RadarParams,
                   tx_traj: IlluminatorTrajectory, path: FlightPath):
    """Azimuth/range sample counts and the echo matrix size in bits.

    Returns ``(N_a, N_r, D_echo)``; the bistatic range spread is taken over
    the scene sample grid at the window center.
    """
    (tx, _), (rx, _) = platform_states(tx_traj, path, window.center_time)
    r_bi = bistatic_range(tx, rx, scene.sample_points())
    n_a = azimuth_samples(scene.azimuth_extent, v, radar.aperture_time, radar.prf)
    n_r = range_samples(float(r_bi.max() - r_bi.min()), radar.sample_rate)
    return n_a, n_r, radar.bits_per_sample * n_a * n_r
