"""Point-target echo synthesis, time-domain backprojection and IRW measurement.

Echoes are generated directly in range-compressed form: a unit point target
at bistatic range ``R`` contributes ``sinc(B (tau - R/c)) exp(-j 2 pi R / lambda)``
to every pulse. Backprojection undoes the phase along each pixel's own range
history, interpolating fast time with an 8-tap Hann-tapered sinc kernel.
"""
from __future__ import annotations

import csv
import logging
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .flightpath import FlightPath, path_state
from .sargeom import (SPEED_OF_LIGHT, ApertureWindow, IlluminatorTrajectory, RadarParams,
                      ResolutionSample, SceneSpec, bistatic_range, platform_states,
                      resolution_cell)

log = logging.getLogger(__name__)

N_TAPS = 8
_HALF_POWER = 1.0 / math.sqrt(2.0)


class MeasurementError(ValueError):
    """The impulse response cannot be measured on the given image."""


@dataclass(frozen=True, eq=False)
class EchoMatrix:
    data: np.ndarray           # (n_pulses, n_fast) complex
    slow_time: np.ndarray      # (n_pulses,) s
    fast_time_origin: float    # s
    fast_time_step: float      # s

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class ImageGrid:
    """Ground-plane pixel grid; pixel ``(i, j)`` is at ``origin + (i, j, 0) * spacing``."""

    origin: np.ndarray
    spacing: float
    n_x: int
    n_y: int

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        if self.spacing <= 0 or self.n_x < 1 or self.n_y < 1:
            raise ValueError("image grid needs positive spacing and size")

    @classmethod
    def centered(cls, center, spacing: float, n_x: int, n_y: int | None = None) -> "ImageGrid":
        n_y = n_x if n_y is None else n_y
        center = np.asarray(center, dtype=float)
        origin = center - np.array([(n_x - 1) / 2.0, (n_y - 1) / 2.0, 0.0]) * spacing
        return cls(origin, spacing, n_x, n_y)

    def pixel_positions(self) -> np.ndarray:
        i, j = np.meshgrid(np.arange(self.n_x), np.arange(self.n_y), indexing="ij")
        xy = np.stack([i, j, np.zeros_like(i)], axis=-1) * self.spacing
        return self.origin + xy


@dataclass(frozen=True, eq=False)
class ComplexImage:
    grid: np.ndarray   # (n_x, n_y) complex; first index runs along x
    origin: np.ndarray
    spacing: float
    out_of_gate: int = 0

    def pixel_to_world(self, i: float, j: float) -> np.ndarray:
        return self.origin + np.array([i, j, 0.0]) * self.spacing


@dataclass(frozen=True)
class IrwMeasurement:
    peak_pos: np.ndarray
    rho_r_meas: float
    rho_a_meas: float
    cell_area_meas: float
    pslr: float
    peak_value: float
    irw_area: float  # rho_r_meas * rho_a_meas / sin(psi), for comparison only


@dataclass(frozen=True)
class VerificationRow:
    label: str
    prediction: ResolutionSample
    measurement: IrwMeasurement

    @property
    def predicted(self) -> float:
        return self.prediction.S_c

    @property
    def measured(self) -> float:
        return self.measurement.cell_area_meas

    @property
    def ratio(self) -> float:
        """Measured over predicted cell area."""
        return self.measured / self.predicted


def _as_targets(targets):
    pos = np.asarray([np.asarray(t[0], dtype=float) for t in targets])
    amp = np.asarray([t[1] for t in targets], dtype=complex)
    return pos.reshape(-1, 3), amp


def _platform_positions(tx_traj: IlluminatorTrajectory, path: FlightPath, t):
    tx, _ = tx_traj.state(t)
    rx, _ = path_state(path, t)
    return tx, rx


def _carrier(r, wavelength):
    # reduce to cycles first so the phase stays accurate at GEO ranges
    return np.exp(2j * np.pi * np.mod(r / wavelength, 1.0))


def simulate_echo(targets, tx_traj: IlluminatorTrajectory, path: FlightPath,
                  window: ApertureWindow, radar: RadarParams,
                  gate: tuple[float, float] | None = None) -> EchoMatrix:
    """Range-compressed echo of point targets ``[(position, amplitude), ...]``.

    ``gate`` is the bistatic-range interval (meters) the fast-time axis must
    cover; by default it spans the targets' range histories plus margin.
    """
    pos, amp = _as_targets(targets)
    t = window.pulse_times(radar.prf)
    tx, rx = _platform_positions(tx_traj, path, t)
    r = bistatic_range(tx[:, None, :], rx[:, None, :], pos[None, :, :])  # (pulses, targets)
    dt = 1.0 / radar.sample_rate
    dr = SPEED_OF_LIGHT * dt
    margin = N_TAPS + 8.0 * radar.sample_rate / radar.bandwidth
    if gate is None:
        gate = (float(r.min()) - margin * dr, float(r.max()) + margin * dr)
    elif r.min() < gate[0] or r.max() > gate[1]:
        raise ValueError("target range history falls outside the fast-time gate")
    k0 = math.floor(gate[0] / dr)
    n_fast = int(math.ceil(gate[1] / dr)) - k0 + 1
    fast_r = (k0 + np.arange(n_fast)) * dr  # bistatic range of each fast-time bin
    data = np.zeros((len(t), n_fast), dtype=complex)
    for k in range(len(amp)):
        delay = (fast_r[None, :] - r[:, k, None]) / SPEED_OF_LIGHT
        data += amp[k] * np.sinc(radar.bandwidth * delay) * np.conj(_carrier(r[:, k, None], radar.wavelength))
    return EchoMatrix(data, t, k0 * dt, dt)


def interp_kernel(frac):
    """8-tap Hann-tapered sinc weights for fractional offsets ``frac`` in [0, 1)."""
    offsets = np.arange(-N_TAPS // 2 + 1, N_TAPS // 2 + 1)  # -3 .. 4
    d = frac[..., None] - offsets
    return np.sinc(d) * 0.5 * (1.0 + np.cos(np.pi * d / (N_TAPS / 2))), offsets


def backproject(echo: EchoMatrix, image_spec, tx_traj: IlluminatorTrajectory, path: FlightPath,
                window: ApertureWindow, radar: RadarParams) -> ComplexImage:
    """Time-domain backprojection onto a ground-plane grid.

    ``image_spec`` is an :class:`ImageGrid` or an ``(origin, spacing, n_x, n_y)``
    tuple. Pixel/pulse pairs whose interpolation taps leave the fast-time gate
    contribute nothing and are counted in ``out_of_gate``.
    """
    spec = image_spec if isinstance(image_spec, ImageGrid) else ImageGrid(*image_spec)
    pix = spec.pixel_positions().reshape(-1, 3)
    tx, rx = _platform_positions(tx_traj, path, echo.slow_time)
    n_fast = echo.data.shape[1]
    acc = np.zeros(len(pix), dtype=complex)
    missed = 0
    for k in range(len(echo.slow_time)):
        r = bistatic_range(tx[k], rx[k], pix)
        f = (r / SPEED_OF_LIGHT - echo.fast_time_origin) / echo.fast_time_step
        base = np.floor(f)
        w, offsets = interp_kernel(f - base)
        idx = base.astype(np.int64)[:, None] + offsets
        ok = (idx[:, 0] >= 0) & (idx[:, -1] < n_fast)
        missed += int(np.count_nonzero(~ok))
        if not np.any(ok):
            continue
        samples = echo.data[k][idx[ok]]
        acc[ok] += np.sum(w[ok] * samples, axis=1) * _carrier(r[ok], radar.wavelength)
    if missed:
        log.warning("%d pixel/pulse pairs fell outside the fast-time gate", missed)
    return ComplexImage(acc.reshape(spec.n_x, spec.n_y), spec.origin, spec.spacing, missed)


def _perp(d):
    return np.array([-d[1], d[0]])


def _profile(mag, center, direction, step=1.0 / 16):
    """Spline-interpolated magnitude along a line through ``center`` (pixel units)."""
    n_x, n_y = mag.shape
    lim = []
    for c, d, n in ((center[0], direction[0], n_x), (center[1], direction[1], n_y)):
        if abs(d) < 1e-12:
            continue
        lim.extend([abs((0 - c) / d), abs((n - 1 - c) / d)])
    reach = min(lim)
    s = np.arange(-math.floor(reach / step), math.floor(reach / step) + 1) * step
    coords = np.vstack([center[0] + s * direction[0], center[1] + s * direction[1]])
    return s, ndimage.map_coordinates(mag, coords, order=3, mode="nearest")


def _half_power_width(s, prof, ref):
    mid = int(np.argmin(np.abs(s)))
    below = prof < ref * _HALF_POWER
    right = np.flatnonzero(below[mid:])
    left = np.flatnonzero(below[:mid + 1][::-1])
    if len(right) == 0 or len(left) == 0:
        raise MeasurementError("-3 dB point not reached inside the image (grid too small)")
    edges = []
    for k, sign in ((mid + right[0], -1), (mid - left[0], 1)):
        k_in = k + sign
        x0, x1, y0, y1 = s[k_in], s[k], prof[k_in], prof[k]
        edges.append(x0 + (ref * _HALF_POWER - y0) * (x1 - x0) / (y1 - y0))
    return abs(edges[0] - edges[1]), mid + right[0], mid - left[0]


def _sidelobe(prof, start, step):
    k = start
    n = len(prof)
    while 0 < k + step < n and prof[k + step] <= prof[k]:
        k += step
    rest = prof[k::step] if step > 0 else prof[k::-1]
    if k + step <= 0 or k + step >= n or len(rest) < 2:
        return None
    return float(rest.max())


def measure_irw(image: ComplexImage, near, range_dir=None, azimuth_dir=None,
                search_radius: float | None = None) -> IrwMeasurement:
    """Impulse-response widths, -3 dB cell area and PSLR of the peak nearest ``near``.

    Range width is read along the iso-Doppler line and azimuth width along the
    iso-range line; both are then projected onto their own gradient direction
    (multiplied by ``sin(psi)``) so they are directly comparable with the
    predicted ``rho_r`` and ``rho_a``. Without directions the image axes are used
    (x = range, y = azimuth).
    """
    g_r = np.array([1.0, 0.0]) if range_dir is None else np.asarray(range_dir, float)[:2]
    g_a = np.array([0.0, 1.0]) if azimuth_dir is None else np.asarray(azimuth_dir, float)[:2]
    g_r = g_r / np.linalg.norm(g_r)
    g_a = g_a / np.linalg.norm(g_a)
    sin_psi = abs(g_r[0] * g_a[1] - g_r[1] * g_a[0])
    if sin_psi < 1e-3:
        raise MeasurementError("range and azimuth directions are parallel")

    mag = np.abs(image.grid)
    n_x, n_y = mag.shape
    near = np.asarray(near, dtype=float)
    ii, jj = np.meshgrid(np.arange(n_x), np.arange(n_y), indexing="ij")
    if search_radius is not None:
        d = np.hypot(image.origin[0] + ii * image.spacing - near[0],
                     image.origin[1] + jj * image.spacing - near[1])
        masked = np.where(d <= search_radius, mag, -np.inf)
    else:
        masked = mag
    i, j = np.unravel_index(int(np.argmax(masked)), mag.shape)
    peak = mag[i, j]
    if not np.isfinite(peak) or peak <= 0 or peak <= 2.0 * np.median(mag):
        raise MeasurementError("no peak above the noise floor")
    if i in (0, n_x - 1) or j in (0, n_y - 1):
        raise MeasurementError("peak lies on the image border")

    def vertex(m0, m1, m2):
        den = m0 - 2.0 * m1 + m2
        return 0.0 if den == 0 else 0.5 * (m0 - m2) / den

    pi = i + vertex(mag[i - 1, j], peak, mag[i + 1, j])
    pj = j + vertex(mag[i, j - 1], peak, mag[i, j + 1])

    widths = []
    pslr = []
    ref = None
    for direction in (_perp(g_a), _perp(g_r)):
        s, prof = _profile(mag, (pi, pj), direction)
        ref_here = float(prof[np.abs(s) <= 1.0].max())
        ref = ref_here if ref is None else max(ref, ref_here)
        w, k_right, k_left = _half_power_width(s, prof, ref_here)
        widths.append(w * image.spacing * sin_psi)
        for start, step in ((k_right, 1), (k_left, -1)):
            side = _sidelobe(prof, start, step)
            if side is not None:
                pslr.append(20.0 * math.log10(side / ref_here))
    rho_r, rho_a = widths

    above = mag >= ref * _HALF_POWER
    labels, _ = ndimage.label(above)
    region = labels == labels[i, j]
    if region[0, :].any() or region[-1, :].any() or region[:, 0].any() or region[:, -1].any():
        raise MeasurementError("-3 dB region touches the image border (grid too small)")
    area = float(np.count_nonzero(region)) * image.spacing**2
    return IrwMeasurement(
        peak_pos=image.pixel_to_world(pi, pj), rho_r_meas=rho_r, rho_a_meas=rho_a,
        cell_area_meas=area, pslr=max(pslr) if pslr else float("nan"),
        peak_value=ref, irw_area=rho_r * rho_a / sin_psi)


def image_grid_for(sample: ResolutionSample, max_pixels: int = 255,
                   oversample: float = 16.0, extent: float = 2.0) -> ImageGrid:
    """Square grid around a predicted cell, fine enough to count -3 dB pixels."""
    sin_psi = math.sin(sample.psi)
    half = extent * max(sample.rho_r, sample.rho_a) / sin_psi
    spacing = min(sample.rho_r, sample.rho_a) / oversample
    n = 2 * int(math.ceil(half / spacing)) + 1
    if n > max_pixels:
        n = max_pixels if max_pixels % 2 else max_pixels - 1
        spacing = 2.0 * half / (n - 1)
    return ImageGrid.centered(sample.target, spacing, n)


def select_targets(samples: list[ResolutionSample], center) -> dict[str, int]:
    """Indices of the reference (closest to the scene center), min and max cells."""
    pts = np.array([s.target for s in samples])
    areas = np.array([s.S_c for s in samples])
    ref = int(np.argmin(np.linalg.norm(pts[:, :2] - np.asarray(center)[:2], axis=1)))
    return {"Ref.": ref, "Min.": int(np.argmin(areas)), "Max.": int(np.argmax(areas))}


def verify_resolution(scene: SceneSpec, tx_traj: IlluminatorTrajectory, path: FlightPath,
                      window: ApertureWindow, radar: RadarParams, n_targets: int = 25,
                      max_pixels: int = 255) -> list[VerificationRow]:
    """Image an evenly spaced point-target grid and compare measured with predicted cells.

    Rows come back for the reference, minimum-area and maximum-area targets, in
    that order.
    """
    grid_scene = SceneSpec(scene.center, scene.range_extent, scene.azimuth_extent, n_targets)
    tx_state, rx_state = platform_states(tx_traj, path, window.center_time)
    samples = [resolution_cell(tx_state, rx_state, p, radar) for p in grid_scene.sample_points()]
    chosen = select_targets(samples, scene.center)
    grids = {label: image_grid_for(samples[k], max_pixels) for label, k in chosen.items()}

    t = window.pulse_times(radar.prf)
    tx, rx = _platform_positions(tx_traj, path, t)
    corners = []
    for g in grids.values():
        for ci in (0, g.n_x - 1):
            for cj in (0, g.n_y - 1):
                corners.append(g.origin + np.array([ci, cj, 0.0]) * g.spacing)
    pts = np.vstack([grid_scene.sample_points(), corners])
    r = bistatic_range(tx[:, None, :], rx[:, None, :], pts[None, :, :])
    pad = (N_TAPS + 8.0 * radar.sample_rate / radar.bandwidth) * SPEED_OF_LIGHT / radar.sample_rate
    echo = simulate_echo([(p, 1.0) for p in grid_scene.sample_points()], tx_traj, path, window,
                         radar, gate=(float(r.min()) - pad, float(r.max()) + pad))

    rows = []
    for label, k in chosen.items():
        s = samples[k]
        img = backproject(echo, grids[label], tx_traj, path, window, radar)
        m = measure_irw(img, s.target, s.range_dir, s.azimuth_dir,
                        search_radius=0.5 * max(s.rho_r, s.rho_a) / math.sin(s.psi))
        rows.append(VerificationRow(label, s, m))
    return rows


def write_psim(image: ComplexImage, path) -> None:
    """Binary dump: ``PSIM`` magic, u32 n_x, u32 n_y, f32 spacing, then float32 (re, im) pairs."""
    n_x, n_y = image.grid.shape
    body = np.empty((n_x, n_y, 2), dtype="<f4")
    body[..., 0] = image.grid.real
    body[..., 1] = image.grid.imag
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIIf", b"PSIM", n_x, n_y, image.spacing))
        fh.write(body.tobytes(order="C"))


def read_psim(path, origin=(0.0, 0.0, 0.0)) -> ComplexImage:
    with open(path, "rb") as fh:
        magic, n_x, n_y, spacing = struct.unpack("<4sIIf", fh.read(16))
        if magic != b"PSIM":
            raise ValueError(f"{path}: not a PSIM image (magic {magic!r})")
        body = np.frombuffer(fh.read(), dtype="<f4")
    if body.size != 2 * n_x * n_y:
        raise ValueError(f"{path}: truncated image body")
    body = body.reshape(n_x, n_y, 2)
    return ComplexImage(body[..., 0] + 1j * body[..., 1], np.asarray(origin, float), float(spacing))


def write_db_csv(image: ComplexImage, fh) -> None:
    """``x_m, y_m, db`` rows with magnitude normalized to the image peak."""
    mag = np.abs(image.grid)
    peak = mag.max() if mag.max() > 0 else 1.0
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / peak)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x_m", "y_m", "db"])
    n_x, n_y = mag.shape
    for i in range(n_x):
        for j in range(n_y):
            p = image.pixel_to_world(i, j)
            w.writerow([f"{p[0]:.4f}", f"{p[1]:.4f}", f"{max(db[i, j], -200.0):.3f}"])
