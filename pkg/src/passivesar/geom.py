"""Scene geometry: 3-D vectors, gridded terrain, clearance and line of sight.

All coordinates are scene-local Cartesian meters with z pointing up. A
position is a plain ``numpy`` array of shape ``(3,)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

Vec3 = np.ndarray


class OutOfBoundsError(ValueError):
    """A query fell outside the terrain grid footprint."""


def vec3(x, y=None, z=None) -> Vec3:
    """Build a float ``(3,)`` array from three scalars or one 3-sequence."""
    if y is None:
        v = np.asarray(x, dtype=float).reshape(3)
    else:
        v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector component in {v}")
    return v


def unit(v: np.ndarray) -> np.ndarray:
    """Normalize along the last axis."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class HillSpec:
    center: tuple[float, float]
    peak_height: float
    radius: float
    profile: str = "cone"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"hill radius must be positive, got {self.radius}")
        if self.peak_height < 0:
            raise ValueError(f"hill peak_height must be >= 0, got {self.peak_height}")
        if self.profile not in ("cone", "gaussian"):
            raise ValueError(f"unknown hill profile {self.profile!r}")

    def contribution(self, x, y):
        dist = np.hypot(np.asarray(x, dtype=float) - self.center[0],
                        np.asarray(y, dtype=float) - self.center[1])
        if self.profile == "cone":
            return self.peak_height * np.maximum(0.0, 1.0 - dist / self.radius)
        sigma = self.radius / 2.0
        return self.peak_height * np.exp(-dist**2 / (2.0 * sigma**2))


@dataclass(frozen=True, eq=False)
class TerrainModel:
    """Regular height grid; ``heights[j, i]`` sits at ``origin + (i, j) * spacing``.

    The model is immutable: the height array is made read-only on construction.
    """

    origin: tuple[float, float]
    spacing: float
    heights: np.ndarray
    hills: tuple[HillSpec, ...] = field(default_factory=tuple)
    base_height: float | None = None

    def __post_init__(self):
        h = np.array(self.heights, dtype=float)
        if self.spacing <= 0:
            raise ValueError(f"terrain spacing must be positive, got {self.spacing}")
        if h.ndim != 2 or h.shape[0] < 2 or h.shape[1] < 2:
            raise ValueError(f"terrain grid must be at least 2x2, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("terrain heights must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "hills", tuple(self.hills))

    @property
    def shape(self) -> tuple[int, int]:
        return self.heights.shape

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """``(xmin, xmax, ymin, ymax)`` of the grid footprint."""
        ny, nx = self.heights.shape
        x0, y0 = self.origin
        return x0, x0 + (nx - 1) * self.spacing, y0, y0 + (ny - 1) * self.spacing

    def contains(self, x, y) -> np.ndarray:
        xmin, xmax, ymin, ymax = self.bounds
        tol = 1e-9 * self.spacing
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x >= xmin - tol) & (x <= xmax + tol) & (y >= ymin - tol) & (y <= ymax + tol)


def synth_terrain(base_height: float, hills: Sequence[HillSpec],
                  extent: tuple[tuple[float, float], tuple[float, float]],
                  spacing: float) -> TerrainModel:
    """Sample a flat base plus analytic hills onto a regular grid.

    ``extent`` is ``((xmin, xmax), (ymin, ymax))``. The grid starts at the
    lower-left corner and is extended by at most one cell so it covers the
    whole extent.
    """
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    (xmin, xmax), (ymin, ymax) = extent
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"empty terrain extent {extent}")
    for hill in hills:
        cx, cy = hill.center
        if not (xmin <= cx <= xmax and ymin <= cy <= ymax):
            raise ValueError(f"hill center {hill.center} outside extent {extent}")
    nx = int(math.ceil((xmax - xmin) / spacing - 1e-9)) + 1
    ny = int(math.ceil((ymax - ymin) / spacing - 1e-9)) + 1
    xs = xmin + spacing * np.arange(nx)
    ys = ymin + spacing * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys)
    h = np.full(gx.shape, float(base_height))
    for hill in hills:
        h = h + hill.contribution(gx, gy)
    return TerrainModel((xmin, ymin), spacing, h, tuple(hills), float(base_height))


def height_at(terrain: TerrainModel, x, y):
    """Bilinear terrain height; accepts scalars or arrays.

    Raises
    ------
    OutOfBoundsError
        If any query point lies outside the grid footprint.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = terrain.contains(x, y)
    if not np.all(inside):
        bad = np.argwhere(~np.atleast_1d(inside))[0][0]
        bx = np.atleast_1d(np.broadcast_to(x, inside.shape))[bad]
        by = np.atleast_1d(np.broadcast_to(y, inside.shape))[bad]
        raise OutOfBoundsError(
            f"point ({bx:.3f}, {by:.3f}) outside terrain footprint {terrain.bounds}")
    h = terrain.heights
    ny, nx = h.shape
    fx = (x - terrain.origin[0]) / terrain.spacing
    fy = (y - terrain.origin[1]) / terrain.spacing
    i = np.clip(np.floor(fx).astype(int), 0, nx - 2)
    j = np.clip(np.floor(fy).astype(int), 0, ny - 2)
    tx = np.clip(fx - i, 0.0, 1.0)
    ty = np.clip(fy - j, 0.0, 1.0)
    lower = h[j, i] * (1.0 - tx) + h[j, i + 1] * tx
    upper = h[j + 1, i] * (1.0 - tx) + h[j + 1, i + 1] * tx
    out = lower * (1.0 - ty) + upper * ty
    return float(out) if out.ndim == 0 else out


def clearance(terrain: TerrainModel, p) -> float | np.ndarray:
    """Height of ``p`` above the terrain surface; negative when underground.

    ``p`` may be a single ``(3,)`` position or an ``(n, 3)`` array.
    """
    p = np.asarray(p, dtype=float)
    return p[..., 2] - height_at(terrain, p[..., 0], p[..., 1])


def line_of_sight(terrain: TerrainModel, a, b, step: float | None = None) -> bool:
    """True when the straight segment ``a``-``b`` stays strictly above ground.

    The ray is sampled every ``step`` meters (default: one grid spacing);
    endpoints must themselves be above terrain.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    step = terrain.spacing if step is None else step
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    for name, p in (("a", a), ("b", b)):
        if clearance(terrain, p) < 0:
            raise ValueError(f"endpoint {name}={p} is below terrain")
    length = float(np.linalg.norm(b - a))
    n = int(math.ceil(length / step))
    if n <= 1:
        return True
    t = np.arange(1, n) / n
    samples = a + t[:, None] * (b - a)
    return bool(np.all(clearance(terrain, samples) > 0.0))


_GRID_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def load_ascii_grid(path) -> TerrainModel:
    """Read an ESRI-style ASCII grid.

    Header keys ``ncols nrows xllcorner yllcorner cellsize`` (any order, case
    insensitive) precede the heights. Rows are stored north to south, as in
    the ESRI convention, and node ``(0, 0)`` of the last row sits exactly at
    ``(xllcorner, yllcorner)``.
    """
    header: dict[str, float] = {}
    values: list[float] = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            key = parts[0].lower()
            if not values and key in _GRID_KEYS + ("nodata_value",):
                header[key] = float(parts[1])
            else:
                values.extend(float(v) for v in parts)
    missing = [k for k in _GRID_KEYS if k not in header]
    if missing:
        raise ValueError(f"{path}: missing grid header fields {missing}")
    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    if len(values) != ncols * nrows:
        raise ValueError(f"{path}: expected {ncols * nrows} heights, found {len(values)}")
    grid = np.array(values, dtype=float).reshape(nrows, ncols)[::-1]
    if "nodata_value" in header and np.any(grid == header["nodata_value"]):
        raise ValueError(f"{path}: grid contains nodata cells")
    return TerrainModel((header["xllcorner"], header["yllcorner"]), header["cellsize"], grid)


def save_ascii_grid(terrain: TerrainModel, path) -> None:
    ny, nx = terrain.shape
    lines = [f"ncols {nx}", f"nrows {ny}",
             f"xllcorner {terrain.origin[0]!r}", f"yllcorner {terrain.origin[1]!r}",
             f"cellsize {terrain.spacing!r}"]
    for row in terrain.heights[::-1]:
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
