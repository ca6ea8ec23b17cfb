"""Synthetic terrain with planted V-shaped valleys."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from terranalog.core.raster.dem_grid import DemGrid
from terranalog.exception import ExtentError

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantedValley:
    """
    A straight V-shaped valley carved into the surface.

    Parameters
    ----------
    start, end : tuple of float
        Center line endpoints as ``(row, col)`` pixel coordinates.
    depth : float
        Floor depth below the surrounding surface, meters.
    width : float
        Rim-to-rim width, meters.
    jitter : float
        Amplitude of the lateral meander of the center line, meters.
    """

    start: Tuple[float, float]
    end: Tuple[float, float]
    depth: float
    width: float
    jitter: float = 0.0


@dataclass(frozen=True)
class PlantedDepression:
    """A circular bowl of the given radius (meters) and depth (meters)."""

    center: Tuple[float, float]
    radius: float
    depth: float


@dataclass(frozen=True)
class SynthSpec:
    """
    Parameters of a synthetic terrain.

    Parameters
    ----------
    size : int or tuple of int
        Grid size in pixels, ``(rows, cols)`` or a single value for squares.
    cell_size : float
        Meters per pixel.
    base_elevation : float
        Mean surface elevation, meters.
    roughness : float
        Standard deviation of the coarsest midpoint-displacement level, meters.
        Zero gives a flat base.
    roughness_decay : float
        Hurst-like exponent; each finer level scales noise by ``2**-decay``.
    valleys, depressions : sequence
        Features carved into the base surface.
    """

    size: object = 128
    cell_size: float = 30.0
    base_elevation: float = 0.0
    roughness: float = 0.0
    roughness_decay: float = 0.8
    valleys: Sequence[PlantedValley] = field(default_factory=tuple)
    depressions: Sequence[PlantedDepression] = field(default_factory=tuple)

    @property
    def shape(self) -> Tuple[int, int]:
        if isinstance(self.size, int):
            return self.size, self.size
        rows, cols = self.size
        return int(rows), int(cols)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> SynthSpec:
        data = dict(data)
        size = data.pop("size", 128)
        valleys = tuple(
            PlantedValley(
                start=tuple(v["start"]),
                end=tuple(v["end"]),
                depth=float(v["depth"]),
                width=float(v["width"]),
                jitter=float(v.get("jitter", 0.0)),
            )
            for v in data.pop("valleys", ())
        )
        depressions = tuple(
            PlantedDepression(
                center=tuple(d["center"]),
                radius=float(d["radius"]),
                depth=float(d["depth"]),
            )
            for d in data.pop("depressions", ())
        )
        return cls(
            size=size if isinstance(size, int) else tuple(size),
            valleys=valleys,
            depressions=depressions,
            **data,
        )


def _midpoint_displacement(
    rows: int, cols: int, roughness: float, decay: float, rng: np.random.Generator
) -> np.ndarray:
    """Diamond-square fractal surface with zero mean, cropped to ``rows × cols``."""
    n = 1
    while n + 1 < max(rows, cols):
        n *= 2
    size = n + 1
    surface = np.zeros((size, size))
    surface[::n, ::n] = rng.normal(0.0, roughness, (2, 2))

    step, scale = n, roughness
    while step > 1:
        half = step // 2
        scale *= 2.0 ** (-decay)

        corners = (
            surface[0:-1:step, 0:-1:step]
            + surface[0:-1:step, step::step]
            + surface[step::step, 0:-1:step]
            + surface[step::step, step::step]
        ) / 4.0
        surface[half::step, half::step] = corners + rng.normal(
            0.0, scale, corners.shape
        )

        padded = np.pad(surface, half, constant_values=np.nan)

        def neighbour_mean(r: slice, c: slice) -> np.ndarray:
            # Rows/cols in ``padded`` are shifted by ``half``.
            stack = np.stack(
                [
                    padded[_shift(r, 0), _shift(c, half)],
                    padded[_shift(r, 2 * half), _shift(c, half)],
                    padded[_shift(r, half), _shift(c, 0)],
                    padded[_shift(r, half), _shift(c, 2 * half)],
                ]
            )
            return np.nanmean(stack, axis=0)

        edge_rows = slice(0, size, step), slice(half, size, step)
        edge_cols = slice(half, size, step), slice(0, size, step)
        top = neighbour_mean(*edge_rows)
        side = neighbour_mean(*edge_cols)
        surface[edge_rows] = top + rng.normal(0.0, scale, top.shape)
        surface[edge_cols] = side + rng.normal(0.0, scale, side.shape)
        step = half

    out = surface[:rows, :cols]
    return out - out.mean()


def _shift(s: slice, offset: int) -> slice:
    return slice(s.start + offset, s.stop + offset, s.step)


def _segment_distance(
    rr: np.ndarray, cc: np.ndarray, start: np.ndarray, end: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Distance from each pixel to the segment, and the clamped position along it."""
    direction = end - start
    length_sq = float(direction @ direction)
    if length_sq == 0:
        t = np.zeros_like(rr)
    else:
        along = (rr - start[0]) * direction[0] + (cc - start[1]) * direction[1]
        t = along / length_sq
        t = np.clip(t, 0.0, 1.0)
    dr = rr - (start[0] + t * direction[0])
    dc = cc - (start[1] + t * direction[1])
    return np.hypot(dr, dc), t


def _meander(
    t: np.ndarray, amplitude: float, rng: np.random.Generator
) -> np.ndarray:
    """Smooth lateral offset along a valley: a few random sine harmonics."""
    if amplitude == 0:
        return np.zeros_like(t)
    harmonics = np.arange(1, 4)
    weights = rng.normal(0.0, 1.0, harmonics.size) / harmonics
    phases = rng.uniform(0.0, 2 * math.pi, harmonics.size)
    wave = np.sum(
        weights[:, None, None]
        * np.sin(math.pi * harmonics[:, None, None] * t[None] + phases[:, None, None]),
        axis=0,
    )
    peak = np.abs(wave).max()
    return amplitude * wave / peak if peak > 0 else wave


def synth_terrain(spec: SynthSpec, seed: int = 0) -> DemGrid:
    """
    Generate a synthetic DEM.

    A midpoint-displacement surface receives analytically carved V profiles:
    each valley lowers cells within ``width / 2`` of its (optionally
    meandering) center line by ``depth * (1 - 2 d / width)``. Overlapping
    carvings keep the deepest. The result is a pure function of
    ``(spec, seed)``.

    Raises
    ------
    ExtentError
        If a valley endpoint or depression center lies outside the grid.
    """
    rows, cols = spec.shape
    for valley in spec.valleys:
        for r, c in (valley.start, valley.end):
            if not (0 <= r <= rows - 1 and 0 <= c <= cols - 1):
                raise ExtentError(
                    f"Valley endpoint ({r}, {c}) outside {rows}x{cols} extent."
                )
    for bowl in spec.depressions:
        r, c = bowl.center
        if not (0 <= r <= rows - 1 and 0 <= c <= cols - 1):
            raise ExtentError(f"Depression center ({r}, {c}) outside extent.")

    rng = np.random.default_rng(seed)
    if spec.roughness > 0:
        base = _midpoint_displacement(
            rows, cols, spec.roughness, spec.roughness_decay, rng
        )
    else:
        base = np.zeros((rows, cols))
    surface = base + spec.base_elevation

    rr, cc = np.meshgrid(
        np.arange(rows, dtype=np.float64), np.arange(cols, dtype=np.float64),
        indexing="ij",
    )
    carve = np.zeros((rows, cols))
    for valley in spec.valleys:
        start = np.asarray(valley.start, dtype=np.float64)
        end = np.asarray(valley.end, dtype=np.float64)
        distance, t = _segment_distance(rr, cc, start, end)
        if valley.jitter:
            offset = _meander(t, valley.jitter / spec.cell_size, rng)
            direction = end - start
            normal = np.array([direction[1], -direction[0]])
            normal /= np.linalg.norm(normal)
            distance, _ = _segment_distance(
                rr - offset * normal[0], cc - offset * normal[1], start, end
            )
        half_width = valley.width / 2.0 / spec.cell_size
        profile = valley.depth * np.clip(1.0 - distance / half_width, 0.0, None)
        carve = np.maximum(carve, profile)
    for bowl in spec.depressions:
        radius = bowl.radius / spec.cell_size
        distance = np.hypot(rr - bowl.center[0], cc - bowl.center[1])
        profile = bowl.depth * np.clip(1.0 - (distance / radius) ** 2, 0.0, None)
        carve = np.maximum(carve, profile)

    _logger.debug(
        "Synthesized %dx%d terrain with %d valleys, seed %d",
        rows,
        cols,
        len(spec.valleys),
        seed,
    )
    return DemGrid(surface - carve, cell_size=spec.cell_size)


def valley_floor_cells(spec: SynthSpec, index: int = 0) -> np.ndarray:
    """``(row, col)`` pixels lying on the center line of valley ``index``."""
    valley = spec.valleys[index]
    start = np.asarray(valley.start, dtype=np.float64)
    end = np.asarray(valley.end, dtype=np.float64)
    count = int(math.ceil(np.abs(end - start).max())) + 1
    points = start + np.linspace(0.0, 1.0, count)[:, None] * (end - start)
    return np.unique(np.rint(points).astype(int), axis=0)


def random_valleys(
    count: int,
    shape: Tuple[int, int],
    rng: np.random.Generator,
    depth: Tuple[float, float] = (150.0, 600.0),
    width: Tuple[float, float] = (600.0, 2400.0),
    margin: int = 4,
) -> List[PlantedValley]:
    """Draw straight valleys with random endpoints, depths and widths."""
    rows, cols = shape
    out = []
    for _ in range(count):
        start = (
            float(rng.integers(margin, rows - margin)),
            float(rng.integers(margin, cols - margin)),
        )
        end = (
            float(rng.integers(margin, rows - margin)),
            float(rng.integers(margin, cols - margin)),
        )
        out.append(
            PlantedValley(
                start=start,
                end=end,
                depth=float(rng.uniform(*depth)),
                width=float(rng.uniform(*width)),
            )
        )
    return out
