"""Sketch frames and their raster form.

A sketch frame is the full canvas content: an ordered tuple of strokes,
each stroke an ordered tuple of (x, y, t) points with x, y normalised to
the unit square (y grows downward, screen convention) and t in
milliseconds since the frame started. Frames are immutable values so the
session state machine can snapshot and replay them exactly.

Rasterisation draws binary (no anti-aliasing) strokes onto an RxR grid
with integer Bresenham traversal; that keeps the drawing rule simple
enough to check against a brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveScale, ResolutionTooSmall

#: (x, y, t_ms); x and y in [0, 1], t non-decreasing within a stroke
Point = tuple[float, float, float]

MIN_RESOLUTION = 8
DEFAULT_RESOLUTION = 64


def clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


def make_point(x: float, y: float, t: float) -> Point:
    """Clamp coordinates into the unit square; timestamps pass through."""
    return (clamp01(float(x)), clamp01(float(y)), float(t))


@dataclass(frozen=True)
class SketchFrame:
    """Completed strokes of the current canvas."""

    strokes: tuple[tuple[Point, ...], ...] = ()

    def with_stroke(self, stroke: tuple[Point, ...]) -> "SketchFrame":
        return SketchFrame(self.strokes + (tuple(stroke),))

    def point_count(self) -> int:
        return sum(len(s) for s in self.strokes)


def frame_from_strokes(strokes) -> SketchFrame:
    """Build a frame from raw point lists, clamping coordinates.

    Raises ValueError if timestamps within a stroke decrease.
    """
    out = []
    for stroke in strokes:
        pts = [make_point(x, y, t) for (x, y, t) in stroke]
        for a, b in zip(pts, pts[1:]):
            if b[2] < a[2]:
                raise ValueError(f"stroke timestamps decrease: {a[2]} -> {b[2]}")
        out.append(tuple(pts))
    return SketchFrame(tuple(out))


@dataclass(eq=False)
class Raster:
    """RxR grayscale grid; pixels[row, col] in [0, 1], row 0 at the top."""

    resolution: int
    pixels: np.ndarray

    def flat(self) -> np.ndarray:
        """Row-major 1-D view, the encoder's input layout."""
        return self.pixels.reshape(-1)


def _pixel_index(coord: float, resolution: int) -> int:
    return min(int(math.floor(coord * resolution)), resolution - 1)


def _line_cells(c0: int, r0: int, c1: int, r1: int):
    """Integer Bresenham traversal from (c0, r0) to (c1, r1), inclusive."""
    dc = abs(c1 - c0)
    dr = -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    while True:
        yield c0, r0
        if c0 == c1 and r0 == r1:
            return
        e2 = 2 * err
        if e2 >= dr:
            err += dr
            c0 += sc
        if e2 <= dc:
            err += dc
            r0 += sr


def rasterize(frame: SketchFrame, resolution: int = DEFAULT_RESOLUTION) -> Raster:
    """Draw every stroke as connected line segments on an RxR binary grid.

    Pixel index for a coordinate is floor(coord * R) clamped to
    [0, R - 1]; touched pixels become 1.0, everything else stays 0.0.
    """
    if resolution < MIN_RESOLUTION:
        raise ResolutionTooSmall(f"resolution {resolution} < {MIN_RESOLUTION}")
    pixels = np.zeros((resolution, resolution), dtype=np.float64)
    for stroke in frame.strokes:
        cells = [
            (_pixel_index(clamp01(x), resolution), _pixel_index(clamp01(y), resolution))
            for (x, y, _t) in stroke
        ]
        if len(cells) == 1:
            c, r = cells[0]
            pixels[r, c] = 1.0
            continue
        for (c0, r0), (c1, r1) in zip(cells, cells[1:]):
            for c, r in _line_cells(c0, r0, c1, r1):
                pixels[r, c] = 1.0
    return Raster(resolution=resolution, pixels=pixels)


def affine_transform(
    frame: SketchFrame,
    rotation: float = 0.0,
    scale: float = 1.0,
    translate: tuple[float, float] = (0.0, 0.0),
) -> SketchFrame:
    """Rotate-then-scale every point about the canvas centre, then translate.

    p' = clamp(A @ (p - c) + c + (dx, dy)) with c = (0.5, 0.5). Rotation
    uses the standard matrix on (x, y) with y pointing down, so positive
    angles turn clockwise on screen. Timestamps and stroke structure are
    untouched.
    """
    if not scale > 0.0:
        raise NonPositiveScale(f"scale must be > 0, got {scale}")
    dx, dy = translate
    if rotation == 0.0 and scale == 1.0 and dx == 0.0 and dy == 0.0:
        return frame  # exact identity; avoids fp noise from re-centring
    cos_t = math.cos(rotation)
    sin_t = math.sin(rotation)
    strokes = []
    for stroke in frame.strokes:
        pts = []
        for (x, y, t) in stroke:
            rx = x - 0.5
            ry = y - 0.5
            nx = scale * (cos_t * rx - sin_t * ry) + 0.5 + dx
            ny = scale * (sin_t * rx + cos_t * ry) + 0.5 + dy
            pts.append((clamp01(nx), clamp01(ny), t))
        strokes.append(tuple(pts))
    return SketchFrame(tuple(strokes))
