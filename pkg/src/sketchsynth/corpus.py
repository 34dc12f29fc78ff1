"""Raster corpus: synthetic sketch generation and PGM/manifest storage.

The training workflow expects the artist to draw a spread of everything
they might produce; for tests and the shipped demo a generator stands in
for the artist, emitting circles, lines, and arcs under random affine
transforms. Corpora are stored one binary PGM ("P5", maxval 255) per
raster plus a plain-text manifest listing the files in order.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .errors import IoFailure, MalformedDocument
from .sketch import (
    DEFAULT_RESOLUTION,
    Raster,
    SketchFrame,
    affine_transform,
    frame_from_strokes,
    rasterize,
)


def _circle(points: int = 48, radius: float = 0.3) -> list[tuple[float, float, float]]:
    return [
        (
            0.5 + radius * math.cos(2 * math.pi * i / points),
            0.5 + radius * math.sin(2 * math.pi * i / points),
            10.0 * i,
        )
        for i in range(points + 1)
    ]


def _line() -> list[tuple[float, float, float]]:
    return [(0.15 + 0.7 * i / 31, 0.5, 10.0 * i) for i in range(32)]


def _arc(points: int = 32, radius: float = 0.32) -> list[tuple[float, float, float]]:
    return [
        (
            0.5 + radius * math.cos(math.pi * i / points),
            0.5 + radius * math.sin(math.pi * i / points),
            10.0 * i,
        )
        for i in range(points + 1)
    ]


_BASE_SHAPES = (_circle, _line, _arc)


def synthetic_frame(rng: np.random.Generator) -> SketchFrame:
    """One random shape under a random rotation / zoom / shift."""
    shape = _BASE_SHAPES[int(rng.integers(len(_BASE_SHAPES)))]
    frame = frame_from_strokes([shape()])
    return affine_transform(
        frame,
        rotation=float(rng.uniform(0.0, 2.0 * math.pi)),
        scale=float(rng.uniform(0.5, 1.4)),
        translate=(float(rng.uniform(-0.2, 0.2)), float(rng.uniform(-0.2, 0.2))),
    )


def synthetic_corpus(
    n: int, resolution: int = DEFAULT_RESOLUTION, seed: int = 0
) -> list[Raster]:
    """n rasterised synthetic sketches, reproducible from the seed."""
    rng = np.random.default_rng(seed)
    return [rasterize(synthetic_frame(rng), resolution) for _ in range(n)]


def write_pgm(raster: Raster, path: str) -> None:
    """Binary PGM: "P5", maxval 255, byte = round(pixel * 255)."""
    data = np.clip(np.rint(raster.pixels * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{raster.resolution} {raster.resolution}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header + data.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write PGM {path}: {exc}") from exc


def read_pgm(path: str) -> Raster:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read PGM {path}: {exc}") from exc
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4 and pos < len(blob):
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        fields.append(blob[start:pos])
    if len(fields) < 4 or fields[0] != b"P5":
        raise MalformedDocument(f"{path} is not a binary PGM")
    try:
        width, height, maxval = (int(f) for f in fields[1:4])
    except ValueError as exc:
        raise MalformedDocument(f"{path} has a bad PGM header") from exc
    if width != height or maxval != 255:
        raise MalformedDocument(
            f"{path}: expected square maxval-255 PGM, got {width}x{height}/{maxval}"
        )
    pixels = np.frombuffer(blob[pos + 1:], dtype=np.uint8)
    if pixels.size != width * height:
        raise MalformedDocument(f"{path}: pixel payload has {pixels.size} bytes")
    grid = pixels.reshape(height, width).astype(np.float64) / 255.0
    return Raster(resolution=width, pixels=grid)


def write_corpus(rasters: list[Raster], directory: str) -> str:
    """Write NNNN.pgm files plus manifest.txt; returns the manifest path."""
    root = Path(directory)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create corpus dir {directory}: {exc}") from exc
    names = []
    for i, raster in enumerate(rasters):
        name = f"{i:04d}.pgm"
        write_pgm(raster, str(root / name))
        names.append(name)
    manifest = root / "manifest.txt"
    try:
        manifest.write_text("".join(n + "\n" for n in names), encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"cannot write manifest: {exc}") from exc
    return str(manifest)


def read_corpus(manifest_path: str) -> list[Raster]:
    """Load every raster listed in a manifest (paths relative to it)."""
    try:
        lines = Path(manifest_path).read_text(encoding="ascii").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {manifest_path}: {exc}") from exc
    base = os.path.dirname(os.path.abspath(manifest_path))
    return [read_pgm(os.path.join(base, line)) for line in lines if line.strip()]
