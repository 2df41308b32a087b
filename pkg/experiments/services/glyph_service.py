"""
Seeded synthetic signatures.

A glyph is one long cursive stroke (a looping baseline written left to
right) plus a few short flourishes, drawn with Pillow at a supersampled
size and box-filtered down so the edges carry anti-aliased gray levels
like a scanned pen stroke.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple
import logging
import math

import numpy as np
from PIL import Image, ImageDraw

from experiments.constants import (
    DEFAULT_GLYPH_CANVAS,
    DEFAULT_STROKE_COUNT,
    DEFAULT_STROKE_THICKNESS,
    GLYPH_SUPERSAMPLE,
)
from imaging.constants import DEFAULT_THRESHOLD
from imaging.exceptions import InvalidConfigError
from imaging.services.preprocess import binarize
from imaging.services.raster import GrayImage

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


@dataclass(frozen=True)
class GlyphSpec:
    identifier: str
    seed: int
    canvas: Tuple[int, int] = DEFAULT_GLYPH_CANVAS
    stroke_count: Tuple[int, int] = DEFAULT_STROKE_COUNT
    thickness: Tuple[int, int] = DEFAULT_STROKE_THICKNESS
    margin: int = 2

    def __post_init__(self):
        for name in ("stroke_count", "thickness"):
            low, high = getattr(self, name)
            if low < 1 or high < low:
                raise InvalidConfigError(f"{name} range must satisfy 1 <= min <= max, got ({low}, {high})")
        if self.margin < 1:
            raise InvalidConfigError(f"margin must be at least 1 px, got {self.margin}")
        width, height = self.canvas
        usable = min(width, height) - 2 * self.padding
        if usable < 4 * self.thickness[1]:
            raise InvalidConfigError(
                f"canvas {width}x{height} is too small for strokes up to {self.thickness[1]} px "
                f"with a {self.margin} px margin"
            )

    @property
    def padding(self) -> int:
        """Distance from the canvas edge that stroke centre lines must keep."""
        return self.margin + math.ceil(self.thickness[1] / 2) + 1


def _cursive_baseline(rng: np.random.Generator, spec: GlyphSpec) -> List[Point]:
    width, height = spec.canvas
    pad = spec.padding
    left, right = pad, width - 1 - pad
    top, bottom = pad, height - 1 - pad

    span = (right - left) * rng.uniform(0.75, 0.95)
    x0 = left + rng.uniform(0.0, (right - left) - span)
    letters = int(rng.integers(4, 8))
    t = np.linspace(0.0, 1.0, 60 * letters)

    # an x oscillation in quadrature with y turns the wave into loops
    loop = span / letters * rng.uniform(0.2, 0.35)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    xs = x0 + t * span + loop * np.sin(2.0 * math.pi * letters * t + phase)

    middle = (top + bottom) / 2.0
    amplitude = (bottom - top) * rng.uniform(0.25, 0.4)
    drift = (bottom - top) * rng.uniform(-0.25, 0.25)
    wobble = rng.uniform(0.1, 0.3)
    ys = (
        middle
        + amplitude * np.cos(2.0 * math.pi * letters * t + phase)
        + amplitude * wobble * np.sin(2.0 * math.pi * rng.uniform(0.5, 1.5) * t)
        + drift * (t - 0.5)
    )
    return list(zip(np.clip(xs, left, right).tolist(), np.clip(ys, top, bottom).tolist()))


def _flourish(rng: np.random.Generator, spec: GlyphSpec) -> List[Point]:
    width, height = spec.canvas
    pad = spec.padding
    x, y = rng.uniform(pad, width - 1 - pad), rng.uniform(pad, height - 1 - pad)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    points = [(x, y)]
    for _ in range(int(rng.integers(3, 7))):
        heading += rng.normal(0.0, 0.6)
        step = rng.uniform(8.0, 30.0)
        x = float(np.clip(x + step * math.cos(heading), pad, width - 1 - pad))
        y = float(np.clip(y + step * math.sin(heading), pad, height - 1 - pad))
        points.append((x, y))
    return points


def _draw(strokes: Sequence[Tuple[List[Point], int]], canvas: Tuple[int, int]) -> np.ndarray:
    factor = GLYPH_SUPERSAMPLE
    width, height = canvas
    sheet = Image.new("L", (width * factor, height * factor), 255)
    pen = ImageDraw.Draw(sheet)
    for points, thickness in strokes:
        scaled = [((x + 0.5) * factor, (y + 0.5) * factor) for x, y in points]
        pen.line(scaled, fill=0, width=thickness * factor, joint="curve")
    small = sheet.resize((width, height), Image.Resampling.BOX)
    return np.asarray(small, dtype=np.float64) / 255.0


def generate_glyph(spec: GlyphSpec) -> GrayImage:
    """Black-on-white signature-like image; identical specs give identical pixels."""
    rng = np.random.default_rng(spec.seed)
    count = int(rng.integers(spec.stroke_count[0], spec.stroke_count[1] + 1))
    low, high = spec.thickness

    strokes = [(_cursive_baseline(rng, spec), int(rng.integers(low, high + 1)))]
    for _ in range(count - 1):
        strokes.append((_flourish(rng, spec), int(rng.integers(low, high + 1))))

    glyph = GrayImage(_draw(strokes, spec.canvas))
    if binarize(glyph, DEFAULT_THRESHOLD).is_empty:
        raise InvalidConfigError(f"glyph {spec.identifier} rendered without ink")
    logger.debug(f"Generated glyph {spec.identifier} (seed {spec.seed}, {count} strokes)")
    return glyph


def default_glyph_specs(count: int, seed: int, canvas: Tuple[int, int] = DEFAULT_GLYPH_CANVAS) -> List[GlyphSpec]:
    if count < 1:
        raise InvalidConfigError(f"at least one glyph is required, got {count}")
    return [GlyphSpec(identifier=f"glyph{i + 1:02d}", seed=seed + i, canvas=canvas) for i in range(count)]
