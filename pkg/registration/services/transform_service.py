"""
Geometric resampling: common-grid embedding, rotation and uniform resize.

All resampling is inverse-mapped bilinear interpolation over pixel centers.
"""
from typing import Optional, Tuple
import logging
import math

import numpy as np

from imaging.constants import DEFAULT_FILL
from imaging.exceptions import DegenerateSizeError, InvalidConfigError
from imaging.services.raster import GrayImage
from registration.constants import GRID_SNAP

logger = logging.getLogger(__name__)


def _check_fill(fill: float) -> None:
    if not 0.0 <= fill <= 1.0:
        raise InvalidConfigError(f"fill luminance must lie in [0, 1], got {fill}")


def _snap(coords: np.ndarray) -> np.ndarray:
    nearest = np.rint(coords)
    return np.where(np.abs(coords - nearest) < GRID_SNAP, nearest, coords)


def _sample_bilinear(src: np.ndarray, xs: np.ndarray, ys: np.ndarray, fill: Optional[float]) -> np.ndarray:
    """
    Sample src at fractional (xs, ys).

    With fill=None lookups clamp to the border (edge replicate); otherwise
    the source is surrounded by one pixel of fill and anything beyond that
    ring takes the fill value.
    """
    xs = _snap(xs)
    ys = _snap(ys)
    height, width = src.shape
    if fill is None:
        xs = np.clip(xs, 0.0, width - 1)
        ys = np.clip(ys, 0.0, height - 1)
        grid = np.pad(src, ((0, 1), (0, 1)), mode="edge")
        outside = None
    else:
        grid = np.pad(src, 1, mode="constant", constant_values=fill)
        xs = xs + 1.0
        ys = ys + 1.0
        outside = (xs < 0.0) | (xs > width + 1) | (ys < 0.0) | (ys > height + 1)
        xs = np.clip(xs, 0.0, width + 1)
        ys = np.clip(ys, 0.0, height + 1)

    x0 = np.minimum(np.floor(xs).astype(np.int64), grid.shape[1] - 2)
    y0 = np.minimum(np.floor(ys).astype(np.int64), grid.shape[0] - 2)
    fx = xs - x0
    fy = ys - y0

    top = grid[y0, x0] * (1.0 - fx) + grid[y0, x0 + 1] * fx
    bottom = grid[y0 + 1, x0] * (1.0 - fx) + grid[y0 + 1, x0 + 1] * fx
    out = top * (1.0 - fy) + bottom * fy
    if outside is not None:
        out[outside] = fill
    return out


def embed_common(a: GrayImage, b: GrayImage, fill: float = DEFAULT_FILL) -> Tuple[GrayImage, GrayImage]:
    """Center both images on a canvas of the larger width and the larger height."""
    _check_fill(fill)
    width = max(a.width, b.width)
    height = max(a.height, b.height)
    return _place_centered(a, width, height, fill), _place_centered(b, width, height, fill)


def _place_centered(image: GrayImage, width: int, height: int, fill: float) -> GrayImage:
    if image.size == (width, height):
        return image
    canvas = np.full((height, width), fill, dtype=np.float64)
    left = (width - image.width) // 2
    top = (height - image.height) // 2
    canvas[top:top + image.height, left:left + image.width] = image.pixels
    return GrayImage(canvas)


def rotated_canvas_size(width: int, height: int, angle: float) -> Tuple[int, int]:
    """Axis-aligned extent of a width x height raster rotated by angle degrees."""
    theta = math.radians(angle)
    cos, sin = abs(math.cos(theta)), abs(math.sin(theta))
    out_w = math.ceil(width * cos + height * sin - 1e-6)
    out_h = math.ceil(width * sin + height * cos - 1e-6)
    return max(1, out_w), max(1, out_h)


def rotate(image: GrayImage, angle: float, fill: float = DEFAULT_FILL) -> GrayImage:
    """
    Rotate counterclockwise (as seen on screen) about the image center.

    The canvas grows to the rotated content's extent, so nothing is clipped.
    """
    _check_fill(fill)
    if not math.isfinite(angle):
        raise InvalidConfigError(f"rotation angle must be finite, got {angle}")
    if angle % 360.0 == 0.0:
        return GrayImage(image.pixels)

    theta = math.radians(angle)
    cos, sin = math.cos(theta), math.sin(theta)
    # exact quarter turns keep the grid mapping exact
    cos = 0.0 if abs(cos) < 1e-12 else cos
    sin = 0.0 if abs(sin) < 1e-12 else sin

    out_w, out_h = rotated_canvas_size(image.width, image.height, angle)
    cx_in, cy_in = (image.width - 1) / 2.0, (image.height - 1) / 2.0
    cx_out, cy_out = (out_w - 1) / 2.0, (out_h - 1) / 2.0

    rows, cols = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    # y axis flipped so positive angles turn counterclockwise on screen
    u_out = cols - cx_out
    v_out = cy_out - rows
    u_src = u_out * cos + v_out * sin
    v_src = -u_out * sin + v_out * cos

    out = _sample_bilinear(image.pixels, cx_in + u_src, cy_in - v_src, fill)
    return GrayImage.from_array(out)


def resize(image: GrayImage, ratio: float) -> GrayImage:
    """Uniform scale on both axes; output dimensions round half up."""
    if not (math.isfinite(ratio) and ratio > 0.0):
        raise InvalidConfigError(f"resize ratio must be a positive finite number, got {ratio}")
    out_w = math.floor(image.width * ratio + 0.5)
    out_h = math.floor(image.height * ratio + 0.5)
    if out_w < 1 or out_h < 1:
        raise DegenerateSizeError(
            f"resizing {image.width}x{image.height} by {ratio:.4g} gives {out_w}x{out_h}"
        )
    if ratio == 1.0:
        return GrayImage(image.pixels)

    scale_x = out_w / image.width
    scale_y = out_h / image.height
    rows, cols = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    xs = (cols + 0.5) / scale_x - 0.5
    ys = (rows + 0.5) / scale_y - 0.5
    return GrayImage.from_array(_sample_bilinear(image.pixels, xs, ys, None))
