"""
Raster types and the PNM codec.

Pixels are kept as real-valued luminance in [0, 1] and are quantized only
at file boundaries, so correlation arithmetic never loses precision
mid-pipeline. Arrays are stored read-only; every operation returns a new
image.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union
import logging

import numpy as np

from imaging.constants import (
    LUMA_WEIGHTS,
    PNM_ASCII_MAGICS,
    PNM_COLOR_MAGICS,
    PNM_GRAY_MAGICS,
    PNM_MAX_DIMENSION,
    PNM_MAX_MAXVAL,
)
from imaging.exceptions import (
    ImageReadError,
    ImageWriteError,
    InvalidConfigError,
    MalformedHeaderError,
    PnmDecodeError,
    TruncatedDataError,
    UnsupportedFormatError,
    ZeroDimensionError,
)

logger = logging.getLogger(__name__)


def _frozen_array(values, expected_ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != expected_ndim:
        raise InvalidConfigError(f"{name} pixels must be a {expected_ndim}-D array, got {arr.ndim}-D")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidConfigError(f"{name} needs width >= 1 and height >= 1, got {arr.shape[1]}x{arr.shape[0]}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidConfigError(f"{name} pixel values must lie in [0.0, 1.0]")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major luminance raster, shape (height, width), values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen_array(self.pixels, 2, "GrayImage"))

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence[float]) -> "GrayImage":
        if len(values) != width * height:
            raise InvalidConfigError(f"expected {width * height} pixels for {width}x{height}, got {len(values)}")
        return cls(np.asarray(values, dtype=np.float64).reshape(height, width))

    @classmethod
    def filled(cls, width: int, height: int, value: float) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.float64))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayImage":
        """Wrap a computed array, clipping resampling round-off back into [0, 1]."""
        return cls(np.clip(arr, 0.0, 1.0))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    def flat(self) -> List[float]:
        return self.pixels.ravel().tolist()

    def pixel(self, coord: "PixelCoord") -> float:
        coord.check_bounds(self.width, self.height)
        return float(self.pixels[coord.row, coord.col])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Row-major (r, g, b) raster, shape (height, width, 3), channels in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.pixels, 3, "RgbImage")
        if arr.shape[2] != 3:
            raise InvalidConfigError(f"RgbImage needs 3 channels, got {arr.shape[2]}")
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self) -> str:
        return f"RgbImage({self.width}x{self.height})"


@dataclass(frozen=True)
class PixelCoord:
    """Zero-based (col, row) in the internal top-left frame, row growing downward."""

    col: int
    row: int

    def check_bounds(self, width: int, height: int) -> None:
        if not (0 <= self.col < width and 0 <= self.row < height):
            raise InvalidConfigError(f"pixel ({self.col}, {self.row}) outside {width}x{height}")

    def rows_from_bottom(self, height: int) -> int:
        """Row index counted upward from the bottom edge (bottom-left origin)."""
        return height - 1 - self.row


Image = Union[GrayImage, RgbImage]


# -------------------- PNM CODEC --------------------

def _read_header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Collect `count` whitespace-separated header tokens after the magic, skipping '#' comments."""
    tokens: List[bytes] = []
    pos = 2
    size = len(data)
    while len(tokens) < count:
        if pos >= size:
            raise MalformedHeaderError(f"header ends after {len(tokens)} of {count} fields")
        char = data[pos:pos + 1]
        if char.isspace():
            pos += 1
            continue
        if char == b"#":
            newline = data.find(b"\n", pos)
            pos = size if newline < 0 else newline + 1
            continue
        start = pos
        while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _header_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise MalformedHeaderError(f"{field} is not a non-negative integer: {token[:20]!r}")
    return int(token)


def load_pnm(data: bytes) -> Image:
    """
    Decode a PGM (P2/P5) or PPM (P3/P6) byte string.

    Samples are divided by maxval. Grayscale files yield a GrayImage,
    colour files an RgbImage.
    """
    if len(data) < 2:
        raise MalformedHeaderError("file too short to hold a PNM magic number")
    magic = data[:2]
    if magic not in PNM_GRAY_MAGICS + PNM_COLOR_MAGICS:
        raise UnsupportedFormatError(f"unsupported magic number {magic!r}; expected P2, P3, P5 or P6")
    if len(data) > 2 and not data[2:3].isspace() and data[2:3] != b"#":
        raise MalformedHeaderError(f"magic number {magic!r} must be followed by whitespace")

    tokens, pos = _read_header_tokens(data, 3)
    width = _header_int(tokens[0], "width")
    height = _header_int(tokens[1], "height")
    maxval = _header_int(tokens[2], "maxval")
    if width == 0 or height == 0:
        raise ZeroDimensionError(f"zero image dimension {width}x{height}")
    if width > PNM_MAX_DIMENSION or height > PNM_MAX_DIMENSION:
        raise UnsupportedFormatError(f"image {width}x{height} exceeds {PNM_MAX_DIMENSION} pixels per side")
    if not 1 <= maxval <= PNM_MAX_MAXVAL:
        raise MalformedHeaderError(f"maxval {maxval} outside 1..{PNM_MAX_MAXVAL}")

    channels = 1 if magic in PNM_GRAY_MAGICS else 3
    count = width * height * channels

    if magic in PNM_ASCII_MAGICS:
        fields = data[pos:].split()
        if len(fields) < count:
            raise TruncatedDataError(f"expected {count} samples, found {len(fields)}")
        try:
            samples = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError as exc:
            raise PnmDecodeError(f"non-numeric sample in ASCII raster: {exc}") from exc
    else:
        # exactly one whitespace byte separates maxval from the raster
        if pos >= len(data):
            raise TruncatedDataError(f"expected {count} samples, raster is missing")
        pos += 1
        dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
        expected = count * dtype.itemsize
        raster = data[pos:pos + expected]
        if len(raster) < expected:
            raise TruncatedDataError(f"expected {expected} raster bytes, found {len(raster)}")
        samples = np.frombuffer(raster, dtype=dtype).astype(np.int64)

    if samples.max(initial=0) > maxval:
        raise PnmDecodeError(f"sample value {int(samples.max())} exceeds maxval {maxval}")

    values = samples.astype(np.float64) / maxval
    logger.debug(f"Decoded {magic.decode()} image {width}x{height} (maxval {maxval})")
    if channels == 1:
        return GrayImage(values.reshape(height, width))
    return RgbImage(values.reshape(height, width, 3))


def save_pnm(image: GrayImage, maxval: int = 255) -> bytes:
    """Encode as binary PGM (P5); samples are rounded half-up to the maxval grid."""
    if not 1 <= maxval <= PNM_MAX_MAXVAL:
        raise InvalidConfigError(f"maxval {maxval} outside 1..{PNM_MAX_MAXVAL}")
    quantized = np.floor(image.pixels * maxval + 0.5).astype(np.int64)
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    return header + quantized.astype(dtype).tobytes()


def to_grayscale(image: RgbImage) -> GrayImage:
    """Luma conversion with BT.601 weights; pixels whose channels agree pass through unchanged."""
    pixels = image.pixels
    luma = np.tensordot(pixels, np.asarray(LUMA_WEIGHTS), axes=([2], [0]))
    neutral = (pixels[..., 0] == pixels[..., 1]) & (pixels[..., 1] == pixels[..., 2])
    return GrayImage.from_array(np.where(neutral, pixels[..., 0], luma))


def as_gray(image: Image) -> GrayImage:
    return image if isinstance(image, GrayImage) else to_grayscale(image)


# -------------------- FILES --------------------

def read_image(path: Union[str, Path]) -> Image:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageReadError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return load_pnm(data)
    except PnmDecodeError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def read_gray(path: Union[str, Path]) -> GrayImage:
    return as_gray(read_image(path))


def write_image(path: Union[str, Path], image: GrayImage, maxval: int = 255) -> None:
    path = Path(path)
    try:
        path.write_bytes(save_pnm(image, maxval))
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.info(f"Wrote {image.width}x{image.height} PGM to {path}")
