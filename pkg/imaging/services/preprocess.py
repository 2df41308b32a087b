"""
Binarization, min-max normalization and ink-content cropping: the front
end shared by every correction stage.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence
import logging

import numpy as np

from imaging.constants import DEFAULT_THRESHOLD
from imaging.exceptions import (
    BlankImageError,
    DegenerateRangeError,
    DimensionMismatchError,
    InvalidConfigError,
)
from imaging.services.raster import GrayImage

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InkMask:
    """Boolean raster, shape (height, width); True marks an ink pixel."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise InvalidConfigError(f"InkMask needs a non-empty 2-D array, got shape {bits.shape}")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def is_empty(self) -> bool:
        return not bool(self.bits.any())

    @property
    def ink_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, InkMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel bounds in the top-left frame."""

    left: int
    top: int
    right: int
    bottom: int

    def __post_init__(self):
        if self.left > self.right or self.top > self.bottom or self.left < 0 or self.top < 0:
            raise InvalidConfigError(f"invalid bounding box {self}")

    @property
    def width(self) -> int:
        return self.right - self.left + 1

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise InvalidConfigError(f"threshold must lie in (0, 1), got {threshold}")


def binarize(image: GrayImage, threshold: float = DEFAULT_THRESHOLD) -> InkMask:
    """Ink is dark on light: a pixel is ink exactly when it is below the threshold."""
    _check_threshold(threshold)
    return InkMask(image.pixels < threshold)


def minmax_normalize(values: Sequence[float]) -> List[float]:
    """Map values affinely onto [0, 1]; min goes to 0, max to 1, order is preserved."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise InvalidConfigError("cannot normalize an empty sequence")
    low, high = float(arr.min()), float(arr.max())
    if high == low:
        raise DegenerateRangeError(f"all {arr.size} values equal {low}; nothing to normalize")
    return ((arr - low) / (high - low)).tolist()


def bounding_box(mask: InkMask) -> Optional[BoundingBox]:
    """Tightest box around every ink pixel, or None for an empty mask."""
    rows = np.flatnonzero(mask.bits.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.bits.any(axis=0))
    return BoundingBox(left=int(cols[0]), top=int(rows[0]), right=int(cols[-1]), bottom=int(rows[-1]))


def crop_to_content(image: GrayImage, mask: InkMask) -> GrayImage:
    if (mask.width, mask.height) != (image.width, image.height):
        raise DimensionMismatchError(
            f"mask {mask.width}x{mask.height} does not match image {image.width}x{image.height}"
        )
    box = bounding_box(mask)
    if box is None:
        raise BlankImageError("image has no ink pixels at the configured threshold")
    return GrayImage(image.pixels[box.top:box.bottom + 1, box.left:box.right + 1])


def crop_ink(image: GrayImage, threshold: float = DEFAULT_THRESHOLD) -> GrayImage:
    """binarize then crop_to_content."""
    return crop_to_content(image, binarize(image, threshold))
