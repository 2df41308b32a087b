from dataclasses import dataclass
import logging

from imaging.exceptions import BlankImageError, InvalidConfigError
from imaging.services.preprocess import InkMask, bounding_box

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Translation2D:
    """
    Background margins in the bottom-left frame: dx blank columns on the
    left, dy blank rows along the bottom.
    """

    dx: int
    dy: int

    def __post_init__(self):
        if int(self.dx) != self.dx or int(self.dy) != self.dy or self.dx < 0 or self.dy < 0:
            raise InvalidConfigError(f"translation must be non-negative whole pixels, got ({self.dx}, {self.dy})")
        object.__setattr__(self, "dx", int(self.dx))
        object.__setattr__(self, "dy", int(self.dy))

    def as_tuple(self):
        return self.dx, self.dy


def detect_translation(mask: InkMask) -> Translation2D:
    """Count all-background columns from the left and rows from the bottom."""
    box = bounding_box(mask)
    if box is None:
        raise BlankImageError("cannot measure translation of an image without ink")
    translation = Translation2D(dx=box.left, dy=mask.height - 1 - box.bottom)
    logger.debug(f"Detected translation {translation.as_tuple()}")
    return translation
