from typing import NamedTuple
import logging

from imaging.exceptions import InvalidConfigError
from imaging.services.raster import GrayImage

logger = logging.getLogger(__name__)


class ScalingRatios(NamedTuple):
    x: float
    y: float


def scaling_ratios(reference_cropped: GrayImage, user_cropped: GrayImage) -> ScalingRatios:
    """Reference size over user size along each axis; both inputs must already be cropped to ink."""
    if user_cropped.width < 1 or user_cropped.height < 1:
        raise InvalidConfigError("user crop has no extent")
    return ScalingRatios(
        x=reference_cropped.width / user_cropped.width,
        y=reference_cropped.height / user_cropped.height,
    )


def width_ratio(reference_cropped: GrayImage, user_cropped: GrayImage) -> float:
    """X-axis ratio, kept for diagnostics only."""
    return scaling_ratios(reference_cropped, user_cropped).x


def detect_scaling(reference_cropped: GrayImage, user_cropped: GrayImage) -> float:
    """Height ratio; the width ratio is reported separately and never applied."""
    ratios = scaling_ratios(reference_cropped, user_cropped)
    logger.debug(f"Scaling ratios x={ratios.x:.4f} y={ratios.y:.4f}")
    return ratios.y
