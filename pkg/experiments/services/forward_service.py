"""
Forward model: apply known RST parameters to a clean glyph.

Scale is applied first (resize by 1/scale, so the detector's
reference-over-user ratio reads back `scale`), then rotation, then
placement of the ink crop at the translation offset in the bottom-left
frame.
"""
from typing import Tuple
import logging

import numpy as np

from imaging.constants import DEFAULT_FILL, DEFAULT_THRESHOLD
from imaging.exceptions import ContentOverflowError
from imaging.services.preprocess import crop_ink
from imaging.services.raster import GrayImage
from registration.services.pipeline_service import RstParams
from registration.services.transform_service import resize, rotate
from registration.services.translation_service import Translation2D

logger = logging.getLogger(__name__)


def transform_content(
    image: GrayImage,
    scale: float = 1.0,
    rotation: float = 0.0,
    fill: float = DEFAULT_FILL,
    threshold: float = DEFAULT_THRESHOLD,
) -> GrayImage:
    """Scaled and rotated ink content, cropped so the ink touches every border."""
    content = crop_ink(image, threshold)
    if scale != 1.0:
        content = resize(content, 1.0 / scale)
    if rotation != 0.0:
        content = rotate(content, rotation, fill)
    # resampling softens the border rows, so crop again at the same threshold
    return crop_ink(content, threshold)


def place_content(
    content: GrayImage,
    translation: Translation2D,
    canvas: Tuple[int, int],
    fill: float = DEFAULT_FILL,
) -> GrayImage:
    """Put `content` dx columns from the left and dy rows above the bottom edge."""
    width, height = canvas
    if translation.dx + content.width > width or translation.dy + content.height > height:
        raise ContentOverflowError(
            f"content {content.width}x{content.height} at offset {translation.as_tuple()} "
            f"does not fit the {width}x{height} canvas"
        )
    sheet = np.full((height, width), fill, dtype=np.float64)
    top = height - translation.dy - content.height
    sheet[top:top + content.height, translation.dx:translation.dx + content.width] = content.pixels
    return GrayImage(sheet)


def centered_translation(content_size: Tuple[int, int], canvas: Tuple[int, int]) -> Translation2D:
    (content_w, content_h), (width, height) = content_size, canvas
    if content_w > width or content_h > height:
        raise ContentOverflowError(
            f"content {content_w}x{content_h} does not fit the {width}x{height} canvas"
        )
    return Translation2D((width - content_w) // 2, (height - content_h) // 2)


def forward_rst(
    image: GrayImage,
    params: RstParams,
    canvas: Tuple[int, int],
    fill: float = DEFAULT_FILL,
    threshold: float = DEFAULT_THRESHOLD,
) -> GrayImage:
    content = transform_content(image, params.scale, params.rotation, fill, threshold)
    logger.debug(
        f"Forward RST rotation {params.rotation:g}, scale {params.scale:g}, "
        f"translation {params.translation.as_tuple()} -> content {content.width}x{content.height}"
    )
    return place_content(content, params.translation, canvas, fill)
