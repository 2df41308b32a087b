import numpy as np

from imaging.exceptions import DimensionMismatchError
from imaging.services.raster import GrayImage


def cross_correlation(x: GrayImage, y: GrayImage) -> float:
    """
    Sum over all pixels of the product of mean-centred luminances.

    Symmetric, invariant to adding a constant to either image, and exactly
    zero when either image is constant.
    """
    if x.size != y.size:
        raise DimensionMismatchError(
            f"cross_correlation needs equal sizes, got {x.width}x{x.height} and {y.width}x{y.height}"
        )
    xp, yp = x.pixels, y.pixels
    if np.ptp(xp) == 0.0 or np.ptp(yp) == 0.0:
        return 0.0
    return float(np.sum((xp - xp.mean()) * (yp - yp.mean())))
