from .raster import *  # noqa: F401,F403
from .preprocess import *  # noqa: F401,F403

__all__ = [
    'raster',
    'preprocess',
]
