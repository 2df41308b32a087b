from .glyph_service import *
from .forward_service import *
from .suite_service import *
from .oracle_service import *
from .record_service import *

__all__ = [
    'glyph_service',
    'forward_service',
    'suite_service',
    'oracle_service',
    'record_service',
]
