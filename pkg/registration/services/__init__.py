from .transform_service import *  # noqa: F401,F403
from .correlation_service import *  # noqa: F401,F403
from .rotation_service import *  # noqa: F401,F403
from .translation_service import *  # noqa: F401,F403
from .scaling_service import *  # noqa: F401,F403
from .pipeline_service import *  # noqa: F401,F403
from .report_service import *  # noqa: F401,F403

__all__ = [
    'transform_service',
    'correlation_service',
    'rotation_service',
    'translation_service',
    'scaling_service',
    'pipeline_service',
    'report_service',
]
