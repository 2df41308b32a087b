"""
Flag handling shared by the management commands of both the registration
and experiments apps.
"""
from dataclasses import dataclass
from functools import wraps
from pathlib import Path
from typing import Optional
import json
import logging

from django.conf import settings
from django.core.management.base import CommandError

from imaging.exceptions import EXIT_CODE_HELP, ImageReadError, InvalidConfigError, RstError
from registration.choices import ReportFormat
from registration.serializers import GroundTruthSerializer, RunConfigSerializer
from registration.services.pipeline_service import RstParams
from registration.services.rotation_service import RotationSearchConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    search: RotationSearchConfig
    threshold: float
    report_format: str = ReportFormat.JSON
    workers: int = 1
    seed: Optional[int] = None


def add_search_arguments(parser, report_format: bool = True) -> None:
    """Flags for the threshold and rotation search, defaulting to project settings."""
    parser.epilog = EXIT_CODE_HELP
    parser.add_argument('--threshold', type=float, default=getattr(settings, 'RST_THRESHOLD', 0.5),
                        help='Ink threshold on [0,1] luminance (default: %(default)s)')
    parser.add_argument('--range-min', type=float, default=getattr(settings, 'RST_RANGE_MIN', -60.0),
                        help='Lowest rotation hypothesis in degrees (default: %(default)s)')
    parser.add_argument('--range-max', type=float, default=getattr(settings, 'RST_RANGE_MAX', 60.0),
                        help='Highest rotation hypothesis in degrees (default: %(default)s)')
    parser.add_argument('--coarse-step', type=float, default=getattr(settings, 'RST_COARSE_STEP', 5.0),
                        help='Coarse sweep step in degrees (default: %(default)s)')
    parser.add_argument('--fine-step', type=float, default=getattr(settings, 'RST_FINE_STEP', 1.0),
                        help='Fine sweep step in degrees (default: %(default)s)')
    parser.add_argument('--fine-halfwidth', type=float, default=getattr(settings, 'RST_FINE_HALFWIDTH', 3.0),
                        help='Fine window half-width around the coarse best (default: %(default)s)')
    parser.add_argument('--fill', type=float, default=getattr(settings, 'RST_FILL', 1.0),
                        help='Background luminance for canvas exposed by rotation (default: %(default)s)')
    parser.add_argument('--workers', type=int, default=getattr(settings, 'RST_BENCH_WORKERS', 1),
                        help='Threads used to evaluate independent candidates (default: %(default)s)')
    parser.add_argument('--no-height-match', dest='height_match', action='store_false',
                        default=getattr(settings, 'RST_HEIGHT_MATCH', True),
                        help='Correlate rotation candidates at their own scale instead of the reference height')
    if report_format:
        parser.add_argument('--format', dest='report_format', choices=ReportFormat.values,
                            default=ReportFormat.JSON, help='Report format (default: %(default)s)')


def run_config_from_options(options: dict) -> RunConfig:
    serializer = RunConfigSerializer(data={
        'threshold': options['threshold'],
        'range_min': options['range_min'],
        'range_max': options['range_max'],
        'coarse_step': options['coarse_step'],
        'fine_step': options['fine_step'],
        'fine_halfwidth': options['fine_halfwidth'],
        'fill': options['fill'],
        'height_match': options.get('height_match', True),
        'report_format': options.get('report_format') or ReportFormat.JSON,
        'workers': options.get('workers') or 1,
        'seed': options.get('seed'),
    })
    if not serializer.is_valid():
        raise InvalidConfigError(f"invalid arguments: {_flatten_errors(serializer.errors)}")
    data = serializer.validated_data
    return RunConfig(
        search=data['search'],
        threshold=data['threshold'],
        report_format=data['report_format'],
        workers=data['workers'],
        seed=data.get('seed'),
    )


def _flatten_errors(errors) -> str:
    parts = []
    for key, messages in errors.items():
        text = "; ".join(str(m) for m in messages)
        parts.append(text if key == 'non_field_errors' else f"{key}: {text}")
    return ", ".join(parts)


def existing_file(path: str) -> Path:
    candidate = Path(path)
    if not candidate.is_file():
        raise ImageReadError(f"cannot read {candidate}: no such file")
    return candidate


def load_ground_truth(path: Path) -> RstParams:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ImageReadError(f"cannot read ground truth {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"ground truth {path} is not valid JSON: {exc}") from exc
    serializer = GroundTruthSerializer(data=payload)
    if not serializer.is_valid():
        raise InvalidConfigError(f"ground truth {path}: {_flatten_errors(serializer.errors)}")
    return serializer.save()


def as_command_error(exc: RstError) -> CommandError:
    logger.error(f"{exc.__class__.__name__}: {exc}")
    return CommandError(str(exc), returncode=exc.exit_code)


def reports_errors(handle):
    """Wrap a command's handle() so failures leave with the documented exit codes."""
    @wraps(handle)
    def wrapper(self, *args, **options):
        try:
            return handle(self, *args, **options)
        except CommandError:
            raise
        except RstError as exc:
            raise as_command_error(exc) from exc
        except Exception as exc:
            logger.exception(f"Unexpected failure in {self.__module__.rsplit('.', 1)[-1]}")
            raise CommandError(f"internal error: {exc}", returncode=1) from exc
    return wrapper
