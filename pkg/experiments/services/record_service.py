from typing import Sequence
import logging

from django.db import transaction

from ..models import BenchmarkRun, ExperimentRecord
from .suite_service import ExperimentRow

logger = logging.getLogger(__name__)


def _record_from_row(run: BenchmarkRun, position: int, row: ExperimentRow) -> ExperimentRecord:
    measured = row.report.measured if row.report else ()
    detected = row.detected
    translation = None
    if row.report and "translation" in measured:
        translation = row.report.user_translation or detected.translation
    errors = row.errors
    return ExperimentRecord(
        run=run,
        position=position,
        sample=row.sample,
        table=row.table,
        mode=row.mode,
        actual_rotation=row.actual.rotation,
        actual_scale=row.actual.scale,
        actual_tx=row.actual.translation.dx,
        actual_ty=row.actual.translation.dy,
        detected_rotation=detected.rotation if "rotation" in measured else None,
        detected_scale=detected.scale if "scale" in measured else None,
        detected_tx=translation.dx if translation else None,
        detected_ty=translation.dy if translation else None,
        rot_err=errors.rotation_deg if errors else None,
        scale_err_pct=errors.scale_pct if errors else None,
        trans_exact=errors.translation_exact if errors else None,
        skipped=row.skipped,
        reason=row.reason,
    )


def record_benchmark_run(table: str, seed: int, glyph_count: int, config: dict,
                         rows: Sequence[ExperimentRow]) -> BenchmarkRun:
    """Store a bench run and its rows in one transaction."""
    with transaction.atomic():
        run = BenchmarkRun.objects.create(
            table=table,
            seed=seed,
            glyph_count=glyph_count,
            config=config,
            rows_requested=len(rows),
            rows_skipped=sum(1 for row in rows if row.skipped),
        )
        ExperimentRecord.objects.bulk_create(
            [_record_from_row(run, position, row) for position, row in enumerate(rows)]
        )
    logger.info(f"Recorded benchmark run {run.pk} with {len(rows)} rows")
    return run
