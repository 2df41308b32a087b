"""
Table-shaped experiment suites: perturb each glyph with every parameter set
of a table through the forward model, register it back, and collect one
row per (glyph, parameters) pair. Rows that cannot be produced are kept
as skipped rows with a reason.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple
import logging

import numpy as np

from experiments.choices import TableChoice
from experiments.constants import (
    DEFAULT_CANVAS,
    ENVELOPE_ROTATIONS,
    ENVELOPE_SCALES_INSIDE,
    ENVELOPE_SCALES_OUTSIDE,
    TABLE_1_ROTATIONS,
    TABLE_2_SCALES,
    TABLE_3_TRANSLATIONS,
    TABLE_4_PAIRS,
)
from experiments.services.forward_service import centered_translation, place_content, transform_content
from experiments.services.glyph_service import GlyphSpec, generate_glyph
from imaging.constants import DEFAULT_THRESHOLD
from imaging.exceptions import InvalidConfigError, RstError
from imaging.services.raster import GrayImage
from registration.choices import CorrectionMode
from registration.constants import ENVELOPE_SCALE_MAX, ENVELOPE_SCALE_MIN
from registration.services.pipeline_service import (
    ENVELOPE_PARAMETERS,
    RegistrationReport,
    RstParams,
    correct_pure,
    envelope_flags,
)
from registration.services.report_service import csv_row
from registration.services.rotation_service import RotationSearchConfig
from registration.services.translation_service import Translation2D

logger = logging.getLogger(__name__)


class SuiteCase(NamedTuple):
    """One requested experiment; translation None means centre the content."""

    rotation: float
    scale: float
    translation: Optional[Tuple[int, int]]


TABLE_MODES = {
    TableChoice.ROTATION: CorrectionMode.ROTATION,
    TableChoice.SCALING: CorrectionMode.SCALING,
    TableChoice.TRANSLATION: CorrectionMode.TRANSLATION,
    TableChoice.COMBINED: CorrectionMode.FULL,
    TableChoice.ENVELOPE: CorrectionMode.FULL,
}


def table_cases(table: str) -> List[SuiteCase]:
    table = TableChoice(table)
    if table == TableChoice.ROTATION:
        return [SuiteCase(float(a), 1.0, None) for a in TABLE_1_ROTATIONS]
    if table == TableChoice.SCALING:
        return [SuiteCase(0.0, float(s), None) for s in TABLE_2_SCALES]
    if table == TableChoice.TRANSLATION:
        return [SuiteCase(0.0, 1.0, t) for t in TABLE_3_TRANSLATIONS]
    if table == TableChoice.COMBINED:
        return [SuiteCase(float(a), float(s), None) for a, s in TABLE_4_PAIRS]
    if table == TableChoice.ENVELOPE:
        scales = ENVELOPE_SCALES_INSIDE + ENVELOPE_SCALES_OUTSIDE
        return [SuiteCase(float(a), float(s), None) for a in ENVELOPE_ROTATIONS for s in scales]
    raise InvalidConfigError(f"table {table!r} is a selector, not a single suite")


@dataclass(frozen=True)
class ExperimentRow:
    sample: str
    table: str
    mode: str
    actual: RstParams
    report: Optional[RegistrationReport] = None
    skipped: bool = False
    reason: str = ""

    @property
    def detected(self) -> Optional[RstParams]:
        return self.report.detected if self.report else None

    @property
    def errors(self):
        return self.report.errors if self.report else None

    def to_csv_row(self) -> List[str]:
        return csv_row(self.sample, self.actual, self.report, self.skipped, self.reason)


def _run_case(
    sample: str,
    table: str,
    reference: GrayImage,
    case: SuiteCase,
    cfg: RotationSearchConfig,
    canvas: Tuple[int, int],
    threshold: float,
) -> ExperimentRow:
    mode = TABLE_MODES[TableChoice(table)]
    try:
        content = transform_content(reference, case.scale, case.rotation, cfg.fill, threshold)
        if case.translation is None:
            translation = centered_translation(content.size, canvas)
        else:
            translation = Translation2D(*case.translation)
        user = place_content(content, translation, canvas, cfg.fill)
    except RstError as exc:
        actual = RstParams(case.rotation, case.scale, Translation2D(*(case.translation or (0, 0))))
        logger.warning(f"{sample}: skipped, {exc}")
        return ExperimentRow(sample, table, mode.value, actual, skipped=True, reason=str(exc))

    actual = RstParams(case.rotation, case.scale, translation)
    try:
        report = correct_pure(reference, user, mode, cfg, threshold).with_ground_truth(actual)
    except RstError as exc:
        logger.warning(f"{sample}: detection failed, {exc}")
        return ExperimentRow(sample, table, mode.value, actual, skipped=True, reason=f"detection failed: {exc}")

    # a centred placement is not a requested translation
    checked = ENVELOPE_PARAMETERS if case.translation is not None else ("rotation", "scale")
    flags = envelope_flags(actual, checked)
    reason = f"outside envelope: {'; '.join(flags)}" if flags else ""
    if flags:
        logger.warning(f"{sample}: {reason}")
    return ExperimentRow(sample, table, mode.value, actual, report, reason=reason)


def run_table_suite(
    table: str,
    glyphs: Sequence[GlyphSpec],
    cfg: Optional[RotationSearchConfig] = None,
    canvas: Tuple[int, int] = DEFAULT_CANVAS,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> List[ExperimentRow]:
    """
    One row per (glyph, table parameters) pair, glyph-major, in table order.

    Skipped rows plus measured rows always equal the number requested.
    """
    if not glyphs:
        raise InvalidConfigError("run_table_suite needs at least one glyph")
    cfg = cfg or RotationSearchConfig()
    table = TableChoice(table).value
    cases = table_cases(table)

    jobs = []
    for spec in glyphs:
        reference = generate_glyph(spec)
        for index, case in enumerate(cases, start=1):
            jobs.append((f"{spec.identifier}-t{table}-s{index:02d}", reference, case))

    def run(job):
        sample, reference, case = job
        return _run_case(sample, table, reference, case, cfg, canvas, threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(job) for job in jobs]

    skipped = sum(1 for row in rows if row.skipped)
    logger.info(f"Table {table}: {len(rows) - skipped} rows measured, {skipped} skipped")
    return rows


class EnvelopeSummary(NamedTuple):
    inside_median_pct: Optional[float]
    outside_median_pct: Optional[float]
    inside_count: int
    outside_count: int


def envelope_summary(rows: Sequence[ExperimentRow]) -> EnvelopeSummary:
    """Median scale error of measured rows inside and outside the reliable scale band."""
    inside, outside = [], []
    for row in rows:
        if row.skipped or row.errors is None or row.errors.scale_pct is None:
            continue
        in_band = ENVELOPE_SCALE_MIN <= row.actual.scale <= ENVELOPE_SCALE_MAX
        (inside if in_band else outside).append(row.errors.scale_pct)
    return EnvelopeSummary(
        inside_median_pct=float(np.median(inside)) if inside else None,
        outside_median_pct=float(np.median(outside)) if outside else None,
        inside_count=len(inside),
        outside_count=len(outside),
    )
