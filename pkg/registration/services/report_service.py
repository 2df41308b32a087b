"""
Flat CSV rendering shared by single-pair reports, batch runs and table
benchmarks. One schema everywhere keeps the output plot-ready.
"""
from typing import Iterable, List, Optional, TextIO
import csv

from registration.services.pipeline_service import RegistrationReport, RstParams

CSV_HEADER = [
    "sample",
    "actual_rotation", "actual_scale", "actual_tx", "actual_ty",
    "detected_rotation", "detected_scale", "detected_tx", "detected_ty",
    "rot_err", "scale_err_pct", "trans_exact",
    "skipped", "reason",
]


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        text = f"{value:.4f}"
        return "0.0000" if text == "-0.0000" else text
    return str(value)


def csv_row(
    sample: str,
    actual: Optional[RstParams] = None,
    report: Optional[RegistrationReport] = None,
    skipped: bool = False,
    reason: str = "",
) -> List[str]:
    """Unmeasured parameters and errors stay blank."""
    measured = report.measured if report else ()
    detected = report.detected if report else None
    translation = None
    if report and "translation" in measured:
        # ground truth is placed in the frame the user arrived in
        translation = report.user_translation or detected.translation
    errors = report.errors if report else None

    values = [
        sample,
        actual.rotation if actual else None,
        actual.scale if actual else None,
        actual.translation.dx if actual else None,
        actual.translation.dy if actual else None,
        detected.rotation if "rotation" in measured else None,
        detected.scale if "scale" in measured else None,
        translation.dx if translation else None,
        translation.dy if translation else None,
        errors.rotation_deg if errors else None,
        errors.scale_pct if errors else None,
        errors.translation_exact if errors else None,
        skipped,
        reason,
    ]
    return [format_value(v) for v in values]


def write_csv(rows: Iterable[List[str]], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
