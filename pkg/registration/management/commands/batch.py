"""
Register every test image of a signature database laid out as
ROOT/<subject>/reference.<ext> plus any number of test images per subject.

A ground-truth sidecar <test>.json next to a test image is attached to its
report. A failing item becomes a skipped row and never stops the run.
"""
from pathlib import Path
import json
import logging

from django.core.management.base import BaseCommand, CommandError

from imaging.exceptions import PARTIAL_FAILURE_EXIT_CODE, ImageReadError, RstError
from imaging.services.raster import read_gray, write_image
from registration.choices import ReportFormat
from registration.command_utils import (
    add_search_arguments,
    as_command_error,
    load_ground_truth,
    reports_errors,
    run_config_from_options,
)
from registration.serializers import RegistrationReportSerializer
from registration.services.pipeline_service import correct_rst
from registration.services.report_service import csv_row, write_csv

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {'.pgm', '.ppm', '.pnm'}


class Command(BaseCommand):
    help = 'Run the combined RST correction over ROOT/<subject>/ directories (one reference, N tests each)'

    def add_arguments(self, parser):
        parser.add_argument('root', help='Database root holding one directory per subject')
        parser.add_argument(
            '--reference-name',
            default='reference',
            help='File stem of the reference image inside each subject directory (default: reference)',
        )
        parser.add_argument('--out-dir', help='Write corrected images to OUT_DIR/<subject>/<test>.pgm')
        add_search_arguments(parser)

    @reports_errors
    def handle(self, *args, **options):
        try:
            config = run_config_from_options(options)
            root = Path(options['root'])
            if not root.is_dir():
                raise ImageReadError(f"cannot read {root}: not a directory")
        except RstError as exc:
            raise as_command_error(exc) from exc

        out_dir = Path(options['out_dir']) if options['out_dir'] else None
        rows, documents, failures = [], [], 0

        for subject in sorted(p for p in root.iterdir() if p.is_dir()):
            images = sorted(p for p in subject.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
            references = [p for p in images if p.stem == options['reference_name']]
            tests = [p for p in images if p.stem != options['reference_name']]

            if not references:
                logger.warning(f"{subject.name}: no '{options['reference_name']}' image, skipping subject")
                for test in tests:
                    failures += 1
                    reason = f"no reference image in {subject.name}"
                    rows.append(csv_row(f"{subject.name}/{test.name}", skipped=True, reason=reason))
                    documents.append({'sample': f"{subject.name}/{test.name}", 'error': reason})
                continue

            try:
                reference = read_gray(references[0])
            except RstError as exc:
                logger.error(f"{subject.name}: {exc}")
                for test in tests:
                    failures += 1
                    rows.append(csv_row(f"{subject.name}/{test.name}", skipped=True, reason=str(exc)))
                    documents.append({'sample': f"{subject.name}/{test.name}", 'error': str(exc)})
                continue

            for test in tests:
                sample = f"{subject.name}/{test.name}"
                truth = None
                try:
                    sidecar = test.with_suffix('.json')
                    truth = load_ground_truth(sidecar) if sidecar.is_file() else None
                    corrected, report = correct_rst(
                        reference, read_gray(test), config.search, config.threshold, config.workers
                    )
                    if truth is not None:
                        report = report.with_ground_truth(truth)
                    if out_dir is not None:
                        target = out_dir / subject.name
                        target.mkdir(parents=True, exist_ok=True)
                        write_image(target / f"{test.stem}.pgm", corrected)
                except RstError as exc:
                    failures += 1
                    logger.error(f"{sample}: {exc}")
                    rows.append(csv_row(sample, truth, skipped=True, reason=str(exc)))
                    documents.append({'sample': sample, 'error': str(exc)})
                    continue

                reason = f"outside envelope: {'; '.join(report.envelope_flags)}" if report.envelope_flags else ""
                rows.append(csv_row(sample, truth, report, reason=reason))
                documents.append({'sample': sample, 'report': RegistrationReportSerializer(report).data})

        if config.report_format == ReportFormat.CSV:
            write_csv(rows, self.stdout)
        else:
            self.stdout.write(json.dumps(documents, indent=2))

        if failures:
            self.stderr.write(self.style.WARNING(f'{failures} of {len(rows)} items failed'))
            raise CommandError(f'{failures} of {len(rows)} items failed', returncode=PARTIAL_FAILURE_EXIT_CODE)
        self.stderr.write(self.style.SUCCESS(f'Registered {len(rows)} test images'))
