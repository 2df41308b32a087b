"""
Detect the rotation, scaling and translation of a user image against a
reference image and print the report.
"""
import json
import logging

from django.core.management.base import BaseCommand

from imaging.exceptions import RstError
from imaging.services.raster import read_gray
from registration.choices import CorrectionMode, ReportFormat
from registration.command_utils import (
    add_search_arguments,
    as_command_error,
    existing_file,
    load_ground_truth,
    reports_errors,
    run_config_from_options,
)
from registration.serializers import RegistrationReportSerializer
from registration.services.pipeline_service import correct_pure
from registration.services.report_service import csv_row, write_csv

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Detect RST parameters of a user PNM image against a reference PNM image'

    def add_arguments(self, parser):
        parser.add_argument('reference', help='Reference PGM/PPM path')
        parser.add_argument('user', help='User (test) PGM/PPM path')
        parser.add_argument(
            '--mode',
            choices=CorrectionMode.values,
            default=CorrectionMode.FULL,
            help='Run the combined correction or a single detector (default: full)',
        )
        parser.add_argument('--truth', help='Ground-truth sidecar JSON {rotation_deg, scale, tx, ty}')
        add_search_arguments(parser)

    @reports_errors
    def handle(self, *args, **options):
        try:
            config = run_config_from_options(options)
            reference_path = existing_file(options['reference'])
            user_path = existing_file(options['user'])
            truth = load_ground_truth(existing_file(options['truth'])) if options['truth'] else None

            report = correct_pure(
                read_gray(reference_path),
                read_gray(user_path),
                options['mode'],
                config.search,
                config.threshold,
                config.workers,
            )
            if truth is not None:
                report = report.with_ground_truth(truth)
        except RstError as exc:
            raise as_command_error(exc) from exc

        if config.report_format == ReportFormat.CSV:
            write_csv([csv_row(user_path.name, truth, report)], self.stdout)
        else:
            self.stdout.write(json.dumps(RegistrationReportSerializer(report).data, indent=2))
        self.stderr.write(self.style.SUCCESS(f'Detected {self._summary(report)}'))

    @staticmethod
    def _summary(report) -> str:
        detected = report.detected
        parts = {
            'rotation': f'rotation {detected.rotation:+g} deg',
            'scale': f'scale {detected.scale:.4f}',
            'translation': f'translation {detected.translation.as_tuple()}',
        }
        return ', '.join(parts[name] for name in report.measured)
