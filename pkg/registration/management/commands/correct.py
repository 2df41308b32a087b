"""
Cancel rotation, translation and scaling of a user image, write the
corrected PGM and print the report.
"""
import json
import logging

from django.core.management.base import BaseCommand

from imaging.exceptions import RstError
from imaging.services.raster import read_gray, write_image
from registration.command_utils import (
    add_search_arguments,
    as_command_error,
    existing_file,
    load_ground_truth,
    reports_errors,
    run_config_from_options,
)
from registration.serializers import RegistrationReportSerializer
from registration.services.pipeline_service import correct_rst

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Write the RST-corrected user image (cropped to ink) and print the registration report'

    def add_arguments(self, parser):
        parser.add_argument('reference', help='Reference PGM/PPM path')
        parser.add_argument('user', help='User (test) PGM/PPM path')
        parser.add_argument('--out', required=True, help='Output PGM path for the corrected image')
        parser.add_argument('--truth', help='Ground-truth sidecar JSON {rotation_deg, scale, tx, ty}')
        add_search_arguments(parser, report_format=False)

    @reports_errors
    def handle(self, *args, **options):
        try:
            config = run_config_from_options(options)
            reference_path = existing_file(options['reference'])
            user_path = existing_file(options['user'])
            truth = load_ground_truth(existing_file(options['truth'])) if options['truth'] else None

            corrected, report = correct_rst(
                read_gray(reference_path),
                read_gray(user_path),
                config.search,
                config.threshold,
                config.workers,
            )
            if truth is not None:
                report = report.with_ground_truth(truth)
            write_image(options['out'], corrected)
        except RstError as exc:
            raise as_command_error(exc) from exc

        self.stdout.write(json.dumps(RegistrationReportSerializer(report).data, indent=2))
        self.stderr.write(self.style.SUCCESS(
            f'Corrected image {corrected.width}x{corrected.height} written to {options["out"]}'
        ))
