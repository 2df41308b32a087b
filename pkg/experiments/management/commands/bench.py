"""
Regenerate the table-shaped experiments on seeded synthetic glyphs and
emit one CSV row per (glyph, parameters) pair.
"""
from pathlib import Path
import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from experiments.choices import TableChoice
from experiments.constants import DEFAULT_GLYPH_COUNT
from experiments.services.glyph_service import default_glyph_specs
from experiments.services.record_service import record_benchmark_run
from experiments.services.suite_service import envelope_summary, run_table_suite
from imaging.exceptions import ImageWriteError, InvalidConfigError, RstError
from registration.command_utils import (
    add_search_arguments,
    as_command_error,
    reports_errors,
    run_config_from_options,
)
from registration.services.report_service import write_csv

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run table suites (1-4, envelope, all) on synthetic glyphs and print CSV'

    def add_arguments(self, parser):
        parser.add_argument('--table', choices=TableChoice.values, default=TableChoice.ALL,
                            help='Table to regenerate (default: all)')
        parser.add_argument('--glyphs', type=int, default=DEFAULT_GLYPH_COUNT,
                            help='Number of synthetic glyphs (default: %(default)s)')
        parser.add_argument('--seed', type=int, default=1, help='Seed of the first glyph (default: 1)')
        canvas = getattr(settings, 'RST_BENCH_CANVAS', 512)
        parser.add_argument('--canvas', type=int, nargs=2, metavar=('WIDTH', 'HEIGHT'), default=[canvas, canvas],
                            help='Canvas the perturbed glyphs are placed on (default: %(default)s)')
        parser.add_argument('--out', help='Write the CSV to this file instead of standard output')
        parser.add_argument('--record', action='store_true', help='Store the run and its rows in the database')
        add_search_arguments(parser, report_format=False)

    @reports_errors
    def handle(self, *args, **options):
        try:
            config = run_config_from_options(options)
            if options['glyphs'] < 1:
                raise InvalidConfigError(f"--glyphs must be at least 1, got {options['glyphs']}")
            if min(options['canvas']) < 1:
                raise InvalidConfigError(f"--canvas must be positive, got {options['canvas']}")
            glyph_canvas = (
                getattr(settings, 'RST_GLYPH_WIDTH', 200),
                getattr(settings, 'RST_GLYPH_HEIGHT', 120),
            )
            glyphs = default_glyph_specs(options['glyphs'], options['seed'], glyph_canvas)

            rows = []
            for table in TableChoice.expand(options['table']):
                self.stderr.write(f'Running table {table.value} on {len(glyphs)} glyphs...')
                table_rows = run_table_suite(
                    table, glyphs, config.search, tuple(options['canvas']), config.threshold, config.workers
                )
                if table == TableChoice.ENVELOPE:
                    self._print_envelope(table_rows)
                rows.extend(table_rows)
        except RstError as exc:
            raise as_command_error(exc) from exc

        if options['out']:
            try:
                with Path(options['out']).open('w', newline='') as stream:
                    write_csv([row.to_csv_row() for row in rows], stream)
            except OSError as exc:
                raise as_command_error(ImageWriteError(f"cannot write {options['out']}: {exc.strerror or exc}"))
        else:
            write_csv([row.to_csv_row() for row in rows], self.stdout)

        if options['record']:
            run_config = dict(config.search.as_dict(), threshold=config.threshold, canvas=list(options['canvas']))
            run = record_benchmark_run(options['table'], options['seed'], len(glyphs), run_config, rows)
            self.stderr.write(self.style.SUCCESS(f'Recorded as benchmark run {run.pk}'))

        skipped = sum(1 for row in rows if row.skipped)
        self.stderr.write(self.style.SUCCESS(f'{len(rows)} rows ({skipped} skipped)'))

    def _print_envelope(self, rows):
        summary = envelope_summary(rows)

        def fmt(value):
            return 'n/a' if value is None else f'{value:.2f}%'

        self.stderr.write(
            f'Median scale error inside [0.67, 1.33]: {fmt(summary.inside_median_pct)} '
            f'({summary.inside_count} rows); outside: {fmt(summary.outside_median_pct)} '
            f'({summary.outside_count} rows)'
        )
        if (summary.inside_median_pct is not None and summary.outside_median_pct is not None
                and summary.outside_median_pct <= summary.inside_median_pct):
            self.stderr.write(self.style.WARNING('Scale error did not degrade outside the envelope'))
