"""
Write a perturbed synthetic glyph plus a ground-truth sidecar JSON, for use
as an external test fixture (`detect --truth`, `batch`).
"""
from pathlib import Path
import json
import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from experiments.services.forward_service import centered_translation, place_content, transform_content
from experiments.services.glyph_service import GlyphSpec, generate_glyph
from imaging.exceptions import EXIT_CODE_HELP, ImageWriteError, InvalidConfigError, RstError
from imaging.services.raster import write_image
from registration.command_utils import as_command_error, reports_errors
from registration.serializers import GroundTruthSerializer
from registration.services.pipeline_service import RstParams
from registration.services.translation_service import Translation2D

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Render a seeded glyph, apply scale, rotation and translation, and write PGM + sidecar JSON'

    def add_arguments(self, parser):
        parser.epilog = EXIT_CODE_HELP
        parser.add_argument('--seed', type=int, default=1, help='Glyph seed (default: 1)')
        parser.add_argument('--glyph-width', type=int, default=getattr(settings, 'RST_GLYPH_WIDTH', 200))
        parser.add_argument('--glyph-height', type=int, default=getattr(settings, 'RST_GLYPH_HEIGHT', 120))
        canvas = getattr(settings, 'RST_BENCH_CANVAS', 512)
        parser.add_argument('--canvas', type=int, nargs=2, metavar=('WIDTH', 'HEIGHT'), default=[canvas, canvas])
        parser.add_argument('--rotation', type=float, default=0.0, help='Degrees, counterclockwise positive')
        parser.add_argument('--scale', type=float, default=1.0,
                            help='Reference-over-user size ratio the detector should report (default: 1)')
        parser.add_argument('--tx', type=int, help='Blank columns left of the ink (default: centred)')
        parser.add_argument('--ty', type=int, help='Blank rows below the ink (default: centred)')
        parser.add_argument('--threshold', type=float, default=getattr(settings, 'RST_THRESHOLD', 0.5))
        parser.add_argument('--fill', type=float, default=getattr(settings, 'RST_FILL', 1.0))
        parser.add_argument('--out', required=True, help='Output PGM; the sidecar goes next to it as .json')
        parser.add_argument('--reference-out', help='Also write the unperturbed glyph to this PGM')

    @reports_errors
    def handle(self, *args, **options):
        try:
            if not 0.0 < options['threshold'] < 1.0:
                raise InvalidConfigError(f"--threshold must lie strictly between 0 and 1, got {options['threshold']}")
            if not 0.0 <= options['fill'] <= 1.0:
                raise InvalidConfigError(f"--fill must lie in [0, 1], got {options['fill']}")
            if not options['scale'] > 0:
                raise InvalidConfigError(f"--scale must be positive, got {options['scale']}")
            spec = GlyphSpec(
                identifier=f"seed{options['seed']}",
                seed=options['seed'],
                canvas=(options['glyph_width'], options['glyph_height']),
            )
            glyph = generate_glyph(spec)
            content = transform_content(
                glyph, options['scale'], options['rotation'], options['fill'], options['threshold']
            )
            canvas = tuple(options['canvas'])
            centred = centered_translation(content.size, canvas)
            translation = Translation2D(
                centred.dx if options['tx'] is None else options['tx'],
                centred.dy if options['ty'] is None else options['ty'],
            )
            params = RstParams(options['rotation'], options['scale'], translation)
            image = place_content(content, translation, canvas, options['fill'])

            out = Path(options['out'])
            write_image(out, image)
            sidecar = out.with_suffix('.json')
            try:
                sidecar.write_text(json.dumps(GroundTruthSerializer.from_params(params), indent=2) + '\n')
            except OSError as exc:
                raise ImageWriteError(f"cannot write {sidecar}: {exc.strerror or exc}") from exc
            if options['reference_out']:
                write_image(options['reference_out'], glyph)
        except RstError as exc:
            raise as_command_error(exc) from exc

        self.stderr.write(self.style.SUCCESS(
            f'Wrote {out} ({image.width}x{image.height}) with ground truth '
            f'rotation {params.rotation:g}, scale {params.scale:g}, translation {translation.as_tuple()}'
        ))
