from functools import lru_cache
from io import StringIO
from pathlib import Path
import csv
import json
import tempfile

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from experiments.choices import TableChoice
from experiments.models import BenchmarkRun, ExperimentRecord
from experiments.services.forward_service import centered_translation, forward_rst, place_content
from experiments.services.glyph_service import GlyphSpec, default_glyph_specs, generate_glyph
from experiments.services.oracle_service import compare_with_oracle, exhaustive_rotation_oracle
from experiments.services.suite_service import envelope_summary, run_table_suite, table_cases
from imaging.exceptions import ContentOverflowError, InvalidConfigError, NoSignalError
from imaging.services.preprocess import binarize, crop_ink
from imaging.services.raster import GrayImage, read_gray
from registration.services.correlation_service import cross_correlation
from registration.services.pipeline_service import RstParams
from registration.services.rotation_service import RotationSearchConfig, detect_rotation
from registration.services.scaling_service import detect_scaling
from registration.services.transform_service import embed_common, rotate
from registration.services.translation_service import Translation2D, detect_translation


@lru_cache(maxsize=None)
def glyph(seed: int = 1, canvas=(200, 120)) -> GrayImage:
    return generate_glyph(GlyphSpec(identifier=f"g{seed}", seed=seed, canvas=canvas))


class GlyphTests(SimpleTestCase):
    def test_same_seed_same_pixels(self):
        spec = GlyphSpec(identifier="a", seed=42)
        self.assertEqual(generate_glyph(spec), generate_glyph(spec))

    def test_glyph_has_ink_and_margin(self):
        image = glyph(2)
        mask = binarize(image)
        self.assertFalse(mask.is_empty)
        self.assertFalse(mask.bits[0, :].any() or mask.bits[-1, :].any())
        self.assertFalse(mask.bits[:, 0].any() or mask.bits[:, -1].any())
        self.assertEqual(image.size, (200, 120))

    def test_different_seeds_correlate_below_autocorrelation(self):
        a, b = embed_common(glyph(1), glyph(2))
        cross = cross_correlation(a, b)
        self.assertLess(cross, cross_correlation(a, a))
        self.assertLess(cross, cross_correlation(b, b))

    def test_canvas_too_small(self):
        with self.assertRaises(InvalidConfigError):
            GlyphSpec(identifier="tiny", seed=1, canvas=(20, 20))

    def test_invalid_ranges(self):
        with self.assertRaises(InvalidConfigError):
            GlyphSpec(identifier="x", seed=1, thickness=(5, 3))
        with self.assertRaises(InvalidConfigError):
            GlyphSpec(identifier="x", seed=1, stroke_count=(0, 2))

    def test_default_specs(self):
        specs = default_glyph_specs(3, seed=10)
        self.assertEqual([s.identifier for s in specs], ["glyph01", "glyph02", "glyph03"])
        self.assertEqual([s.seed for s in specs], [10, 11, 12])
        with self.assertRaises(InvalidConfigError):
            default_glyph_specs(0, seed=1)


class ForwardModelTests(SimpleTestCase):
    def test_identity_params_place_the_crop(self):
        image = forward_rst(glyph(), RstParams(0.0, 1.0, Translation2D(12, 30)), (300, 300))
        self.assertEqual(crop_ink(image), crop_ink(glyph()))
        self.assertEqual(detect_translation(binarize(image)), Translation2D(12, 30))

    def test_translation_is_recovered(self):
        image = forward_rst(glyph(), RstParams(0.0, 1.0, Translation2D(35, 9)), (300, 300))
        self.assertEqual(detect_translation(binarize(image)).as_tuple(), (35, 9))

    def test_fractional_rotation_is_found_at_whole_degrees(self):
        image = forward_rst(glyph(), RstParams(20.9, 1.0, Translation2D(40, 40)), (300, 300))
        self.assertLessEqual(abs(detect_rotation(glyph(), image).angle - 21.0), 1.0)

    def test_scale_reads_back_as_reference_over_user(self):
        image = forward_rst(glyph(), RstParams(0.0, 1.28, Translation2D(0, 0)), (300, 300))
        ratio = detect_scaling(crop_ink(glyph()), crop_ink(image))
        self.assertLess(abs(ratio - 1.28) / 1.28, 0.07)

    def test_overflow(self):
        with self.assertRaises(ContentOverflowError):
            forward_rst(glyph(), RstParams(0.0, 1.0, Translation2D(150, 0)), (256, 256))
        with self.assertRaises(ContentOverflowError):
            centered_translation((600, 10), (512, 512))

    def test_placement_frame_is_bottom_left(self):
        image = place_content(GrayImage.filled(2, 3, 0.0), Translation2D(1, 0), (5, 5))
        self.assertEqual(image.pixels[2:5, 1:3].max(), 0.0)
        self.assertEqual(image.pixels[0:2, :].min(), 1.0)


class TranslationAcceptanceTests(SimpleTestCase):
    def test_random_translations_are_exact(self):
        rng = np.random.default_rng(2024)
        for spec in default_glyph_specs(5, seed=100):
            content = crop_ink(generate_glyph(spec))
            for _ in range(50):
                tx = int(rng.integers(0, 256 - content.width + 1))
                ty = int(rng.integers(0, 256 - content.height + 1))
                user = place_content(content, Translation2D(tx, ty), (256, 256))
                self.assertEqual(detect_translation(binarize(user)), Translation2D(tx, ty), spec.identifier)


class RotationAcceptanceTests(SimpleTestCase):
    def test_every_whole_degree_inside_the_envelope(self):
        reference = glyph(4)
        for angle in range(-57, 58):
            estimate = detect_rotation(reference, rotate(reference, float(angle)))
            self.assertLessEqual(abs(estimate.angle - angle), 1.0, f"actual {angle}")


class SuiteTests(SimpleTestCase):
    def setUp(self):
        self.glyphs = default_glyph_specs(2, seed=1)

    def test_case_lists(self):
        self.assertEqual(len(table_cases(TableChoice.ROTATION)), 10)
        self.assertEqual(table_cases(TableChoice.TRANSLATION)[-1].translation, (150, 150))
        self.assertEqual(len(table_cases(TableChoice.ENVELOPE)), 18)
        with self.assertRaises(InvalidConfigError):
            table_cases(TableChoice.ALL)

    def test_table_three_is_exact(self):
        rows = run_table_suite("3", self.glyphs)
        self.assertEqual(len(rows), 20)
        for row in rows:
            self.assertFalse(row.skipped, row.reason)
            self.assertTrue(row.errors.translation_exact, row.sample)
            self.assertEqual(row.detected.translation, row.actual.translation)

    def test_table_one_rotations(self):
        rows = run_table_suite("1", self.glyphs[:1])
        self.assertEqual(len(rows), 10)
        for row in rows:
            self.assertFalse(row.skipped, row.reason)
            if abs(row.actual.rotation) <= 57:
                self.assertLessEqual(row.errors.rotation_deg, 1.0, row.sample)
                self.assertEqual(row.reason, "", row.sample)
            else:
                self.assertTrue(row.reason.startswith("outside envelope"))

    def test_table_two_accounts_for_every_row(self):
        rows = run_table_suite("2", self.glyphs)
        self.assertEqual(len(rows), 20)
        extreme = [row for row in rows if row.actual.scale == 7.69]
        self.assertEqual(len(extreme), 2)
        for row in extreme:
            self.assertTrue(row.skipped or "outside envelope" in row.reason)
        for row in rows:
            if not row.skipped and row.actual.scale in (2.17, 1.28, 1.0, 0.63, 0.54, 0.48):
                self.assertLessEqual(row.errors.scale_pct, 7.0, row.sample)
        self.assertTrue(all(row.reason for row in rows if row.skipped))

    def test_table_four_combined(self):
        rows = run_table_suite("4", self.glyphs[:1])
        self.assertEqual(len(rows), 5)
        for row in rows:
            self.assertFalse(row.skipped, row.reason)
            self.assertLessEqual(row.errors.rotation_deg, 3.0, row.sample)
            self.assertLessEqual(row.errors.scale_pct, 15.0, row.sample)
            self.assertTrue(row.errors.translation_exact, row.sample)
            self.assertNotIn("translation", row.reason, row.sample)

    def test_rows_are_deterministic_and_ordered(self):
        serial = [row.to_csv_row() for row in run_table_suite("3", self.glyphs)]
        threaded = [row.to_csv_row() for row in run_table_suite("3", self.glyphs, workers=3)]
        self.assertEqual(serial, threaded)
        self.assertEqual(serial[0][0], "glyph01-t3-s01")
        self.assertEqual(serial[-1][0], "glyph02-t3-s10")

    def test_scale_error_grows_outside_the_envelope(self):
        for seed in (1, 2, 3):
            rows = run_table_suite("envelope", default_glyph_specs(1, seed=seed))
            summary = envelope_summary(rows)
            self.assertEqual(summary.inside_count, 10, f"seed {seed}")
            self.assertGreater(summary.outside_count, 0, f"seed {seed}")
            self.assertGreater(summary.outside_median_pct, summary.inside_median_pct, f"seed {seed}: {summary}")
            for row in rows:
                if row.actual.scale <= 1.33:
                    self.assertEqual(row.reason, "", row.sample)

    def test_empty_glyph_list(self):
        with self.assertRaises(InvalidConfigError):
            run_table_suite("1", [])


class OracleTests(SimpleTestCase):
    def test_coarse_step_oracle_equals_the_coarse_stage(self):
        user = rotate(glyph(), 23.0)
        cfg = RotationSearchConfig()
        estimate = detect_rotation(glyph(), user, cfg)
        self.assertEqual(exhaustive_rotation_oracle(glyph(), user, cfg.coarse_step, cfg), estimate.coarse.best_angle())

    def test_blank_user(self):
        with self.assertRaises(NoSignalError):
            exhaustive_rotation_oracle(glyph(), GrayImage.filled(40, 40, 1.0))

    def test_invalid_step(self):
        with self.assertRaises(InvalidConfigError):
            exhaustive_rotation_oracle(glyph(), glyph(), 0.0)

    def test_two_stage_matches_exhaustive_sweep(self):
        rng = np.random.default_rng(99)
        cfg = RotationSearchConfig()
        for case in range(50):
            reference = glyph(int(rng.integers(1, 4)), (160, 96))
            angle = float(rng.integers(-60, 61))
            comparison = compare_with_oracle(reference, rotate(reference, angle), cfg)
            if not comparison.agrees:
                self.assertTrue(
                    comparison.coarse_miss(cfg.fine_halfwidth),
                    f"case {case}: {comparison.two_stage} vs {comparison.exhaustive}, "
                    f"coarse trace {comparison.coarse_trace.as_list()}",
                )


class BenchCommandTests(SimpleTestCase):
    def _bench(self, *args):
        out, err = StringIO(), StringIO()
        call_command("bench", *args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def test_table_three_csv(self):
        output, _ = self._bench("--table", "3", "--glyphs", "1", "--seed", "5")
        rows = list(csv.DictReader(StringIO(output)))
        self.assertEqual(len(rows), 10)
        self.assertTrue(all(row["trans_exact"] == "true" for row in rows))
        self.assertEqual(output.splitlines()[0], ",".join([
            "sample", "actual_rotation", "actual_scale", "actual_tx", "actual_ty",
            "detected_rotation", "detected_scale", "detected_tx", "detected_ty",
            "rot_err", "scale_err_pct", "trans_exact", "skipped", "reason",
        ]))

    def test_all_tables_are_byte_identical_across_runs(self):
        first, _ = self._bench("--table", "all", "--glyphs", "1", "--seed", "1")
        second, _ = self._bench("--table", "all", "--glyphs", "1", "--seed", "1")
        self.assertEqual(first, second)
        self.assertEqual(len(first.splitlines()), 1 + 35)

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "table3.csv"
            output, _ = self._bench("--table", "3", "--glyphs", "1", "--out", str(path))
            self.assertEqual(output, "")
            self.assertEqual(len(path.read_text().splitlines()), 11)

    def test_invalid_selector(self):
        with self.assertRaises(CommandError):
            self._bench("--table", "7")

    def test_invalid_glyph_count(self):
        with self.assertRaises(CommandError) as ctx:
            self._bench("--table", "3", "--glyphs", "0")
        self.assertEqual(ctx.exception.returncode, 2)


class RecordedBenchTests(TestCase):
    def test_record_stores_every_row(self):
        out = StringIO()
        call_command("bench", "--table", "3", "--glyphs", "2", "--seed", "3", "--record",
                     stdout=out, stderr=StringIO())
        run = BenchmarkRun.objects.get()
        self.assertEqual((run.table, run.seed, run.glyph_count), ("3", 3, 2))
        self.assertEqual(run.rows_requested, 20)
        self.assertEqual(run.rows_skipped, 0)
        self.assertEqual(run.config["threshold"], 0.5)
        records = ExperimentRecord.objects.filter(run=run)
        self.assertEqual(records.count(), 20)
        self.assertTrue(all(record.trans_exact for record in records))
        self.assertEqual(records.first().sample, "glyph01-t3-s01")


class SynthCommandTests(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _synth(self, *args):
        call_command("synth", *args, stdout=StringIO(), stderr=StringIO())

    def test_sidecar_records_the_parameters(self):
        out = self.tmp / "rot37.pgm"
        self._synth("--seed", "7", "--rotation", "37", "--tx", "0", "--ty", "0", "--out", str(out))
        sidecar = json.loads(out.with_suffix(".json").read_text())
        self.assertEqual(sidecar, {"rotation_deg": 37.0, "scale": 1.0, "tx": 0, "ty": 0})
        self.assertEqual(detect_translation(binarize(read_gray(out))), Translation2D(0, 0))

    def test_identity_params_place_the_unperturbed_glyph(self):
        out = self.tmp / "plain.pgm"
        self._synth("--seed", "7", "--canvas", "300", "260", "--out", str(out))
        content = crop_ink(generate_glyph(GlyphSpec(identifier="x", seed=7)))
        expected = place_content(content, centered_translation(content.size, (300, 260)), (300, 260))
        self.assertEqual(read_gray(out), expected)

    def test_round_trip_through_detect(self):
        out, reference = self.tmp / "user.pgm", self.tmp / "reference.pgm"
        self._synth("--seed", "3", "--rotation", "-48", "--out", str(out), "--reference-out", str(reference))
        stdout = StringIO()
        call_command("detect", str(reference), str(out), "--truth", str(out.with_suffix(".json")),
                     stdout=stdout, stderr=StringIO())
        report = json.loads(stdout.getvalue())
        self.assertLessEqual(report["errors"]["rotation_deg"], 1.0)
        self.assertLessEqual(report["errors"]["scale_pct"], 7.0)
        self.assertTrue(report["errors"]["translation_exact"])

    def test_overflow(self):
        with self.assertRaises(CommandError) as ctx:
            self._synth("--scale", "0.2", "--out", str(self.tmp / "big.pgm"))
        self.assertEqual(ctx.exception.returncode, 8)

    def test_invalid_scale(self):
        with self.assertRaises(CommandError) as ctx:
            self._synth("--scale", "0", "--out", str(self.tmp / "zero.pgm"))
        self.assertEqual(ctx.exception.returncode, 2)
