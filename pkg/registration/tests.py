from functools import lru_cache
from io import StringIO
from pathlib import Path
from unittest import mock
import csv
import json
import tempfile

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from experiments.services.forward_service import centered_translation, place_content, transform_content
from experiments.services.glyph_service import GlyphSpec, generate_glyph
from imaging.exceptions import (
    BlankImageError,
    DegenerateRangeError,
    DegenerateSizeError,
    DimensionMismatchError,
    InvalidConfigError,
    NoSignalError,
)
from imaging.services.preprocess import InkMask, binarize, crop_ink
from imaging.services.raster import GrayImage, read_gray, write_image
from registration.choices import CorrectionMode
from registration.serializers import GroundTruthSerializer, RegistrationReportSerializer, RunConfigSerializer
from registration.services.correlation_service import cross_correlation
from registration.services.pipeline_service import (
    RstParams,
    correct_pure,
    correct_rst,
    envelope_flags,
    percent_error,
)
from registration.services.report_service import CSV_HEADER, csv_row, format_value
from registration.services.rotation_service import (
    CorrelationTrace,
    RotationSearchConfig,
    angle_grid,
    correlation_at,
    detect_rotation,
)
from registration.services.scaling_service import detect_scaling, scaling_ratios
from registration.services.transform_service import embed_common, resize, rotate, rotated_canvas_size
from registration.services.translation_service import Translation2D, detect_translation


@lru_cache(maxsize=None)
def glyph(seed: int = 3) -> GrayImage:
    return generate_glyph(GlyphSpec(identifier=f"g{seed}", seed=seed))


def synthetic_user(reference: GrayImage, rotation: float, scale: float, canvas=(400, 400)):
    """Forward-transformed, centred user image plus its ground truth."""
    content = transform_content(reference, scale, rotation)
    translation = centered_translation(content.size, canvas)
    return place_content(content, translation, canvas), RstParams(rotation, scale, translation)


class EmbedCommonTests(SimpleTestCase):
    def test_equal_sizes_are_returned_unchanged(self):
        a, b = GrayImage.filled(3, 2, 0.2), GrayImage.filled(3, 2, 0.7)
        self.assertEqual(embed_common(a, b), (a, b))

    def test_small_image_is_centred(self):
        a = GrayImage.filled(2, 2, 0.0)
        out_a, out_b = embed_common(a, GrayImage.filled(4, 4, 0.5), fill=1.0)
        self.assertEqual(out_a.size, (4, 4))
        self.assertEqual(out_a.pixels[1:3, 1:3].tolist(), [[0.0, 0.0], [0.0, 0.0]])
        self.assertEqual(float(out_a.pixels.sum()), 12.0)
        self.assertEqual(out_b, GrayImage.filled(4, 4, 0.5))

    def test_outputs_share_the_larger_extent(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            w1, h1, w2, h2 = (int(v) for v in rng.integers(1, 12, size=4))
            a, b = embed_common(GrayImage.filled(w1, h1, 0.0), GrayImage.filled(w2, h2, 0.0))
            self.assertEqual(a.size, (max(w1, w2), max(h1, h2)))
            self.assertEqual(b.size, a.size)


class RotateTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2)

    def test_zero_angle_is_an_exact_copy(self):
        image = GrayImage(self.rng.random((5, 7)))
        self.assertEqual(rotate(image, 0.0), image)

    def test_quarter_turn_is_counterclockwise(self):
        image = GrayImage.from_flat(3, 2, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
        turned = rotate(image, 90.0)
        self.assertEqual(turned.size, (2, 3))
        self.assertTrue(np.allclose(turned.pixels, [[0.3, 0.6], [0.2, 0.5], [0.1, 0.4]], atol=1e-12))

    def test_quarter_turn_and_back(self):
        image = GrayImage(self.rng.random((3, 5)))
        restored = rotate(rotate(image, 90.0), -90.0)
        self.assertEqual(restored.size, image.size)
        self.assertLessEqual(float(np.abs(restored.pixels - image.pixels).max()), 1e-9)

    def test_half_turn_flips_both_axes(self):
        image = GrayImage(self.rng.random((4, 6)))
        self.assertTrue(np.allclose(rotate(image, 180.0).pixels, image.pixels[::-1, ::-1], atol=1e-9))

    def test_canvas_follows_the_extent_formula(self):
        for angle in (-59.0, -20.9, 13.0, 37.0, 45.0, 89.0):
            width, height = rotate(GrayImage.filled(31, 17, 0.0), angle).size
            theta = np.radians(angle)
            bound_w = 31 * abs(np.cos(theta)) + 17 * abs(np.sin(theta))
            bound_h = 31 * abs(np.sin(theta)) + 17 * abs(np.cos(theta))
            self.assertLessEqual(abs(width - bound_w), 1.0)
            self.assertLessEqual(abs(height - bound_h), 1.0)
        self.assertEqual(rotated_canvas_size(10, 4, 90.0), (4, 10))

    def test_constant_image_stays_constant(self):
        for angle in (7.0, -33.0, 60.0):
            rotated = rotate(GrayImage.filled(9, 5, 0.3), angle, fill=0.3)
            self.assertTrue(np.allclose(rotated.pixels, 0.3, atol=1e-12))

    def test_exposed_corners_take_the_fill(self):
        rotated = rotate(GrayImage.filled(20, 20, 0.0), 45.0, fill=1.0)
        self.assertEqual(rotated.pixels[0, 0], 1.0)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidConfigError):
            rotate(GrayImage.filled(2, 2, 0.0), 10.0, fill=1.5)
        with self.assertRaises(InvalidConfigError):
            rotate(GrayImage.filled(2, 2, 0.0), float("nan"))


class ResizeTests(SimpleTestCase):
    def test_unit_ratio_is_an_exact_copy(self):
        image = GrayImage(np.random.default_rng(3).random((4, 4)))
        self.assertEqual(resize(image, 1.0), image)

    def test_dimensions_round_half_up(self):
        self.assertEqual(resize(GrayImage.filled(100, 40, 0.0), 0.5).size, (50, 20))
        self.assertEqual(resize(GrayImage.filled(3, 3, 0.0), 0.5).size, (2, 2))
        self.assertEqual(resize(GrayImage.filled(3, 2, 0.0), 2.0).size, (6, 4))

    def test_constant_image_stays_constant(self):
        for ratio in (0.37, 1.5, 3.0):
            self.assertTrue(np.allclose(resize(GrayImage.filled(11, 7, 0.6), ratio).pixels, 0.6, atol=1e-12))

    def test_invalid_ratio(self):
        for ratio in (0.0, -1.0, float("inf")):
            with self.assertRaises(InvalidConfigError):
                resize(GrayImage.filled(4, 4, 0.0), ratio)

    def test_zero_dimension(self):
        with self.assertRaises(DegenerateSizeError):
            resize(GrayImage.filled(10, 10, 0.0), 0.01)


class CrossCorrelationTests(SimpleTestCase):
    def test_hand_evaluated_values(self):
        x = GrayImage(np.array([[0.0, 1.0], [0.0, 1.0]]))
        self.assertAlmostEqual(cross_correlation(x, x), 1.0)
        self.assertAlmostEqual(cross_correlation(x, GrayImage(np.array([[0.0, 0.0], [1.0, 1.0]]))), 0.0)

    def test_constant_image_gives_zero(self):
        x = GrayImage(np.random.default_rng(4).random((3, 3)))
        self.assertEqual(cross_correlation(x, GrayImage.filled(3, 3, 0.4)), 0.0)

    def test_size_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            cross_correlation(GrayImage.filled(2, 2, 0.0), GrayImage.filled(3, 2, 0.0))

    def test_symmetry_and_mean_shift_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            x = rng.random((6, 5)) * 0.6
            y = rng.random((6, 5)) * 0.6
            shift = rng.uniform(0.0, 0.4)
            r = cross_correlation(GrayImage(x), GrayImage(y))
            self.assertAlmostEqual(cross_correlation(GrayImage(y), GrayImage(x)), r, places=9)
            self.assertAlmostEqual(cross_correlation(GrayImage(x + shift), GrayImage(y)), r, places=9)
            self.assertAlmostEqual(cross_correlation(GrayImage(x), GrayImage(y + shift)), r, places=9)

    def test_autocorrelation_dominates_permutations(self):
        rng = np.random.default_rng(6)
        x = rng.random((8, 8))
        auto = cross_correlation(GrayImage(x), GrayImage(x))
        for _ in range(200):
            permuted = rng.permutation(x.ravel()).reshape(x.shape)
            self.assertGreaterEqual(auto + 1e-12, cross_correlation(GrayImage(x), GrayImage(permuted)))


class RotationSearchConfigTests(SimpleTestCase):
    def test_default_grids(self):
        cfg = RotationSearchConfig()
        coarse = cfg.coarse_angles()
        self.assertEqual(len(coarse), 25)
        self.assertEqual((coarse[0], coarse[-1]), (-60.0, 60.0))
        self.assertEqual(cfg.fine_angles(20.0), [17.0, 18.0, 19.0, 20.0, 21.0, 22.0, 23.0])

    def test_fine_window_is_clamped_to_the_range(self):
        cfg = RotationSearchConfig()
        self.assertEqual(cfg.fine_angles(60.0), [57.0, 58.0, 59.0, 60.0])
        self.assertEqual(cfg.fine_angles(-60.0), [-60.0, -59.0, -58.0, -57.0])

    def test_angle_grid_includes_the_end(self):
        self.assertEqual(angle_grid(-1.0, 1.0, 0.5), [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_invariants(self):
        for kwargs in (
            {"range_min": 10.0, "range_max": 10.0},
            {"coarse_step": 0.0},
            {"fine_step": 6.0},
            {"fine_halfwidth": 0.5},
            {"fill": 2.0},
            {"range_max": float("inf")},
        ):
            with self.assertRaises(InvalidConfigError, msg=str(kwargs)):
                RotationSearchConfig(**kwargs)


class CorrelationTraceTests(SimpleTestCase):
    def test_ties_prefer_small_then_negative_angles(self):
        trace = CorrelationTrace.from_raw([-2.0, -1.0, 0.0, 1.0, 2.0], [5.0, 5.0, 1.0, 5.0, 5.0])
        self.assertEqual(trace.best_angle(), -1.0)
        trace = CorrelationTrace.from_raw([-3.0, 0.0, 3.0], [2.0, 2.0, 2.0 - 1e-9])
        self.assertEqual(trace.best_angle(), 0.0)

    def test_normalized_column(self):
        trace = CorrelationTrace.from_raw([0.0, 1.0, 2.0], [2.0, 6.0, 4.0])
        self.assertEqual([e.normalized_r for e in trace.entries], [0.0, 1.0, 0.5])
        self.assertEqual(trace.best_angle(use_normalized=True), trace.best_angle())

    def test_flat_trace_is_degenerate(self):
        trace = CorrelationTrace.from_raw([-5.0, 0.0, 5.0], [0.0, 0.0, 0.0])
        self.assertTrue(trace.is_degenerate)
        self.assertEqual(trace.best_angle(), 0.0)
        with self.assertRaises(DegenerateRangeError):
            trace.best_angle(use_normalized=True)

    def test_angles_must_increase(self):
        with self.assertRaises(InvalidConfigError):
            CorrelationTrace.from_raw([0.0, 0.0], [1.0, 2.0])


class DetectRotationTests(SimpleTestCase):
    def test_unrotated_user(self):
        estimate = detect_rotation(glyph(), glyph())
        self.assertEqual(estimate.angle, 0.0)
        self.assertEqual(estimate.coarse.angles, RotationSearchConfig().coarse_angles())

    def test_negative_twenty_degrees(self):
        estimate = detect_rotation(glyph(), rotate(glyph(), -20.0))
        self.assertLessEqual(abs(estimate.angle + 20.0), 1.0)
        self.assertEqual(estimate.coarse.best_angle(), -20.0)

    def test_range_endpoint(self):
        estimate = detect_rotation(glyph(), rotate(glyph(), 59.0))
        self.assertLessEqual(abs(estimate.angle - 59.0), 1.0)
        self.assertLessEqual(max(estimate.fine.angles), 60.0)

    def test_argmax_is_unchanged_by_normalization(self):
        estimate = detect_rotation(glyph(5), rotate(glyph(5), 13.0))
        for trace in (estimate.coarse, estimate.fine):
            self.assertEqual(trace.best_angle(use_normalized=True), trace.best_angle())

    def test_worker_count_does_not_change_the_trace(self):
        user = rotate(glyph(), 27.0)
        serial = detect_rotation(glyph(), user, workers=1)
        threaded = detect_rotation(glyph(), user, workers=3)
        self.assertEqual(serial, threaded)

    def test_plain_centre_embedding(self):
        cfg = RotationSearchConfig(height_match=False)
        self.assertEqual(detect_rotation(glyph(), glyph(), cfg).angle, 0.0)

    def test_correlation_peaks_at_the_true_hypothesis(self):
        reference, user = crop_ink(glyph()), crop_ink(rotate(glyph(), 30.0))
        self.assertGreater(correlation_at(reference, user, 30.0), correlation_at(reference, user, -30.0))

    def test_blank_user(self):
        with self.assertRaises(BlankImageError):
            detect_rotation(glyph(), GrayImage.filled(50, 50, 1.0))

    def test_flat_correlation_is_no_signal(self):
        # a constant reference larger than every candidate correlates to zero everywhere
        reference = GrayImage.filled(300, 300, 0.0)
        user = crop_ink(glyph())
        with self.assertRaises(NoSignalError):
            detect_rotation(reference, user, RotationSearchConfig(height_match=False))


class DetectTranslationTests(SimpleTestCase):
    def _mask(self, width, height, left, bottom_gap, block=(4, 3)):
        bits = np.zeros((height, width), dtype=bool)
        bottom = height - 1 - bottom_gap
        bits[bottom - block[1] + 1:bottom + 1, left:left + block[0]] = True
        return InkMask(bits)

    def test_bottom_left_margins(self):
        self.assertEqual(detect_translation(self._mask(100, 120, 25, 50)), Translation2D(25, 50))
        self.assertEqual(detect_translation(self._mask(60, 40, 35, 9)).as_tuple(), (35, 9))

    def test_ink_touching_left_and_bottom(self):
        self.assertEqual(detect_translation(self._mask(10, 10, 0, 0)), Translation2D(0, 0))

    def test_blank_mask(self):
        with self.assertRaises(BlankImageError):
            detect_translation(InkMask(np.zeros((4, 4), dtype=bool)))

    def test_negative_or_fractional_margins(self):
        with self.assertRaises(InvalidConfigError):
            Translation2D(-1, 0)
        with self.assertRaises(InvalidConfigError):
            Translation2D(1.5, 0)

    def test_random_placements_are_recovered_exactly(self):
        rng = np.random.default_rng(7)
        content = crop_ink(glyph())
        for _ in range(30):
            tx = int(rng.integers(0, 256 - content.width + 1))
            ty = int(rng.integers(0, 256 - content.height + 1))
            placed = place_content(content, Translation2D(tx, ty), (256, 256))
            self.assertEqual(detect_translation(binarize(placed)), Translation2D(tx, ty))


class DetectScalingTests(SimpleTestCase):
    def test_height_ratio(self):
        self.assertEqual(detect_scaling(GrayImage.filled(30, 140, 0.0), GrayImage.filled(30, 100, 0.0)), 1.4)

    def test_identical_crops(self):
        content = crop_ink(glyph())
        self.assertEqual(detect_scaling(content, content), 1.0)

    def test_half_size_user(self):
        content = crop_ink(glyph())
        ratio = detect_scaling(content, crop_ink(resize(content, 0.5)))
        self.assertGreaterEqual(ratio, 1.9)
        self.assertLessEqual(ratio, 2.1)

    def test_width_ratio_is_reported_separately(self):
        ratios = scaling_ratios(GrayImage.filled(60, 20, 0.0), GrayImage.filled(30, 10, 0.0))
        self.assertEqual((ratios.x, ratios.y), (2.0, 2.0))


class PipelineTests(SimpleTestCase):
    def test_identity(self):
        reference = crop_ink(glyph())
        corrected, report = correct_rst(reference, reference)
        self.assertEqual(report.detected, RstParams(0.0, 1.0, Translation2D(0, 0)))
        self.assertEqual(corrected, reference)
        self.assertEqual(report.mode, CorrectionMode.FULL)
        self.assertIn("total", report.durations_ms)

    def test_combined_rotation_and_scale(self):
        user, actual = synthetic_user(glyph(), 50.0, 1.67)
        corrected, report = correct_rst(glyph(), user)
        report = report.with_ground_truth(actual)
        self.assertLessEqual(report.errors.rotation_deg, 3.0)
        self.assertLessEqual(report.errors.scale_pct, 15.0)
        self.assertTrue(report.errors.translation_exact)
        self.assertLessEqual(abs(corrected.height - crop_ink(glyph()).height), 1)

    def test_second_pass_is_near_identity(self):
        user, _ = synthetic_user(glyph(), -30.0, 0.8)
        corrected, _ = correct_rst(glyph(), user)
        _, again = correct_rst(glyph(), corrected)
        self.assertLessEqual(abs(again.detected.rotation), 1.0)
        self.assertLessEqual(percent_error(again.detected.scale, 1.0), 5.0)
        self.assertEqual(again.user_translation, Translation2D(0, 0))

    def test_scaling_before_rotation_gives_the_wrong_ratio(self):
        user, actual = synthetic_user(glyph(), 50.0, 1.67)
        naive = detect_scaling(crop_ink(glyph()), crop_ink(user))
        _, report = correct_rst(glyph(), user)
        self.assertGreater(percent_error(naive, actual.scale), 30.0)
        self.assertLess(percent_error(report.detected.scale, actual.scale), 15.0)

    def test_pure_translation(self):
        user = place_content(crop_ink(glyph()), Translation2D(150, 150), (512, 512))
        report = correct_pure(glyph(), user, CorrectionMode.TRANSLATION)
        self.assertEqual(report.detected.translation, Translation2D(150, 150))
        self.assertEqual(report.measured, ("translation",))
        self.assertIsNone(report.coarse_trace)

    def test_pure_scaling(self):
        content = crop_ink(glyph())
        report = correct_pure(glyph(), crop_ink(resize(content, 0.25)), CorrectionMode.SCALING)
        self.assertLessEqual(percent_error(report.detected.scale, 4.0), 7.0)
        self.assertIsNotNone(report.x_scale)

    def test_pure_rotation(self):
        report = correct_pure(glyph(), glyph(), "rotation")
        self.assertEqual(report.detected.rotation, 0.0)
        self.assertEqual(report.detected.scale, 1.0)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            correct_pure(glyph(), glyph(), "shear")

    def test_percent_error_convention(self):
        self.assertAlmostEqual(percent_error(60.0, 59.0), 100.0 / 59.0)
        self.assertEqual(percent_error(1.0, 0.0), 1.0)

    def test_errors_only_cover_measured_parameters(self):
        report = correct_pure(glyph(), glyph(), CorrectionMode.ROTATION)
        report = report.with_ground_truth(RstParams(0.0, 1.0, Translation2D(0, 0)))
        self.assertEqual(report.errors.rotation_deg, 0.0)
        self.assertIsNone(report.errors.scale_pct)
        self.assertIsNone(report.errors.translation_exact)

    def test_envelope_flags(self):
        self.assertEqual(envelope_flags(RstParams(30.0, 1.0, Translation2D(10, 10))), [])
        flags = envelope_flags(RstParams(59.0, 7.69, Translation2D(250, 0)))
        self.assertEqual(len(flags), 3)

    def test_envelope_flags_for_selected_parameters(self):
        params = RstParams(0.0, 1.0, Translation2D(163, 207))
        self.assertEqual(envelope_flags(params, ("rotation", "scale")), [])
        self.assertEqual(len(envelope_flags(params)), 1)

    def test_scaling_stage_uses_detect_scaling(self):
        user, _ = synthetic_user(glyph(), 0.0, 1.25)
        target = "registration.services.pipeline_service.detect_scaling"
        with mock.patch(target, wraps=detect_scaling) as spy:
            correct_rst(glyph(), user)
            correct_pure(glyph(), user, CorrectionMode.SCALING)
        self.assertEqual(spy.call_count, 2)


class ReportFormattingTests(SimpleTestCase):
    def test_format_value(self):
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(True), "true")
        self.assertEqual(format_value(-0.00001), "0.0000")
        self.assertEqual(format_value(1.67), "1.6700")
        self.assertEqual(format_value(7), "7")

    def test_unmeasured_columns_stay_blank(self):
        report = correct_pure(glyph(), glyph(), CorrectionMode.ROTATION)
        row = dict(zip(CSV_HEADER, csv_row("s1", RstParams(), report)))
        self.assertEqual(row["detected_rotation"], "0.0000")
        self.assertEqual(row["detected_scale"], "")
        self.assertEqual(row["detected_tx"], "")
        self.assertEqual(row["skipped"], "false")

    def test_report_serializes_to_json(self):
        _, report = correct_rst(crop_ink(glyph()), crop_ink(glyph()))
        data = json.loads(json.dumps(RegistrationReportSerializer(report).data))
        self.assertEqual(data["detected"]["translation"], {"dx": 0, "dy": 0})
        self.assertEqual(len(data["coarse_trace"]["entries"]), 25)
        self.assertTrue(data["config"]["height_match"])


class SerializerTests(SimpleTestCase):
    def test_ground_truth_sidecar(self):
        serializer = GroundTruthSerializer(data={"rotation_deg": 37, "scale": 1, "tx": 0, "ty": 0})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save(), RstParams(37.0, 1.0, Translation2D(0, 0)))

    def test_ground_truth_rejects_bad_values(self):
        self.assertFalse(GroundTruthSerializer(data={"rotation_deg": 0, "scale": 0, "tx": 0, "ty": 0}).is_valid())
        self.assertFalse(GroundTruthSerializer(data={"rotation_deg": 0, "scale": 1, "tx": -3, "ty": 0}).is_valid())

    def _config(self, **overrides):
        data = {"threshold": 0.5, "range_min": -60, "range_max": 60, "coarse_step": 5,
                "fine_step": 1, "fine_halfwidth": 3, "fill": 1.0}
        data.update(overrides)
        return RunConfigSerializer(data=data)

    def test_run_config_builds_the_search(self):
        serializer = self._config()
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["search"], RotationSearchConfig())

    def test_run_config_rejects_bad_values(self):
        serializer = self._config(threshold=1.0)
        self.assertFalse(serializer.is_valid())
        self.assertIn("threshold", serializer.errors)

        serializer = self._config(range_min=10, range_max=-10)
        self.assertFalse(serializer.is_valid())
        self.assertIn("non_field_errors", serializer.errors)


class CommandTests(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.reference = self.tmp / "reference.pgm"
        write_image(self.reference, crop_ink(glyph()))

    def tearDown(self):
        self._tmp.cleanup()

    def _call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue()

    def _returncode(self, *args):
        with self.assertRaises(CommandError) as ctx:
            self._call(*args)
        return ctx.exception.returncode, str(ctx.exception)

    def test_detect_identity(self):
        report = json.loads(self._call("detect", str(self.reference), str(self.reference)))
        self.assertEqual(report["detected"]["rotation"], 0.0)
        self.assertEqual(report["detected"]["scale"], 1.0)
        self.assertEqual(report["detected"]["translation"], {"dx": 0, "dy": 0})

    def test_detect_csv_with_truth(self):
        truth = self.tmp / "truth.json"
        truth.write_text(json.dumps({"rotation_deg": 0, "scale": 1, "tx": 0, "ty": 0}))
        output = self._call("detect", str(self.reference), str(self.reference),
                            "--format", "csv", "--truth", str(truth))
        rows = list(csv.DictReader(StringIO(output)))
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]["trans_exact"], "true")
        self.assertEqual(rows[0]["rot_err"], "0.0000")

    def test_detect_pure_mode(self):
        report = json.loads(self._call("detect", str(self.reference), str(self.reference), "--mode", "scaling"))
        self.assertEqual(report["mode"], "scaling")
        self.assertIsNone(report["coarse_trace"])

    def test_detect_pure_mode_summary_lists_measured_parameters(self):
        err = StringIO()
        call_command("detect", str(self.reference), str(self.reference), "--mode", "rotation",
                     stdout=StringIO(), stderr=err)
        summary = err.getvalue()
        self.assertIn("rotation", summary)
        self.assertNotIn("scale", summary)
        self.assertNotIn("translation", summary)

    def test_unexpected_failure_exits_one(self):
        target = "registration.management.commands.detect.correct_pure"
        with mock.patch(target, side_effect=RuntimeError("boom")):
            with self.assertLogs("registration.command_utils", level="ERROR") as logs:
                code, message = self._returncode("detect", str(self.reference), str(self.reference))
        self.assertEqual(code, 1)
        self.assertIn("boom", message)
        self.assertIsNotNone(logs.records[0].exc_info)

    def test_detect_missing_file(self):
        code, message = self._returncode("detect", str(self.reference), str(self.tmp / "absent.pgm"))
        self.assertEqual(code, 3)
        self.assertIn("absent.pgm", message)

    def test_detect_undecodable_file(self):
        broken = self.tmp / "broken.pgm"
        broken.write_bytes(b"P5\n4 4\n255\n\x00")
        self.assertEqual(self._returncode("detect", str(self.reference), str(broken))[0], 4)

    def test_detect_blank_user(self):
        blank = self.tmp / "blank.pgm"
        write_image(blank, GrayImage.filled(40, 40, 1.0))
        self.assertEqual(self._returncode("detect", str(self.reference), str(blank))[0], 5)

    def test_detect_invalid_threshold(self):
        code, _ = self._returncode("detect", str(self.reference), str(self.reference), "--threshold", "1.5")
        self.assertEqual(code, 2)

    def test_correct_writes_the_cropped_image(self):
        out = self.tmp / "corrected.pgm"
        report = json.loads(self._call("correct", str(self.reference), str(self.reference), "--out", str(out)))
        self.assertEqual(read_gray(out), read_gray(self.reference))
        self.assertEqual(report["user_crop_size"], list(read_gray(self.reference).size))

    def test_correct_write_failure(self):
        code, _ = self._returncode("correct", str(self.reference), str(self.reference),
                                   "--out", str(self.tmp / "missing" / "out.pgm"))
        self.assertEqual(code, 9)

    def test_batch_keeps_going_after_a_bad_file(self):
        root = self.tmp / "db"
        subject = root / "subject01"
        subject.mkdir(parents=True)
        write_image(subject / "reference.pgm", glyph())
        user, actual = synthetic_user(glyph(), 0.0, 1.0, canvas=(300, 300))
        write_image(subject / "test01.pgm", user)
        (subject / "test01.json").write_text(json.dumps(GroundTruthSerializer.from_params(actual)))
        (subject / "test02.pgm").write_bytes(b"not an image")

        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("batch", str(root), "--format", "csv", "--out-dir", str(self.tmp / "out"),
                         stdout=out, stderr=StringIO())
        self.assertEqual(ctx.exception.returncode, 10)

        rows = {row["sample"]: row for row in csv.DictReader(StringIO(out.getvalue()))}
        self.assertEqual(rows["subject01/test01.pgm"]["skipped"], "false")
        self.assertEqual(rows["subject01/test01.pgm"]["trans_exact"], "true")
        self.assertEqual(rows["subject01/test02.pgm"]["skipped"], "true")
        self.assertTrue((self.tmp / "out" / "subject01" / "test01.pgm").is_file())

    def test_batch_missing_root(self):
        self.assertEqual(self._returncode("batch", str(self.tmp / "nowhere"))[0], 3)
