from pathlib import Path
import tempfile

import numpy as np
from django.test import SimpleTestCase

from imaging.exceptions import (
    BlankImageError,
    DegenerateRangeError,
    DimensionMismatchError,
    ImageReadError,
    ImageWriteError,
    InvalidConfigError,
    MalformedHeaderError,
    NoSignalError,
    PnmDecodeError,
    TruncatedDataError,
    UnsupportedFormatError,
    ZeroDimensionError,
)
from imaging.services.preprocess import (
    BoundingBox,
    InkMask,
    binarize,
    bounding_box,
    crop_ink,
    crop_to_content,
    minmax_normalize,
)
from imaging.services.raster import (
    GrayImage,
    PixelCoord,
    RgbImage,
    as_gray,
    load_pnm,
    read_gray,
    read_image,
    save_pnm,
    to_grayscale,
    write_image,
)


class GrayImageTests(SimpleTestCase):
    def test_rejects_out_of_range_pixels(self):
        with self.assertRaises(InvalidConfigError):
            GrayImage(np.array([[0.5, 1.5]]))
        with self.assertRaises(InvalidConfigError):
            GrayImage(np.array([[np.nan]]))

    def test_rejects_empty_raster(self):
        with self.assertRaises(InvalidConfigError):
            GrayImage(np.zeros((0, 3)))

    def test_pixels_are_read_only(self):
        image = GrayImage.filled(3, 2, 0.5)
        with self.assertRaises(ValueError):
            image.pixels[0, 0] = 0.0

    def test_from_flat_is_row_major(self):
        image = GrayImage.from_flat(3, 2, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
        self.assertEqual(image.size, (3, 2))
        self.assertEqual(image.pixel(PixelCoord(col=2, row=0)), 0.2)
        self.assertEqual(image.pixel(PixelCoord(col=0, row=1)), 0.3)

    def test_from_flat_length_mismatch(self):
        with self.assertRaises(InvalidConfigError):
            GrayImage.from_flat(2, 2, [0.0, 1.0, 0.0])

    def test_pixel_coord_bounds_and_bottom_left_rows(self):
        coord = PixelCoord(col=1, row=0)
        self.assertEqual(coord.rows_from_bottom(5), 4)
        with self.assertRaises(InvalidConfigError):
            GrayImage.filled(1, 1, 0.0).pixel(coord)


class PnmDecodeTests(SimpleTestCase):
    def test_binary_pgm(self):
        image = load_pnm(b"P5\n2 2\n255\n" + bytes([0, 255, 0, 255]))
        self.assertIsInstance(image, GrayImage)
        self.assertEqual(image.flat(), [0.0, 1.0, 0.0, 1.0])

    def test_ascii_pgm(self):
        image = load_pnm(b"P2\n1 1\n255\n128\n")
        self.assertEqual(image.size, (1, 1))
        self.assertAlmostEqual(image.flat()[0], 128 / 255)

    def test_header_comments_are_skipped(self):
        image = load_pnm(b"P2\n# scanner output\n2 1 # width height\n255\n0 255\n")
        self.assertEqual(image.flat(), [0.0, 1.0])

    def test_sixteen_bit_binary_samples_are_big_endian(self):
        image = load_pnm(b"P5\n2 1\n65535\n" + b"\xff\xff\x00\x01")
        self.assertEqual(image.flat()[0], 1.0)
        self.assertAlmostEqual(image.flat()[1], 1 / 65535)

    def test_binary_ppm_decodes_to_rgb(self):
        image = load_pnm(b"P6\n1 1\n255\n" + bytes([255, 0, 0]))
        self.assertIsInstance(image, RgbImage)
        self.assertAlmostEqual(to_grayscale(image).flat()[0], 0.299)

    def test_ascii_ppm(self):
        image = load_pnm(b"P3\n2 1\n1\n1 1 1  0 0 0\n")
        self.assertEqual(as_gray(image).flat(), [1.0, 0.0])

    def test_zero_dimensions(self):
        with self.assertRaises(ZeroDimensionError):
            load_pnm(b"P5 0 0 255\n")

    def test_unsupported_magic(self):
        with self.assertRaises(UnsupportedFormatError):
            load_pnm(b"P7\n1 1\n255\n\x00")

    def test_bitmap_formats_are_rejected(self):
        for data in (b"P1\n2 1\n0 1\n", b"P4\n8 1\n\x0f"):
            with self.assertRaises(UnsupportedFormatError) as ctx:
                load_pnm(data)
            self.assertEqual(ctx.exception.exit_code, 4)

    def test_malformed_header(self):
        with self.assertRaises(MalformedHeaderError):
            load_pnm(b"P5\n2 x\n255\n\x00\x00")
        with self.assertRaises(MalformedHeaderError):
            load_pnm(b"P5\n2 2")
        with self.assertRaises(MalformedHeaderError):
            load_pnm(b"P5\n1 1\n0\n\x00")

    def test_truncated_raster(self):
        with self.assertRaises(TruncatedDataError):
            load_pnm(b"P5\n2 2\n255\n" + bytes([0]))
        with self.assertRaises(TruncatedDataError):
            load_pnm(b"P2\n2 2\n255\n0 1 2\n")

    def test_sample_above_maxval(self):
        with self.assertRaises(PnmDecodeError):
            load_pnm(b"P2\n1 1\n10\n11\n")

    def test_decode_errors_share_one_exit_code(self):
        for error in (MalformedHeaderError, UnsupportedFormatError, ZeroDimensionError, TruncatedDataError):
            self.assertEqual(error.exit_code, 4)


class PnmEncodeTests(SimpleTestCase):
    def test_full_scale_pixel(self):
        self.assertEqual(save_pnm(GrayImage.filled(1, 1, 1.0), 255), b"P5\n1 1\n255\n\xff")

    def test_zero_pixel(self):
        self.assertEqual(save_pnm(GrayImage.filled(1, 1, 0.0), 255)[-1:], b"\x00")

    def test_round_trip_error_is_within_half_a_step(self):
        rng = np.random.default_rng(7)
        image = GrayImage(rng.random((64, 64)))
        decoded = load_pnm(save_pnm(image, 255))
        self.assertEqual(decoded.size, image.size)
        self.assertLessEqual(float(np.abs(decoded.pixels - image.pixels).max()), 1 / 510 + 1e-12)

    def test_sixteen_bit_round_trip(self):
        rng = np.random.default_rng(8)
        image = GrayImage(rng.random((9, 13)))
        decoded = load_pnm(save_pnm(image, 65535))
        self.assertLessEqual(float(np.abs(decoded.pixels - image.pixels).max()), 1 / (2 * 65535) + 1e-12)

    def test_invalid_maxval(self):
        with self.assertRaises(InvalidConfigError):
            save_pnm(GrayImage.filled(1, 1, 0.0), 0)


class GrayscaleTests(SimpleTestCase):
    def test_white_and_black(self):
        self.assertEqual(to_grayscale(RgbImage(np.ones((2, 3, 3)))).flat(), [1.0] * 6)
        self.assertEqual(to_grayscale(RgbImage(np.zeros((2, 3, 3)))).flat(), [0.0] * 6)

    def test_equal_channels_pass_through_exactly(self):
        rng = np.random.default_rng(3)
        channel = rng.random((5, 4))
        gray = to_grayscale(RgbImage(np.stack([channel] * 3, axis=2)))
        self.assertTrue(np.array_equal(gray.pixels, channel))

    def test_random_colours_stay_in_range(self):
        rng = np.random.default_rng(4)
        gray = to_grayscale(RgbImage(rng.random((16, 16, 3))))
        self.assertEqual(gray.size, (16, 16))
        self.assertGreaterEqual(float(gray.pixels.min()), 0.0)
        self.assertLessEqual(float(gray.pixels.max()), 1.0)


class ImageFileTests(SimpleTestCase):
    def test_missing_file_names_the_path(self):
        with self.assertRaises(ImageReadError) as ctx:
            read_image("/nonexistent/signature.pgm")
        self.assertIn("/nonexistent/signature.pgm", str(ctx.exception))

    def test_decode_error_names_the_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.pgm"
            path.write_bytes(b"P9\n")
            with self.assertRaises(UnsupportedFormatError) as ctx:
                read_gray(path)
            self.assertIn("broken.pgm", str(ctx.exception))

    def test_write_then_read(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out.pgm"
            image = GrayImage.from_flat(2, 1, [0.0, 1.0])
            write_image(path, image)
            self.assertEqual(read_gray(path), image)

    def test_write_failure(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ImageWriteError):
                write_image(Path(tmp) / "missing" / "out.pgm", GrayImage.filled(1, 1, 0.0))


class BinarizeTests(SimpleTestCase):
    def test_white_image_has_no_ink(self):
        self.assertTrue(binarize(GrayImage.filled(4, 4, 1.0), 0.5).is_empty)

    def test_black_image_is_all_ink(self):
        mask = binarize(GrayImage.filled(4, 3, 0.0), 0.5)
        self.assertEqual(mask.ink_count, 12)

    def test_comparison_is_strict(self):
        mask = binarize(GrayImage.from_flat(3, 1, [0.2, 0.8, 0.5]), 0.5)
        self.assertEqual(mask.bits.tolist(), [[True, False, False]])

    def test_threshold_must_be_open_interval(self):
        for threshold in (0.0, 1.0, -0.1):
            with self.assertRaises(InvalidConfigError):
                binarize(GrayImage.filled(1, 1, 0.0), threshold)


class MinMaxNormalizeTests(SimpleTestCase):
    def test_maps_onto_unit_interval(self):
        self.assertEqual(minmax_normalize([2, 4, 6]), [0.0, 0.5, 1.0])

    def test_constant_sequence_is_degenerate(self):
        with self.assertRaises(DegenerateRangeError):
            minmax_normalize([5])
        self.assertTrue(issubclass(DegenerateRangeError, NoSignalError))

    def test_empty_sequence(self):
        with self.assertRaises(InvalidConfigError):
            minmax_normalize([])

    def test_argmax_and_order_are_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            values = rng.normal(size=25) * rng.uniform(0.1, 1e4)
            normalized = minmax_normalize(values)
            self.assertEqual(int(np.argmax(normalized)), int(np.argmax(values)))
            self.assertEqual(np.argsort(normalized, kind="stable").tolist(),
                             np.argsort(values, kind="stable").tolist())


class BoundingBoxTests(SimpleTestCase):
    def test_single_pixel(self):
        bits = np.zeros((10, 8), dtype=bool)
        bits[7, 3] = True
        self.assertEqual(bounding_box(InkMask(bits)), BoundingBox(3, 7, 3, 7))

    def test_empty_mask(self):
        self.assertIsNone(bounding_box(InkMask(np.zeros((3, 3), dtype=bool))))

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            bits = rng.random((23, 31)) < 0.02
            if not bits.any():
                continue
            rows, cols = np.nonzero(bits)
            box = bounding_box(InkMask(bits))
            self.assertEqual(
                (box.left, box.top, box.right, box.bottom),
                (cols.min(), rows.min(), cols.max(), rows.max()),
            )


class CropTests(SimpleTestCase):
    def _random_ink(self, rng, shape=(20, 30)):
        pixels = np.ones(shape)
        pixels[rng.random(shape) < 0.05] = rng.uniform(0.0, 0.4)
        pixels[0, 0] = 0.1
        return GrayImage(pixels)

    def test_block_crop(self):
        pixels = np.ones((10, 10))
        pixels[4:7, 2:4] = 0.0
        cropped = crop_ink(GrayImage(pixels))
        self.assertEqual(cropped.size, (2, 3))

    def test_full_ink_image_is_unchanged(self):
        image = GrayImage.filled(5, 4, 0.2)
        self.assertEqual(crop_ink(image), image)

    def test_blank_image(self):
        with self.assertRaises(BlankImageError):
            crop_ink(GrayImage.filled(5, 5, 1.0))
        self.assertEqual(BlankImageError.exit_code, 5)

    def test_mask_size_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            crop_to_content(GrayImage.filled(3, 3, 0.0), InkMask(np.ones((2, 3), dtype=bool)))

    def test_crop_is_idempotent(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            once = crop_ink(self._random_ink(rng))
            self.assertEqual(crop_ink(once), once)

    def test_ink_touches_every_border_of_the_crop(self):
        rng = np.random.default_rng(22)
        for _ in range(25):
            bits = binarize(crop_ink(self._random_ink(rng))).bits
            self.assertTrue(bits[0, :].any() and bits[-1, :].any())
            self.assertTrue(bits[:, 0].any() and bits[:, -1].any())

    def test_white_padding_does_not_change_the_crop(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            image = self._random_ink(rng)
            pad = tuple(int(v) for v in rng.integers(0, 6, size=4))
            padded = GrayImage(np.pad(image.pixels, ((pad[0], pad[1]), (pad[2], pad[3])), constant_values=1.0))
            self.assertEqual(crop_ink(padded), crop_ink(image))
