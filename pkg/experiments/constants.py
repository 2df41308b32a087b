# Pure rotation, actual angles in degrees
TABLE_1_ROTATIONS = [-60, -48, -20, -6, 0, 4, 13, 27, 37, 59]

# Pure scaling, reference size over user size
TABLE_2_SCALES = [7.69, 5, 4, 2.17, 1.28, 1, 0.63, 0.54, 0.48, 0.31]

# Pure translation (tx, ty) in the bottom-left frame
TABLE_3_TRANSLATIONS = [
    (0, 5), (5, 5), (10, 0), (15, 10), (0, 25),
    (25, 25), (25, 50), (50, 50), (50, 100), (150, 150),
]

# Combined (rotation, scale)
TABLE_4_PAIRS = [(50, 1.67), (12, 1.33), (31, 1.11), (-40, 0.91), (-30, 0.8)]

# Combined runs either side of the reliable scale band
ENVELOPE_ROTATIONS = [-40, 30]
ENVELOPE_SCALES_INSIDE = [0.8, 0.91, 1.0, 1.11, 1.25]
# Strong reductions, well outside the band
ENVELOPE_SCALES_OUTSIDE = [4, 5, 6, 7.69]

DEFAULT_CANVAS = (512, 512)
DEFAULT_GLYPH_CANVAS = (200, 120)
DEFAULT_STROKE_COUNT = (3, 5)
DEFAULT_STROKE_THICKNESS = (3, 6)
DEFAULT_GLYPH_COUNT = 5
# Pillow draws at this multiple of the glyph size before box-filtering down
GLYPH_SUPERSAMPLE = 4
