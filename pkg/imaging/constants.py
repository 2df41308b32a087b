# ITU-R BT.601 luma weights (r, g, b)
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# Luminance below this is ink
DEFAULT_THRESHOLD = 0.5

# White paper
DEFAULT_FILL = 1.0

PNM_MAX_MAXVAL = 65535
PNM_MAX_DIMENSION = 1 << 16

PNM_GRAY_MAGICS = (b"P2", b"P5")
PNM_COLOR_MAGICS = (b"P3", b"P6")
PNM_ASCII_MAGICS = (b"P2", b"P3")
