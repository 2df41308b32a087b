# Rotation search defaults, degrees
DEFAULT_RANGE_MIN = -60.0
DEFAULT_RANGE_MAX = 60.0
DEFAULT_COARSE_STEP = 5.0
DEFAULT_FINE_HALFWIDTH = 3.0
DEFAULT_FINE_STEP = 1.0

# Reliable operating envelope; outside it results are best-effort
ENVELOPE_MAX_ROTATION = 57.0
ENVELOPE_SCALE_MIN = 0.67
ENVELOPE_SCALE_MAX = 1.33
ENVELOPE_MAX_TRANSLATION = 200

# Snap tolerance for resampling coordinates that land on the pixel grid
GRID_SNAP = 1e-9
