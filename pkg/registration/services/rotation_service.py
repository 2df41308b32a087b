"""
Two-stage rotation search.

A trace angle `a` is the hypothesis "the user image is rotated by `a`
relative to the reference". It is scored by turning the user back by `-a`,
re-cropping it to its ink, bringing it to the reference crop height (unless
`height_match` is off), centring it with the reference crop on a common
grid and evaluating the cross-correlation. The coarse sweep covers the
configured range; the fine sweep revisits a window around the coarse best.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple
import logging
import math

from imaging.constants import DEFAULT_FILL, DEFAULT_THRESHOLD
from imaging.exceptions import DegenerateRangeError, DegenerateSizeError, InvalidConfigError, NoSignalError
from imaging.services.preprocess import binarize, crop_ink, crop_to_content, minmax_normalize
from imaging.services.raster import GrayImage
from registration.constants import (
    DEFAULT_COARSE_STEP,
    DEFAULT_FINE_HALFWIDTH,
    DEFAULT_FINE_STEP,
    DEFAULT_RANGE_MAX,
    DEFAULT_RANGE_MIN,
)
from registration.services.correlation_service import cross_correlation
from registration.services.transform_service import embed_common, resize, rotate

logger = logging.getLogger(__name__)


def angle_grid(start: float, stop: float, step: float) -> List[float]:
    """start, start+step, ... up to and including stop (within round-off)."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 9) for i in range(count)]


@dataclass(frozen=True)
class RotationSearchConfig:
    range_min: float = DEFAULT_RANGE_MIN
    range_max: float = DEFAULT_RANGE_MAX
    coarse_step: float = DEFAULT_COARSE_STEP
    fine_halfwidth: float = DEFAULT_FINE_HALFWIDTH
    fine_step: float = DEFAULT_FINE_STEP
    fill: float = DEFAULT_FILL
    # resize each candidate to the reference crop height before correlating
    height_match: bool = True

    def __post_init__(self):
        values = asdict(self)
        if not all(math.isfinite(v) for v in values.values()):
            raise InvalidConfigError(f"rotation search settings must be finite: {values}")
        if self.range_min >= self.range_max:
            raise InvalidConfigError(f"range_min ({self.range_min}) must be below range_max ({self.range_max})")
        if self.coarse_step <= 0 or self.fine_step <= 0:
            raise InvalidConfigError("coarse_step and fine_step must be positive")
        if self.fine_step > self.coarse_step:
            raise InvalidConfigError(f"fine_step ({self.fine_step}) must not exceed coarse_step ({self.coarse_step})")
        if self.fine_halfwidth < self.fine_step:
            raise InvalidConfigError(
                f"fine_halfwidth ({self.fine_halfwidth}) must be at least fine_step ({self.fine_step})"
            )
        if not 0.0 <= self.fill <= 1.0:
            raise InvalidConfigError(f"fill luminance must lie in [0, 1], got {self.fill}")

    def coarse_angles(self) -> List[float]:
        return angle_grid(self.range_min, self.range_max, self.coarse_step)

    def fine_angles(self, center: float) -> List[float]:
        # window clamped to the search range
        low = max(self.range_min, center - self.fine_halfwidth)
        high = min(self.range_max, center + self.fine_halfwidth)
        return angle_grid(low, high, self.fine_step)

    def as_dict(self) -> dict:
        return asdict(self)


class TraceEntry(NamedTuple):
    angle: float
    raw_r: float
    normalized_r: Optional[float]


@dataclass(frozen=True)
class CorrelationTrace:
    """Audit trail of one sweep, ordered by strictly increasing angle."""

    entries: Tuple[TraceEntry, ...]

    def __post_init__(self):
        angles = [e.angle for e in self.entries]
        if not angles:
            raise InvalidConfigError("a correlation trace needs at least one angle")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise InvalidConfigError("trace angles must be strictly increasing")

    @classmethod
    def from_raw(cls, angles: Sequence[float], raw: Sequence[float]) -> "CorrelationTrace":
        try:
            normalized: List[Optional[float]] = minmax_normalize(raw)
        except DegenerateRangeError:
            normalized = [None] * len(raw)
        return cls(tuple(TraceEntry(float(a), float(r), n) for a, r, n in zip(angles, raw, normalized)))

    @property
    def is_degenerate(self) -> bool:
        return self.entries[0].normalized_r is None

    @property
    def angles(self) -> List[float]:
        return [e.angle for e in self.entries]

    def best_angle(self, use_normalized: bool = False) -> float:
        """
        Argmax of the correlation. Ties go to the smallest absolute angle,
        then to the negative candidate.
        """
        if use_normalized and self.is_degenerate:
            raise DegenerateRangeError("trace has no normalized column")

        def score(entry: TraceEntry):
            value = entry.normalized_r if use_normalized else entry.raw_r
            return value, -abs(entry.angle), entry.angle < 0

        return max(self.entries, key=score).angle

    def as_list(self) -> List[dict]:
        return [e._asdict() for e in self.entries]


class RotationEstimate(NamedTuple):
    angle: float
    coarse: CorrelationTrace
    fine: CorrelationTrace


def correlation_at(
    reference_crop: GrayImage,
    user_crop: GrayImage,
    angle: float,
    fill: float = DEFAULT_FILL,
    threshold: float = DEFAULT_THRESHOLD,
    height_match: bool = True,
) -> float:
    """Score the hypothesis that the user is rotated by `angle`."""
    candidate = rotate(user_crop, -angle, fill)
    mask = binarize(candidate, threshold)
    if mask.is_empty:
        return 0.0
    candidate = crop_to_content(candidate, mask)
    if height_match and candidate.height != reference_crop.height:
        try:
            candidate = resize(candidate, reference_crop.height / candidate.height)
        except DegenerateSizeError:
            return 0.0
    a, b = embed_common(reference_crop, candidate, fill)
    return cross_correlation(a, b)


def sweep(
    reference_crop: GrayImage,
    user_crop: GrayImage,
    angles: Sequence[float],
    fill: float = DEFAULT_FILL,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
    height_match: bool = True,
) -> CorrelationTrace:
    """Evaluate every angle; the trace is ordered by angle whatever the worker count."""
    def evaluate(angle: float) -> float:
        return correlation_at(reference_crop, user_crop, angle, fill, threshold, height_match)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(evaluate, angles))
    else:
        raw = [evaluate(a) for a in angles]
    return CorrelationTrace.from_raw(angles, raw)


def detect_rotation(
    reference: GrayImage,
    user: GrayImage,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> RotationEstimate:
    """
    Apparent rotation of `user` relative to `reference`, in degrees at the
    fine-step resolution. Undo it with rotate(user, -angle).
    """
    cfg = cfg or RotationSearchConfig()
    reference_crop = crop_ink(reference, threshold)
    user_crop = crop_ink(user, threshold)

    def run(angles: Sequence[float]) -> CorrelationTrace:
        return sweep(reference_crop, user_crop, angles, cfg.fill, threshold, workers, cfg.height_match)

    coarse = run(cfg.coarse_angles())
    if coarse.is_degenerate:
        raise NoSignalError(
            f"correlation is flat over all {len(coarse.entries)} coarse angles; no rotation signal"
        )
    approximate = coarse.best_angle()
    logger.debug(f"Coarse rotation estimate {approximate:+.1f} deg")

    fine = run(cfg.fine_angles(approximate))
    if fine.is_degenerate:
        logger.warning(f"Fine sweep around {approximate:+.1f} deg is flat; falling back to tie-break")
    angle = fine.best_angle()
    logger.info(f"Detected rotation {angle:+.1f} deg (coarse {approximate:+.1f})")
    return RotationEstimate(angle, coarse, fine)
