"""
Combined correction: rotation first, then translation (by cropping), then
scaling. Each stage consumes the previous stage's output.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple
import logging
import math
import time

from imaging.constants import DEFAULT_THRESHOLD
from imaging.exceptions import InvalidConfigError
from imaging.services.preprocess import binarize, crop_ink, crop_to_content
from imaging.services.raster import GrayImage
from registration.choices import CorrectionMode
from registration.constants import (
    ENVELOPE_MAX_ROTATION,
    ENVELOPE_MAX_TRANSLATION,
    ENVELOPE_SCALE_MAX,
    ENVELOPE_SCALE_MIN,
)
from registration.services.rotation_service import CorrelationTrace, RotationSearchConfig, detect_rotation
from registration.services.scaling_service import detect_scaling, width_ratio
from registration.services.transform_service import resize, rotate
from registration.services.translation_service import Translation2D, detect_translation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RstParams:
    rotation: float = 0.0
    scale: float = 1.0
    translation: Translation2D = Translation2D(0, 0)

    def __post_init__(self):
        if not math.isfinite(self.rotation):
            raise InvalidConfigError(f"rotation must be finite, got {self.rotation}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidConfigError(f"scale must be positive, got {self.scale}")


def percent_error(detected: float, actual: float) -> float:
    """Relative error in percent; an actual of zero reports the absolute error instead."""
    if actual == 0:
        return abs(detected - actual)
    return abs(detected - actual) / abs(actual) * 100.0


@dataclass(frozen=True)
class ParameterErrors:
    rotation_deg: Optional[float] = None
    rotation_pct: Optional[float] = None
    scale_pct: Optional[float] = None
    translation_exact: Optional[bool] = None


MEASURED_PARAMETERS = {
    CorrectionMode.FULL: ("rotation", "scale", "translation"),
    CorrectionMode.ROTATION: ("rotation",),
    CorrectionMode.SCALING: ("scale",),
    CorrectionMode.TRANSLATION: ("translation",),
}


ENVELOPE_PARAMETERS = ("rotation", "scale", "translation")


def envelope_flags(params: RstParams, parameters: Sequence[str] = ENVELOPE_PARAMETERS) -> List[str]:
    """Those of `parameters` that lie outside the range where recovery is reliable."""
    flags = []
    if "rotation" in parameters and abs(params.rotation) > ENVELOPE_MAX_ROTATION:
        flags.append(f"rotation {params.rotation:g} beyond +/-{ENVELOPE_MAX_ROTATION:g}")
    if "scale" in parameters and not ENVELOPE_SCALE_MIN <= params.scale <= ENVELOPE_SCALE_MAX:
        flags.append(f"scale {params.scale:g} outside [{ENVELOPE_SCALE_MIN:g}, {ENVELOPE_SCALE_MAX:g}]")
    if "translation" in parameters and max(params.translation.as_tuple()) > ENVELOPE_MAX_TRANSLATION:
        flags.append(f"translation {params.translation.as_tuple()} beyond {ENVELOPE_MAX_TRANSLATION}px")
    return flags


@dataclass(frozen=True)
class RegistrationReport:
    mode: str
    detected: RstParams
    reference_crop_size: Tuple[int, int]
    user_crop_size: Optional[Tuple[int, int]]
    config: dict
    threshold: float
    x_scale: Optional[float] = None
    user_translation: Optional[Translation2D] = None
    coarse_trace: Optional[CorrelationTrace] = None
    fine_trace: Optional[CorrelationTrace] = None
    durations_ms: Dict[str, float] = field(default_factory=dict)
    ground_truth: Optional[RstParams] = None
    errors: Optional[ParameterErrors] = None
    envelope_flags: Tuple[str, ...] = ()

    @property
    def measured(self) -> Tuple[str, ...]:
        return MEASURED_PARAMETERS[CorrectionMode(self.mode)]

    def with_ground_truth(self, actual: RstParams) -> "RegistrationReport":
        """Attach ground truth and the per-parameter errors for what this mode measured."""
        measured = self.measured
        errors = ParameterErrors(
            rotation_deg=abs(self.detected.rotation - actual.rotation) if "rotation" in measured else None,
            rotation_pct=percent_error(self.detected.rotation, actual.rotation) if "rotation" in measured else None,
            scale_pct=percent_error(self.detected.scale, actual.scale) if "scale" in measured else None,
            translation_exact=(
                self.user_translation == actual.translation
                if "translation" in measured and self.user_translation is not None else None
            ),
        )
        return replace(
            self,
            ground_truth=actual,
            errors=errors,
            envelope_flags=tuple(envelope_flags(actual)),
        )


class CorrectionResult(NamedTuple):
    corrected: GrayImage
    report: RegistrationReport


class _StageClock:
    def __init__(self):
        self.durations: Dict[str, float] = {}
        self._start = time.perf_counter()
        self._last = self._start

    def lap(self, stage: str) -> None:
        now = time.perf_counter()
        self.durations[stage] = round((now - self._last) * 1000.0, 3)
        self._last = now

    def finish(self) -> Dict[str, float]:
        self.durations["total"] = round((time.perf_counter() - self._start) * 1000.0, 3)
        return self.durations


def correct_rst(
    reference: GrayImage,
    user: GrayImage,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> CorrectionResult:
    """
    Cancel rotation, translation and scaling of `user` against `reference`.

    The corrected image is returned in cropped coordinates (ink content only).
    """
    cfg = cfg or RotationSearchConfig()
    clock = _StageClock()

    reference_crop = crop_ink(reference, threshold)
    user_translation = detect_translation(binarize(user, threshold))
    clock.lap("preprocess")

    estimate = detect_rotation(reference_crop, user, cfg, threshold, workers)
    derotated = rotate(user, -estimate.angle, cfg.fill)
    clock.lap("rotation")

    mask = binarize(derotated, threshold)
    translation = detect_translation(mask)
    user_crop = crop_to_content(derotated, mask)
    clock.lap("translation")

    scale = detect_scaling(reference_crop, user_crop)
    corrected = crop_ink(resize(user_crop, scale), threshold)
    clock.lap("scaling")

    detected = RstParams(rotation=estimate.angle, scale=scale, translation=translation)
    logger.info(
        f"RST detected: rotation {detected.rotation:+.1f} deg, scale {detected.scale:.4f}, "
        f"translation {translation.as_tuple()}"
    )
    report = RegistrationReport(
        mode=CorrectionMode.FULL.value,
        detected=detected,
        reference_crop_size=reference_crop.size,
        user_crop_size=user_crop.size,
        config=cfg.as_dict(),
        threshold=threshold,
        x_scale=width_ratio(reference_crop, user_crop),
        user_translation=user_translation,
        coarse_trace=estimate.coarse,
        fine_trace=estimate.fine,
        durations_ms=clock.finish(),
    )
    return CorrectionResult(corrected, report)


def correct_pure(
    reference: GrayImage,
    user: GrayImage,
    mode: str,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> RegistrationReport:
    """Run a single detector, with the cropping it needs, and report its value."""
    cfg = cfg or RotationSearchConfig()
    mode = CorrectionMode(mode)
    if mode == CorrectionMode.FULL:
        return correct_rst(reference, user, cfg, threshold, workers).report

    clock = _StageClock()
    reference_crop = crop_ink(reference, threshold)
    clock.lap("preprocess")
    fields = {}

    if mode == CorrectionMode.ROTATION:
        estimate = detect_rotation(reference_crop, user, cfg, threshold, workers)
        fields.update(
            detected=RstParams(rotation=estimate.angle),
            coarse_trace=estimate.coarse,
            fine_trace=estimate.fine,
            user_crop_size=crop_ink(user, threshold).size,
        )
    elif mode == CorrectionMode.SCALING:
        user_crop = crop_ink(user, threshold)
        fields.update(
            detected=RstParams(scale=detect_scaling(reference_crop, user_crop)),
            x_scale=width_ratio(reference_crop, user_crop),
            user_crop_size=user_crop.size,
        )
    else:
        mask = binarize(user, threshold)
        translation = detect_translation(mask)
        fields.update(
            detected=RstParams(translation=translation),
            user_translation=translation,
            user_crop_size=crop_to_content(user, mask).size,
        )
    clock.lap(mode.value)
    logger.info(f"Pure {mode.value} detected: {fields['detected']}")

    return RegistrationReport(
        mode=mode.value,
        reference_crop_size=reference_crop.size,
        config=cfg.as_dict(),
        threshold=threshold,
        durations_ms=clock.finish(),
        **fields,
    )
