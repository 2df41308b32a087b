"""
Independent check of the two-stage rotation search: a single sweep of the
whole configured range at one step, using the same correlation kernel and
tie-break.
"""
from typing import NamedTuple, Optional
import logging

from imaging.constants import DEFAULT_THRESHOLD
from imaging.exceptions import InvalidConfigError, NoSignalError
from imaging.services.preprocess import crop_ink
from imaging.services.raster import GrayImage
from registration.services.rotation_service import (
    CorrelationTrace,
    RotationSearchConfig,
    angle_grid,
    detect_rotation,
    sweep,
)

logger = logging.getLogger(__name__)


def exhaustive_rotation_trace(
    reference: GrayImage,
    user: GrayImage,
    step: float = 1.0,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> CorrelationTrace:
    cfg = cfg or RotationSearchConfig()
    if not step > 0:
        raise InvalidConfigError(f"oracle step must be positive, got {step}")
    angles = angle_grid(cfg.range_min, cfg.range_max, step)
    trace = sweep(crop_ink(reference, threshold), crop_ink(user, threshold), angles, cfg.fill, threshold,
                  height_match=cfg.height_match)
    if trace.is_degenerate:
        raise NoSignalError(f"correlation is flat over all {len(angles)} oracle angles")
    return trace


def exhaustive_rotation_oracle(
    reference: GrayImage,
    user: GrayImage,
    step: float = 1.0,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> float:
    return exhaustive_rotation_trace(reference, user, step, cfg, threshold).best_angle()


class OracleComparison(NamedTuple):
    two_stage: float
    exhaustive: float
    coarse_best: float
    coarse_trace: CorrelationTrace

    @property
    def agrees(self) -> bool:
        return self.two_stage == self.exhaustive

    def coarse_miss(self, fine_halfwidth: float) -> bool:
        """The exhaustive optimum lies outside the fine window the coarse stage chose."""
        return abs(self.exhaustive - self.coarse_best) > fine_halfwidth


def compare_with_oracle(
    reference: GrayImage,
    user: GrayImage,
    cfg: Optional[RotationSearchConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> OracleComparison:
    cfg = cfg or RotationSearchConfig()
    estimate = detect_rotation(reference, user, cfg, threshold)
    exhaustive = exhaustive_rotation_oracle(reference, user, cfg.fine_step, cfg, threshold)
    comparison = OracleComparison(estimate.angle, exhaustive, estimate.coarse.best_angle(), estimate.coarse)
    if not comparison.agrees:
        logger.info(
            f"Two-stage {comparison.two_stage:+g} vs exhaustive {exhaustive:+g} "
            f"(coarse best {comparison.coarse_best:+g})"
        )
    return comparison
