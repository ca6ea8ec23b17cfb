from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from terranalog.core.twc.slicing import SliceSequence
from terranalog.exception import StageInputError

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResampledProfile:
    values: np.ndarray
    deviation: float


def _positions(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def resample_profile(profile: np.ndarray, target_n: int) -> np.ndarray:
    """``target_n`` equidistant samples of ``profile`` by linear interpolation."""
    profile = np.asarray(profile, dtype=np.float64)
    if profile.size < 2:
        raise StageInputError(f"Profiles need at least 2 points, got {profile.size}.")
    if target_n < 2:
        raise StageInputError(f"Target resolution must be at least 2, got {target_n}.")
    return np.interp(_positions(target_n), _positions(profile.size), profile)


def mae_resample(profile: np.ndarray, target_n: int) -> ResampledProfile:
    """
    Resample a profile and measure how well it reconstructs the original.

    The deviation is the mean absolute difference between the original points
    and the piecewise-linear reconstruction from the resampled points, divided
    by the profile's elevation span.

    Raises
    ------
    StageInputError
        If the profile is constant (zero span), shorter than 2 points, or
        ``target_n < 2``.
    """
    profile = np.asarray(profile, dtype=np.float64)
    values = resample_profile(profile, target_n)
    span = float(profile.max() - profile.min())
    if span <= 0:
        raise StageInputError("Profile has zero span; deviation is undefined.")
    rebuilt = np.interp(_positions(profile.size), _positions(target_n), values)
    deviation = float(np.mean(np.abs(profile - rebuilt)) / span)
    return ResampledProfile(values=values, deviation=deviation)


def choose_target_resolution(ref_slices: SliceSequence, bound: float = 0.015) -> int:
    """
    Smallest resolution at which every reference slice stays within ``bound``.

    Constant slices have no deviation and are ignored. The native slice width
    always qualifies, so the scan ends there at the latest.
    """
    width = ref_slices.slice_width
    spans = np.ptp(ref_slices.slices, axis=1)
    profiles = ref_slices.slices[spans > 0]
    if profiles.shape[0] == 0:
        return 2
    for n in range(2, width):
        if all(mae_resample(profile, n).deviation <= bound for profile in profiles):
            _logger.debug("Resolution %d meets the %.4f deviation bound", n, bound)
            return n
    return width


def resample_sequence(seq: SliceSequence, target_n: int) -> SliceSequence:
    """Resample every slice of ``seq`` up or down to ``target_n`` points."""
    if target_n == seq.slice_width:
        return seq
    values = np.stack([resample_profile(row, target_n) for row in seq.slices])
    return SliceSequence(values, target_n, seq.along_spacing)
