"""Gaze allocation between eyes and neck.

The eyes are far lighter and faster than the whole head, so they take
as much of the gaze shift as their range allows and the neck covers
the remainder.  Both eyes receive the same yaw (no vergence model).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..rig import NeckPose, RigTable, default_rig

logger = logging.getLogger(__name__)

EYE_YAW_MOTION = 1
EYE_PITCH_MOTION = 3


@dataclass(frozen=True)
class GazeCommand:
    eye_yaw_left: float
    eye_yaw_right: float
    eye_pitch: float
    neck: NeckPose
    clamped: bool = False

    @property
    def total_yaw(self) -> float:
        return self.eye_yaw_left + self.neck.yaw

    @property
    def total_pitch(self) -> float:
        return self.eye_pitch + self.neck.pitch


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def gaze_allocate(
    azimuth_deg: float,
    elevation_deg: float = 0.0,
    *,
    rig: RigTable | None = None,
) -> GazeCommand:
    """Split a gaze target into eye angles plus a neck pose.

    Eyes saturate first; whatever they cannot cover goes to the neck.
    Targets beyond the combined range are clamped (flagged and logged)
    rather than rejected, since a daemon must keep tracking.
    """
    rig = rig or default_rig()
    eye_lo, eye_hi = rig.motion_range(EYE_YAW_MOTION)
    pitch_lo, pitch_hi = rig.motion_range(EYE_PITCH_MOTION)
    (nylo, nyhi), (nplo, nphi), _ = rig.neck_box()

    eye_yaw = _clamp(azimuth_deg, eye_lo, eye_hi)
    neck_yaw = _clamp(azimuth_deg - eye_yaw, nylo, nyhi)
    eye_pitch = _clamp(elevation_deg, pitch_lo, pitch_hi)
    neck_pitch = _clamp(elevation_deg - eye_pitch, nplo, nphi)

    clamped = (
        abs(eye_yaw + neck_yaw - azimuth_deg) > 1e-9
        or abs(eye_pitch + neck_pitch - elevation_deg) > 1e-9
    )
    if clamped:
        logger.warning(
            "gaze target (%.1f, %.1f) beyond combined range; clamped to (%.1f, %.1f)",
            azimuth_deg,
            elevation_deg,
            eye_yaw + neck_yaw,
            eye_pitch + neck_pitch,
        )
    return GazeCommand(
        eye_yaw_left=eye_yaw,
        eye_yaw_right=eye_yaw,
        eye_pitch=eye_pitch,
        neck=NeckPose(yaw=neck_yaw, pitch=neck_pitch, roll=0.0),
        clamped=clamped,
    )
