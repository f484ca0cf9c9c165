"""Sensory front-end models: binaural hearing and stereo vision.

The hearing model is amplitude-only: each ear applies a distance
rolloff and a cardioid-family directivity with a rear floor, standing
in for the sound-collecting effect of an outward-facing auricle.  No
interaural time difference is modeled.  The vision model is a pair of
pinhole cameras on a configurable baseline, each steerable in yaw and
(jointly) in pitch, without lens distortion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PerceptionError(ValueError):
    pass


def wrap_azimuth(deg: float) -> float:
    """Normalize an azimuth to (-180, 180]."""
    wrapped = math.fmod(deg, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped


# ---------------------------------------------------------------------------
# Hearing


@dataclass(frozen=True)
class SoundSource:
    """A mono source on the horizontal plane around the head.

    Azimuth 0 is dead ahead, positive to the right.
    """

    azimuth_deg: float
    distance_m: float
    samples: np.ndarray | None = None
    sample_rate: int = 48_000

    def __post_init__(self):
        if not self.distance_m > 0.0:
            raise PerceptionError(f"distance must be > 0, got {self.distance_m}")
        object.__setattr__(self, "azimuth_deg", wrap_azimuth(self.azimuth_deg))
        if self.samples is not None:
            samples = np.asarray(self.samples, dtype=np.float32)
            if samples.ndim != 1:
                raise PerceptionError("source waveform must be mono (1-D)")
            object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class EarModel:
    """Direction- and distance-dependent gain of one ear.

    ``orientation_deg`` is the azimuth the ear faces; the directional
    response is ``floor + (1 - floor) * ((1 + cos(angle)) / 2) ** p``,
    a cardioid raised to the forward-bias exponent ``p`` with a floor
    that keeps rear sources audible.
    """

    orientation_deg: float
    forward_exponent: float = 2.0
    rear_floor: float = 0.1
    rolloff_reference_m: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rear_floor <= 1.0:
            raise PerceptionError("rear_floor must be in (0, 1]")
        if self.forward_exponent < 0.0:
            raise PerceptionError("forward_exponent must be >= 0")
        if self.rolloff_reference_m <= 0.0:
            raise PerceptionError("rolloff_reference_m must be > 0")

    def directional_gain(self, source_azimuth_deg: float) -> float:
        angle = math.radians(wrap_azimuth(source_azimuth_deg - self.orientation_deg))
        lobe = ((1.0 + math.cos(angle)) / 2.0) ** self.forward_exponent
        return self.rear_floor + (1.0 - self.rear_floor) * lobe

    def distance_gain(self, distance_m: float) -> float:
        return 1.0 / (1.0 + distance_m / self.rolloff_reference_m)

    def gain(self, source_azimuth_deg: float, distance_m: float) -> float:
        return self.distance_gain(distance_m) * self.directional_gain(source_azimuth_deg)


def default_ears(forward_tilt_deg: float = 30.0) -> tuple[EarModel, EarModel]:
    """Left/right ear pair at +-90 degrees, tilted toward the front.

    The forward tilt is what makes rear sources quieter than front
    sources at the same lateral offset.
    """
    return (
        EarModel(orientation_deg=-90.0 + forward_tilt_deg),
        EarModel(orientation_deg=90.0 - forward_tilt_deg),
    )


def ear_gains(
    source: SoundSource,
    head_yaw_deg: float = 0.0,
    ears: tuple[EarModel, EarModel] | None = None,
) -> tuple[float, float]:
    """Amplitude gains (left, right) for a source heard by the head."""
    left, right = ears if ears is not None else default_ears()
    relative = wrap_azimuth(source.azimuth_deg - head_yaw_deg)
    return (
        left.gain(relative, source.distance_m),
        right.gain(relative, source.distance_m),
    )


@dataclass(frozen=True)
class StereoFrame:
    """One fixed-duration block of binaural output."""

    left: np.ndarray
    right: np.ndarray
    sample_rate: int
    sequence: int
    timestamp_ns: int

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise PerceptionError("left/right blocks must have equal length")


def render_stereo(
    source: SoundSource,
    head_yaw_deg: float = 0.0,
    duration_s: float | None = None,
    *,
    ears: tuple[EarModel, EarModel] | None = None,
    cycle_ms: float = 10.0,
    start_timestamp_ns: int = 0,
    start_sequence: int = 0,
) -> list[StereoFrame]:
    """Render a source into per-cycle stereo frames.

    Each channel is the mono waveform scaled by its ear gain; frames
    hold exactly one communication cycle of audio except possibly the
    last, which is shortened rather than padded (padding is a transport
    concern).
    """
    if source.samples is None:
        raise PerceptionError("source has no waveform to render")
    rate = source.sample_rate
    total = len(source.samples) if duration_s is None else int(round(duration_s * rate))
    if total > len(source.samples):
        raise PerceptionError(
            f"waveform too short: need {total} samples, have {len(source.samples)}"
        )
    gain_l, gain_r = ear_gains(source, head_yaw_deg, ears)
    per_frame = int(round(rate * cycle_ms / 1000.0))
    if per_frame <= 0:
        raise PerceptionError("cycle too short for the sample rate")
    frames = []
    cycle_ns = int(round(cycle_ms * 1e6))
    for seq, offset in enumerate(range(0, total, per_frame)):
        block = source.samples[offset : min(offset + per_frame, total)]
        frames.append(
            StereoFrame(
                left=(block * gain_l).astype(np.float32),
                right=(block * gain_r).astype(np.float32),
                sample_rate=rate,
                sequence=start_sequence + seq,
                timestamp_ns=start_timestamp_ns + seq * cycle_ns,
            )
        )
    return frames


def sine_tone(frequency_hz: float, duration_s: float, sample_rate: int = 48_000) -> np.ndarray:
    n = int(round(duration_s * sample_rate))
    t = np.arange(n, dtype=np.float64) / sample_rate
    return np.sin(2.0 * np.pi * frequency_hz * t).astype(np.float32)


# ---------------------------------------------------------------------------
# The 8-position direction experiment


def position_azimuth(position: int) -> float:
    """Azimuth of one of the 8 ring positions around the head.

    Position 5 is dead ahead, position 1 straight behind, 45-degree
    steps in between; 6..8 sweep the right side, 2..4 the left.
    """
    if position not in range(1, 9):
        raise PerceptionError(f"position must be 1..8, got {position}")
    return wrap_azimuth((position - 5) * 45.0)


@dataclass(frozen=True)
class SweepRow:
    position: int
    azimuth_deg: float
    rms_left: float
    rms_right: float
    peak_left: float
    peak_right: float


def sweep_positions(
    *,
    positions: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8),
    tone_hz: float = 440.0,
    duration_s: float = 0.25,
    distance_m: float = 1.0,
    sample_rate: int = 48_000,
    head_yaw_deg: float = 0.0,
    ears: tuple[EarModel, EarModel] | None = None,
) -> list[SweepRow]:
    """Play the same tone from each ring position and tabulate levels."""
    tone = sine_tone(tone_hz, duration_s, sample_rate)
    rows = []
    for position in positions:
        source = SoundSource(
            azimuth_deg=position_azimuth(position),
            distance_m=distance_m,
            samples=tone,
            sample_rate=sample_rate,
        )
        frames = render_stereo(source, head_yaw_deg, duration_s, ears=ears)
        left = np.concatenate([f.left for f in frames])
        right = np.concatenate([f.right for f in frames])
        rows.append(
            SweepRow(
                position=position,
                azimuth_deg=source.azimuth_deg,
                rms_left=float(np.sqrt(np.mean(left.astype(np.float64) ** 2))),
                rms_right=float(np.sqrt(np.mean(right.astype(np.float64) ** 2))),
                peak_left=float(np.max(np.abs(left))),
                peak_right=float(np.max(np.abs(right))),
            )
        )
    return rows


def format_sweep_table(rows: list[SweepRow]) -> str:
    """Delimited table of sweep results, ready for plotting tools."""
    lines = ["position\tazimuth_deg\trms_left\trms_right\tpeak_left\tpeak_right"]
    for r in rows:
        lines.append(
            f"{r.position}\t{r.azimuth_deg:.1f}\t{r.rms_left:.6f}\t{r.rms_right:.6f}"
            f"\t{r.peak_left:.6f}\t{r.peak_right:.6f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Vision


@dataclass(frozen=True)
class EyeGeometry:
    """Stereo pinhole pair in the head frame.

    Head frame: x right, y up, z forward, origin midway between the
    eyes.  ``focal_length_px`` expresses the (distortion-free) pinhole
    focal length in pixels; the principal point is the image center.
    """

    baseline_m: float = 0.062
    focal_length_px: float = 320.0
    image_width: int = 640
    image_height: int = 480
    eye_yaw_left_deg: float = 0.0
    eye_yaw_right_deg: float = 0.0
    eye_pitch_deg: float = 0.0

    def __post_init__(self):
        if self.baseline_m <= 0.0:
            raise PerceptionError("baseline must be > 0")
        if self.focal_length_px <= 0.0:
            raise PerceptionError("focal length must be > 0")
        for name, value, lo, hi in (
            ("eye_yaw_left_deg", self.eye_yaw_left_deg, -35.0, 35.0),
            ("eye_yaw_right_deg", self.eye_yaw_right_deg, -35.0, 35.0),
            ("eye_pitch_deg", self.eye_pitch_deg, -14.0, 8.0),
        ):
            if not lo <= value <= hi:
                raise PerceptionError(f"{name}={value} outside [{lo}, {hi}]")


def _eye_camera_point(
    point: tuple[float, float, float],
    eye_x: float,
    yaw_deg: float,
    pitch_deg: float,
) -> tuple[float, float, float]:
    x, y, z = point[0] - eye_x, point[1], point[2]
    # Camera yaw rotates the view axis toward +x (right); express the
    # point in camera coordinates by rotating the other way.
    yaw = math.radians(yaw_deg)
    pitch = math.radians(pitch_deg)
    x1 = x * math.cos(yaw) - z * math.sin(yaw)
    z1 = x * math.sin(yaw) + z * math.cos(yaw)
    y2 = y * math.cos(pitch) - z1 * math.sin(pitch)
    z2 = y * math.sin(pitch) + z1 * math.cos(pitch)
    return x1, y2, z2


def project_point(
    point: tuple[float, float, float],
    geom: EyeGeometry,
    eye: str,
) -> tuple[float, float]:
    """Project a head-frame point through one eye camera, in pixels."""
    if eye == "left":
        eye_x, yaw = -geom.baseline_m / 2.0, geom.eye_yaw_left_deg
    elif eye == "right":
        eye_x, yaw = geom.baseline_m / 2.0, geom.eye_yaw_right_deg
    else:
        raise PerceptionError(f"eye must be 'left' or 'right', got {eye!r}")
    x, y, z = _eye_camera_point(point, eye_x, yaw, geom.eye_pitch_deg)
    if z <= 0.0:
        raise PerceptionError(f"point {point} is behind the {eye} image plane")
    u = geom.image_width / 2.0 + geom.focal_length_px * x / z
    v = geom.image_height / 2.0 - geom.focal_length_px * y / z
    return u, v


def project_stereo(
    point: tuple[float, float, float],
    geom: EyeGeometry,
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Pixel coordinates of a point in the left and right images."""
    return project_point(point, geom, "left"), project_point(point, geom, "right")


def disparity(point: tuple[float, float, float], geom: EyeGeometry) -> float:
    """Horizontal left-right image offset; for a centered point at depth
    ``d`` with both eyes straight this is ``focal * baseline / d``."""
    (ul, _), (ur, _) = project_stereo(point, geom)
    return ul - ur
