"""Head rig: named motions, motor allocation, and neck kinematics.

The head exposes 31 controllable motions but only 21 motors; several
motors drive two different motions through their forward and reverse
rotations, two motors form a differential pair for neck pitch/roll, and
one motion (the mouth pucker) pulls two reverse terminals at once.  The
full assignment lives in a versioned, human-auditable table shipped
with the package; this module loads it, validates it, and compiles
motion targets into per-motor signed targets.

Conventions fixed here:

* facial motions are normalized intensities in [0, 1]; eye and neck
  motions are degrees,
* a dual-use motor's signed target is (forward intensity) minus
  (reverse intensity), so its neutral is 0 with range [-1, 1],
* neck pitch is the average of the differential pair, roll the
  half-difference, which keeps both motor angles inside a symmetric
  box when pitch and roll are at their range corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

MOTION_COUNT = 31
MOTOR_COUNT = 21

# Facial motions index the wire-driven points; eyes/neck are rigid links.
FACIAL_MOTIONS = frozenset(range(4, 29))
ANGULAR_MOTIONS = frozenset({1, 2, 3, 29, 30, 31})

NECK_YAW_MOTION = 29
NECK_PITCH_MOTION = 30
NECK_ROLL_MOTION = 31

MOTOR_NAMES = (
    "eye_yaw_left",
    "eye_yaw_right",
    "eye_pitch",
    "eyelid_upper",
    "eyelid_lower",
    "brow_outer_left",
    "brow_outer_right",
    "brow_inner_left",
    "brow_inner_right",
    "cheek_left",
    "cheek_right",
    "lip_upper",
    "lip_lower",
    "mouth_pull_left",
    "mouth_pull_right",
    "mouth_up_left",
    "mouth_up_right",
    "jaw",
    "neck_yaw",
    "neck_diff_a",
    "neck_diff_b",
)


class RigError(ValueError):
    """Malformed rig table or invalid motion input."""


class ConflictError(RigError):
    """Both terminals of a dual-use motor were driven at once."""

    def __init__(self, motor: int, motions: tuple[int, int]):
        self.motor = motor
        self.motions = motions
        super().__init__(
            f"motor {motor} driven by conflicting motions "
            f"{motions[0]} (+) and {motions[1]} (-)"
        )


class NeckRangeError(RigError):
    """Neck pose outside its legal box; carries the nearest legal pose."""

    def __init__(self, pose: "NeckPose", clamped: "NeckPose"):
        self.pose = pose
        self.clamped = clamped
        super().__init__(f"neck pose {pose} out of range; nearest legal pose is {clamped}")


@dataclass(frozen=True)
class NeckPose:
    """Head orientation in degrees: yaw (turn), pitch (nod), roll (tilt)."""

    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0


@dataclass(frozen=True)
class Motion:
    id: int
    actuator: str
    unit: str
    lo: float
    hi: float
    description: str


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


class RigTable:
    """Validated motion/actuator assignment loaded from the data table."""

    def __init__(self, motions: dict[int, Motion], version: str):
        self.version = version
        self.motions = motions
        # motor -> {+1: motion_id, -1: motion_id} for dual-use motors,
        # motor -> motion_id for direct drives.
        self.terminals: dict[int, dict[int, int]] = {}
        self.direct: dict[int, int] = {}
        self.neck_pair: tuple[int, int] | None = None
        self._index()
        self._check()

    def _index(self) -> None:
        for motion in self.motions.values():
            spec = motion.actuator
            if spec.endswith(":avg") or spec.endswith(":diff"):
                pair, _, _ = spec.partition(":")
                a, b = (int(p) for p in pair.split("&"))
                if self.neck_pair is None:
                    self.neck_pair = (a, b)
                elif self.neck_pair != (a, b):
                    raise RigError("differential motions disagree on the motor pair")
                continue
            for token in spec.split():
                if token[-1] in "+-":
                    motor = int(token[:-1])
                    sign = +1 if token[-1] == "+" else -1
                    slots = self.terminals.setdefault(motor, {})
                    if sign in slots:
                        raise RigError(
                            f"terminal {motor}{token[-1]} assigned to motions "
                            f"{slots[sign]} and {motion.id}"
                        )
                    slots[sign] = motion.id
                else:
                    motor = int(token)
                    if motor in self.direct:
                        raise RigError(f"motor {motor} direct-assigned twice")
                    self.direct[motor] = motion.id

    def _check(self) -> None:
        if set(self.motions) != set(range(1, MOTION_COUNT + 1)):
            raise RigError("rig table must define motions 1..31 exactly")
        covered = set(self.direct) | set(self.terminals)
        if self.neck_pair:
            covered |= set(self.neck_pair)
        if covered != set(range(1, MOTOR_COUNT + 1)):
            missing = sorted(set(range(1, MOTOR_COUNT + 1)) - covered)
            extra = sorted(covered - set(range(1, MOTOR_COUNT + 1)))
            raise RigError(f"motor coverage wrong (missing {missing}, extra {extra})")
        if set(self.direct) & set(self.terminals):
            raise RigError("a motor cannot be both direct-driven and dual-use")

    # -- ranges ------------------------------------------------------

    def motion_range(self, motion_id: int) -> tuple[float, float]:
        motion = self.motions.get(motion_id)
        if motion is None:
            raise RigError(f"unknown motion id {motion_id}")
        return motion.lo, motion.hi

    def motor_unit(self, motor: int) -> str:
        if motor in self.direct:
            return self.motions[self.direct[motor]].unit
        if self.neck_pair and motor in self.neck_pair:
            return "deg"
        if motor in self.terminals:
            return "norm"
        raise RigError(f"unknown motor {motor}")

    def motor_range(self, motor: int) -> tuple[float, float]:
        """Reachable angle box per motor, derived from the motion ranges."""
        if motor in self.direct:
            return self.motion_range(self.direct[motor])
        if self.neck_pair and motor in self.neck_pair:
            plo, phi = self.motion_range(NECK_PITCH_MOTION)
            rlo, rhi = self.motion_range(NECK_ROLL_MOTION)
            return plo + rlo, phi + rhi
        slots = self.terminals.get(motor)
        if slots is None:
            raise RigError(f"unknown motor {motor}")
        if len(slots) == 2:
            return -1.0, 1.0
        return 0.0, 1.0

    def neck_box(self) -> tuple[tuple[float, float], ...]:
        return (
            self.motion_range(NECK_YAW_MOTION),
            self.motion_range(NECK_PITCH_MOTION),
            self.motion_range(NECK_ROLL_MOTION),
        )

    # -- motion-level operations --------------------------------------

    def clamp_motion(self, motion_id: int, value: float) -> float:
        """Clamp a motion value into its legal range (idempotent)."""
        if not math.isfinite(value):
            raise RigError(f"motion {motion_id} value must be finite, got {value!r}")
        lo, hi = self.motion_range(motion_id)
        return _clamp(value, lo, hi)

    def validate_targets(self, targets: dict[int, float]) -> dict[int, float]:
        """Check ids and facial ranges; clamp angular entries into range.

        Facial intensities outside [0, 1] are rejected (they indicate a
        caller bug); angular entries are clamped, mirroring how pose
        commands are range-guarded everywhere else.
        """
        checked: dict[int, float] = {}
        for motion_id, value in targets.items():
            lo, hi = self.motion_range(motion_id)
            if not math.isfinite(value):
                raise RigError(f"motion {motion_id} value must be finite, got {value!r}")
            if motion_id in FACIAL_MOTIONS:
                if not lo <= value <= hi:
                    raise RigError(
                        f"motion {motion_id} intensity {value} outside [{lo}, {hi}]"
                    )
                checked[motion_id] = value
            else:
                checked[motion_id] = _clamp(value, lo, hi)
        return checked

    def detect_conflicts(self, targets: dict[int, float]) -> list[tuple[int, tuple[int, int]]]:
        """Dual-use motors whose forward and reverse motions are both active."""
        conflicts = []
        for motor in sorted(self.terminals):
            slots = self.terminals[motor]
            if len(slots) != 2:
                continue
            plus, minus = slots[+1], slots[-1]
            if targets.get(plus, 0.0) != 0.0 and targets.get(minus, 0.0) != 0.0:
                conflicts.append((motor, (plus, minus)))
        return conflicts

    def motions_to_motor_targets(
        self,
        targets: dict[int, float],
        policy: str = "net",
    ) -> dict[int, float]:
        """Compile motion targets into per-motor signed targets.

        Returns a dense map over all 21 motors (unlisted motions are
        neutral).  ``policy='net'`` resolves dual-use conflicts as
        forward minus reverse; ``policy='strict'`` raises
        :class:`ConflictError` instead.
        """
        if policy not in ("net", "strict"):
            raise RigError(f"unknown conflict policy {policy!r}")
        targets = self.validate_targets(targets)
        if policy == "strict":
            conflicts = self.detect_conflicts(targets)
            if conflicts:
                raise ConflictError(*conflicts[0])

        out = {motor: 0.0 for motor in range(1, MOTOR_COUNT + 1)}
        for motor, motion_id in self.direct.items():
            out[motor] = targets.get(motion_id, 0.0)
        for motor, slots in self.terminals.items():
            plus = targets.get(slots.get(+1), 0.0) if +1 in slots else 0.0
            minus = targets.get(slots.get(-1), 0.0) if -1 in slots else 0.0
            out[motor] = plus - minus
        pose = NeckPose(
            yaw=targets.get(NECK_YAW_MOTION, 0.0),
            pitch=targets.get(NECK_PITCH_MOTION, 0.0),
            roll=targets.get(NECK_ROLL_MOTION, 0.0),
        )
        yaw_motor, diff_a, diff_b = self.neck_inverse(pose)
        assert self.neck_pair is not None
        out[self.direct_motor_for(NECK_YAW_MOTION)] = yaw_motor
        out[self.neck_pair[0]] = diff_a
        out[self.neck_pair[1]] = diff_b
        return out

    def direct_motor_for(self, motion_id: int) -> int:
        for motor, mid in self.direct.items():
            if mid == motion_id:
                return motor
        raise RigError(f"motion {motion_id} is not direct-driven")

    # -- neck kinematics ----------------------------------------------

    def clamp_pose(self, pose: NeckPose) -> NeckPose:
        (ylo, yhi), (plo, phi), (rlo, rhi) = self.neck_box()
        return NeckPose(
            yaw=_clamp(pose.yaw, ylo, yhi),
            pitch=_clamp(pose.pitch, plo, phi),
            roll=_clamp(pose.roll, rlo, rhi),
        )

    def neck_inverse(self, pose: NeckPose) -> tuple[float, float, float]:
        """Motor angles (yaw motor, pair a, pair b) realizing a pose.

        Pitch is the pair average and roll the half-difference, so
        ``a = pitch + roll`` and ``b = pitch - roll``.
        """
        clamped = self.clamp_pose(pose)
        if clamped != pose:
            raise NeckRangeError(pose, clamped)
        return pose.yaw, pose.pitch + pose.roll, pose.pitch - pose.roll

    def neck_forward(self, yaw_motor: float, a: float, b: float) -> NeckPose:
        """Pose realized by the given motor angles; exact inverse of
        :meth:`neck_inverse` on its image."""
        return NeckPose(yaw=yaw_motor, pitch=(a + b) / 2.0, roll=(a - b) / 2.0)


def parse_rig_table(text: str) -> RigTable:
    version = "unversioned"
    motions: dict[int, Motion] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if "version=" in line:
                version = line.split("version=", 1)[1].strip()
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise RigError(f"rig table line {lineno}: expected 6 columns, got {len(fields)}")
        try:
            motion = Motion(
                id=int(fields[0]),
                actuator=fields[1].strip(),
                unit=fields[2].strip(),
                lo=float(fields[3]),
                hi=float(fields[4]),
                description=fields[5].strip(),
            )
        except ValueError as exc:
            raise RigError(f"rig table line {lineno}: {exc}") from exc
        if motion.unit not in ("deg", "norm"):
            raise RigError(f"rig table line {lineno}: unknown unit {motion.unit!r}")
        if motion.id in motions:
            raise RigError(f"rig table line {lineno}: duplicate motion id {motion.id}")
        motions[motion.id] = motion
    return RigTable(motions, version)


def load_rig_table(path: str | None = None) -> RigTable:
    """Load the packaged rig table, or an override file."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_rig_table(fh.read())
    text = resources.files("telehead.data").joinpath("head_rig_v1.tsv").read_text("utf-8")
    return parse_rig_table(text)


_DEFAULT: RigTable | None = None


def default_rig() -> RigTable:
    """Shared instance of the packaged table (immutable after load)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_rig_table()
    return _DEFAULT
