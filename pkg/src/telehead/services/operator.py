"""Operator-side core: command synthesis and percept bookkeeping.

The operator holds one motion-target state assembled from scenario
events, console commands, or a recorded expression stream, compiles it
through the rig every communication cycle, and publishes the resulting
motor targets.  Percepts coming back (joint states, binaural audio,
camera points) are buffered through the configured alignment delays
before they are exposed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..bus.delay import DelayBuffer
from ..bus.messages import JointEntry, JointStateMsg
from ..expression import (
    MappingParams,
    au_to_motions,
    emotion_preset,
    resolve_au_conflicts,
)
from ..rig import FACIAL_MOTIONS, MOTOR_NAMES, NeckPose, default_rig
from .gaze import gaze_allocate


@dataclass(frozen=True)
class AudioLevel:
    """Per-chunk RMS of the percept audio after delay alignment."""

    sequence: int
    timestamp_ns: int
    rms_left: float
    rms_right: float


class ExpressionStream:
    """Timed expression vectors from a JSON-lines file.

    Each line: ``{"t": seconds, "f": [channel values]}``.  The stream
    holds the latest record at or before the queried time.
    """

    def __init__(self, records: list[tuple[float, np.ndarray]]):
        self.records = sorted(records, key=lambda r: r[0])

    @classmethod
    def load(cls, path: str) -> "ExpressionStream":
        records = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    obj = json.loads(line)
                    records.append((float(obj["t"]), np.array(obj["f"], dtype=float)))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad expression record: {exc}") from exc
        return cls(records)

    def at(self, t: float) -> np.ndarray | None:
        latest = None
        for record_t, values in self.records:
            if record_t <= t:
                latest = values
            else:
                break
        return latest


class OperatorSim:
    """The operator daemon's brain, transport- and clock-agnostic."""

    def __init__(
        self,
        config: dict,
        bus,
        clock,
        *,
        rig=None,
        mapping: MappingParams | None = None,
        expressions: ExpressionStream | None = None,
    ):
        self.config = config
        self.bus = bus
        self.clock = clock
        self.rig = rig or default_rig()
        self.mapping = mapping
        if mapping is None and config.get("mapping"):
            self.mapping = MappingParams.from_config(config["mapping"])
        self.expressions = expressions

        self._states_sub = bus.subscribe("joint_states")
        self._audio_sub = bus.subscribe("audio_avatar")
        self._camera_left_sub = bus.subscribe("camera_left")
        self._camera_right_sub = bus.subscribe("camera_right")

        delays = config["delays"]
        self._audio_delay = DelayBuffer(delays["avatar_audio_ms"])

        self.motion_targets: dict[int, float] = {}
        self.latest_joint_state: JointStateMsg | None = None
        self.audio_levels: list[AudioLevel] = []
        self.camera_points: dict[str, tuple] = {}
        self.input_limit = config["servo"]["input_limit"]

    # -- command surface (scenario events, console) ---------------------

    def set_emotion(self, name: str) -> None:
        preset = emotion_preset(name)
        self._replace_facial(preset)

    def set_au(self, frame: dict[int, float]) -> None:
        motions = au_to_motions(resolve_au_conflicts(frame, rig=self.rig))
        self._replace_facial(motions)

    def set_neck(self, pose: NeckPose) -> None:
        clamped = self.rig.clamp_pose(pose)
        self.motion_targets[29] = clamped.yaw
        self.motion_targets[30] = clamped.pitch
        self.motion_targets[31] = clamped.roll

    def set_eyes(self, yaw_left: float, yaw_right: float, pitch: float) -> None:
        self.motion_targets[1] = self.rig.clamp_motion(1, yaw_left)
        self.motion_targets[2] = self.rig.clamp_motion(2, yaw_right)
        self.motion_targets[3] = self.rig.clamp_motion(3, pitch)

    def set_motions(self, targets: dict[int, float]) -> None:
        """Direct motion-level control (console sliders)."""
        for motion_id, value in targets.items():
            self.motion_targets[motion_id] = self.rig.clamp_motion(motion_id, value)

    def track_object(self, azimuth_deg: float, elevation_deg: float) -> None:
        """Follow a bearing with eyes first, neck for the remainder."""
        command = gaze_allocate(azimuth_deg, elevation_deg, rig=self.rig)
        self.set_eyes(command.eye_yaw_left, command.eye_yaw_right, command.eye_pitch)
        self.set_neck(command.neck)

    def apply_event(self, kind: str, params: dict) -> None:
        if kind == "set_emotion":
            self.set_emotion(params["name"])
        elif kind == "set_au":
            self.set_au({int(k): float(v) for k, v in params["intensities"].items()})
        elif kind == "set_neck":
            self.set_neck(
                NeckPose(
                    yaw=params.get("yaw", 0.0),
                    pitch=params.get("pitch", 0.0),
                    roll=params.get("roll", 0.0),
                )
            )
        elif kind == "set_eyes":
            self.set_eyes(
                params.get("yaw_left", 0.0),
                params.get("yaw_right", 0.0),
                params.get("pitch", 0.0),
            )
        else:
            raise ValueError(f"operator cannot apply event {kind!r}")

    def _replace_facial(self, motions: dict[int, float]) -> None:
        for motion_id in FACIAL_MOTIONS:
            self.motion_targets.pop(motion_id, None)
        self.motion_targets.update(motions)

    # -- cycle work ------------------------------------------------------

    def on_cycle(self) -> None:
        self._publish_targets()
        self._collect_percepts()

    def _motor_targets(self) -> dict[int, float]:
        if self.expressions is not None:
            values = self.expressions.at(self.clock.now_ns() / 1e9)
            if values is not None and self.mapping is not None:
                from ..expression import map_expression

                mapped = map_expression(values, self.mapping, rig=self.rig)
                return {i + 1: float(mapped[i]) for i in range(len(mapped))}
            if values is not None and self.mapping is None:
                raise ValueError("expression stream requires mapping parameters")
        return self.rig.motions_to_motor_targets(self.motion_targets)

    def _publish_targets(self) -> None:
        targets = self._motor_targets()
        entries = tuple(
            JointEntry(
                name=MOTOR_NAMES[mid - 1],
                position=targets[mid],
                velocity=0.0,
                input=self.input_limit,
            )
            for mid in range(1, len(MOTOR_NAMES) + 1)
        )
        self.bus.publish(
            "joint_targets", JointStateMsg(timestamp_ns=self.clock.now_ns(), entries=entries)
        )

    def _collect_percepts(self) -> None:
        for msg in self._states_sub.drain():
            self.latest_joint_state = msg
        for chunk in self._audio_sub.drain():
            self._audio_delay.push(chunk)
        for chunk in self._audio_delay.release(self.clock.now_ns()):
            samples = chunk.samples[: chunk.valid_frames].astype(np.float64)
            if len(samples) == 0:
                continue
            self.audio_levels.append(
                AudioLevel(
                    sequence=chunk.sequence,
                    timestamp_ns=chunk.timestamp_ns,
                    rms_left=float(np.sqrt(np.mean(samples[:, 0] ** 2))),
                    rms_right=float(np.sqrt(np.mean(samples[:, 1] ** 2))),
                )
            )
        for name, sub in (("left", self._camera_left_sub), ("right", self._camera_right_sub)):
            for msg in sub.drain():
                self.camera_points[name] = msg.points

    def latest_disparity(self, point_id: int = 1) -> float | None:
        """Horizontal offset of one matched point across the eye pair."""
        left = dict((pid, (u, v)) for pid, u, v in self.camera_points.get("left", ()))
        right = dict((pid, (u, v)) for pid, u, v in self.camera_points.get("right", ()))
        if point_id not in left or point_id not in right:
            return None
        return left[point_id][0] - right[point_id][0]
