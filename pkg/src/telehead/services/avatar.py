"""Avatar-side core: servo loop plus perception publishing.

``AvatarSim`` is transport-agnostic and clock-agnostic: the hosting
loop calls ``on_cycle`` once per communication cycle and ``on_tick``
once per control period.  The same object therefore serves the
deterministic offline runner and the threaded live daemon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bus.audio import chunk_audio
from ..bus.messages import AudioChunkMsg, CameraFrameMsg, JointEntry, JointStateMsg
from ..clock import NS_PER_S
from ..config import build_motors
from ..perception import EyeGeometry, SoundSource, ear_gains, project_point, sine_tone
from ..rig import MOTOR_NAMES, default_rig

OBJECT_POINT_ID = 1
WALL_POINT_ID = 2
WALL_DEPTH_M = 10.0


@dataclass
class _ActiveObject:
    path: list[tuple[float, float, float]]
    start_ns: int
    duration_ns: int

    def position(self, now_ns: int) -> tuple[float, float, float]:
        """Piecewise-linear waypoint interpolation, clamped to the ends."""
        progress = (now_ns - self.start_ns) / self.duration_ns
        progress = min(max(progress, 0.0), 1.0)
        scaled = progress * (len(self.path) - 1)
        index = min(int(scaled), len(self.path) - 2)
        frac = scaled - index
        a, b = self.path[index], self.path[index + 1]
        return tuple(a[i] + (b[i] - a[i]) * frac for i in range(3))

    def active(self, now_ns: int) -> bool:
        return self.start_ns <= now_ns <= self.start_ns + self.duration_ns

    def azimuth_elevation(self, now_ns: int) -> tuple[float, float]:
        x, y, z = self.position(now_ns)
        azimuth = math.degrees(math.atan2(x, z))
        elevation = math.degrees(math.atan2(y, math.hypot(x, z)))
        return azimuth, elevation


class AvatarSim:
    """The simulated head: 21 servos, two ears, two eye cameras."""

    def __init__(self, config: dict, bus, clock, *, rig=None):
        self.config = config
        self.bus = bus
        self.clock = clock
        self.rig = rig or default_rig()
        self.motors = build_motors(config, self.rig)
        self.comm_period_s = config["control"]["comm_cycle_ms"] / 1000.0
        self.sample_rate = config["audio"]["sample_rate"]
        self.cycle_ms = config["control"]["comm_cycle_ms"]
        self._targets_sub = bus.subscribe("joint_targets")
        self._audio_in_sub = bus.subscribe("audio_operator")
        self._audio_queue: list[AudioChunkMsg] = []
        self._audio_seq = 0
        self._camera_seq = 0
        self._camera_period_ns = int(round(NS_PER_S / config["camera"]["fps"]))
        self._next_camera_ns = 0
        self._object: _ActiveObject | None = None
        self._speaker_log: list[AudioChunkMsg] = []

    # -- environment stimuli (scenario-driven) -------------------------

    def play_tone(
        self,
        position_azimuth_deg: float,
        *,
        tone_hz: float = 440.0,
        duration_s: float = 0.25,
        distance_m: float = 1.0,
    ) -> None:
        """Emit a tone from a spot around the head; its binaural capture
        is queued as per-cycle chunks on the outgoing audio topic."""
        source = SoundSource(
            azimuth_deg=position_azimuth_deg,
            distance_m=distance_m,
            samples=sine_tone(tone_hz, duration_s, self.sample_rate),
            sample_rate=self.sample_rate,
        )
        head_yaw = self._neck_yaw()
        gain_l, gain_r = ear_gains(source, head_yaw, self._ears())
        stereo = np.stack([source.samples * gain_l, source.samples * gain_r], axis=1)
        chunks = chunk_audio(
            stereo,
            self.cycle_ms,
            self.sample_rate,
            start_sequence=self._audio_seq,
            start_timestamp_ns=self.clock.now_ns(),
        )
        self._audio_seq += len(chunks)
        self._audio_queue.extend(chunks)

    def move_object(self, path: list, duration_s: float) -> None:
        self._object = _ActiveObject(
            path=[tuple(p) for p in path],
            start_ns=self.clock.now_ns(),
            duration_ns=int(round(duration_s * NS_PER_S)),
        )

    def object_bearing(self) -> tuple[float, float] | None:
        """Ground-truth azimuth/elevation of the scripted object, if any."""
        if self._object is None or not self._object.active(self.clock.now_ns()):
            return None
        return self._object.azimuth_elevation(self.clock.now_ns())

    # -- cycle work -----------------------------------------------------

    def on_cycle(self) -> None:
        """Communication-cycle work: latch targets, publish state and
        perception streams."""
        self._latch_targets()
        self._publish_joint_states()
        self._publish_audio()
        self._publish_camera()
        self._drain_operator_audio()

    def on_tick(self, now_s: float) -> None:
        for motor in self.motors.values():
            motor.tick(now_s)

    # -- internals ------------------------------------------------------

    def _ears(self):
        ears = self.config["ears"]
        from ..perception import EarModel

        tilt = ears["forward_tilt_deg"]
        common = dict(
            forward_exponent=ears["forward_exponent"],
            rear_floor=ears["rear_floor"],
            rolloff_reference_m=ears["rolloff_reference_m"],
        )
        return (
            EarModel(orientation_deg=-90.0 + tilt, **common),
            EarModel(orientation_deg=90.0 - tilt, **common),
        )

    def _neck_yaw(self) -> float:
        return self.motors[19].state.angle

    def _latch_targets(self) -> None:
        messages = self._targets_sub.drain()
        if not messages:
            return
        latest = messages[-1]  # newest command wins within a cycle
        for index, entry in enumerate(latest.entries, start=1):
            motor = self.motors.get(index)
            if motor is None:
                continue
            lo, hi = motor.plant.position_limits
            target = min(max(entry.position, lo), hi)
            motor.command(target, self.comm_period_s, input_limit=entry.input)

    def _publish_joint_states(self) -> None:
        entries = tuple(
            JointEntry(
                name=MOTOR_NAMES[mid - 1],
                position=self.motors[mid].state.angle,
                velocity=self.motors[mid].state.velocity,
                input=self.motors[mid].state.input_ratio,
            )
            for mid in range(1, len(MOTOR_NAMES) + 1)
        )
        self.bus.publish(
            "joint_states", JointStateMsg(timestamp_ns=self.clock.now_ns(), entries=entries)
        )

    def _publish_audio(self) -> None:
        if self._audio_queue:
            self.bus.publish("audio_avatar", self._audio_queue.pop(0))

    def _eye_geometry(self) -> EyeGeometry:
        eyes = self.config["eyes"]
        clamp = lambda v, lo, hi: min(max(v, lo), hi)
        return EyeGeometry(
            baseline_m=eyes["baseline_m"],
            focal_length_px=eyes["focal_length_px"],
            image_width=eyes["image_width"],
            image_height=eyes["image_height"],
            eye_yaw_left_deg=clamp(self.motors[1].state.angle, -35.0, 35.0),
            eye_yaw_right_deg=clamp(self.motors[2].state.angle, -35.0, 35.0),
            eye_pitch_deg=clamp(self.motors[3].state.angle, -14.0, 8.0),
        )

    def _publish_camera(self) -> None:
        now = self.clock.now_ns()
        if now < self._next_camera_ns:
            return
        self._next_camera_ns = now + self._camera_period_ns
        if self._object is None or not self._object.active(now):
            return
        geom = self._eye_geometry()
        position = self._object.position(now)
        wall = (position[0], position[1], WALL_DEPTH_M)
        for eye, topic in (("left", "camera_left"), ("right", "camera_right")):
            points = []
            for pid, point in ((OBJECT_POINT_ID, position), (WALL_POINT_ID, wall)):
                try:
                    u, v = project_point(point, geom, eye)
                except ValueError:
                    continue  # behind the rotated camera; drop the point
                points.append((pid, u, v))
            self.bus.publish(
                topic,
                CameraFrameMsg(
                    sequence=self._camera_seq,
                    timestamp_ns=now,
                    width=geom.image_width,
                    height=geom.image_height,
                    points=tuple(points),
                ),
            )
        self._camera_seq += 1

    def _drain_operator_audio(self) -> None:
        # operator speech played on the head's speaker; kept for inspection
        self._speaker_log.extend(self._audio_in_sub.drain())
        del self._speaker_log[:-64]

    def joint_state_snapshot(self) -> dict[int, float]:
        return {mid: m.state.angle for mid, m in self.motors.items()}
