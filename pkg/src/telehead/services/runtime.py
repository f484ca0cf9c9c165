"""Deterministic offline runtime.

Runs the avatar and operator cores in one process on the loopback bus
under a virtual clock.  Every cycle executes the same fixed order of
work (events, operator, avatar, recorder, servo ticks), so a given
config and scenario always produces an identical session record, and a
recorded target stream can be replayed into a fresh avatar to
reproduce its joint states byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..bus.core import MessageBus
from ..bus.messages import encode_payload
from ..clock import NS_PER_S, VirtualClock
from ..config import load_config, rig_from_config
from ..expression import MappingParams
from ..perception import position_azimuth

from .avatar import AvatarSim
from .operator import ExpressionStream, OperatorSim
from .scenario import ScenarioEvent, scenario_end_time
from .session import SessionRecorder, SessionWriter, read_session

SETTLE_TAIL_S = 1.0  # keep running after the last event so servos settle


@dataclass
class SessionResult:
    cycles: int
    joint_states: list = field(default_factory=list)
    joint_targets: list = field(default_factory=list)
    audio_levels: list = field(default_factory=list)
    record_path: Path | None = None

    def final_positions(self) -> dict[int, float]:
        last = self.joint_states[-1]
        return {i + 1: e.position for i, e in enumerate(last.entries)}

    def position_history(self, motor_id: int) -> list[float]:
        return [msg.entries[motor_id - 1].position for msg in self.joint_states]

    def target_history(self, motor_id: int) -> list[float]:
        return [msg.entries[motor_id - 1].position for msg in self.joint_targets]


def _event_ns(event: ScenarioEvent) -> int:
    return int(round(event.t * NS_PER_S))


class OfflineSession:
    """One scripted avatar+operator run under the virtual clock."""

    def __init__(
        self,
        config: dict | None = None,
        scenario: list[ScenarioEvent] | None = None,
        *,
        duration_s: float | None = None,
        record_path: str | Path | None = None,
        mapping: MappingParams | None = None,
        expressions: ExpressionStream | None = None,
    ):
        self.config = config or load_config()
        self.scenario = sorted(scenario or [], key=_event_ns)
        self.rig = rig_from_config(self.config)
        self.clock = VirtualClock()
        self.bus = MessageBus(default_maxlen=self.config["bus"]["queue_maxlen"])

        self.record_path = Path(record_path) if record_path else None
        self.recorder = None
        if self.record_path:
            self.recorder = SessionRecorder(self.bus, SessionWriter(self.record_path))
        # result taps subscribe before the sims so they see every message
        self._states_tap = self.bus.subscribe("joint_states", maxlen=1_000_000)
        self._targets_tap = self.bus.subscribe("joint_targets", maxlen=1_000_000)

        self.avatar = AvatarSim(self.config, self.bus, self.clock, rig=self.rig)
        self.operator = OperatorSim(
            self.config,
            self.bus,
            self.clock,
            rig=self.rig,
            mapping=mapping,
            expressions=expressions,
        )

        control_ms = self.config["control"]["control_period_ms"]
        cycle_ms = self.config["control"]["comm_cycle_ms"]
        self.cycle_ns = int(round(cycle_ms * 1e6))
        self.control_ns = int(round(control_ms * 1e6))
        if self.cycle_ns % self.control_ns != 0 or self.cycle_ns < self.control_ns:
            raise ValueError(
                "communication cycle must be a whole multiple of the control period"
            )
        self.ticks_per_cycle = self.cycle_ns // self.control_ns
        if duration_s is None:
            duration_s = scenario_end_time(self.scenario) + SETTLE_TAIL_S
        self.cycles = max(1, int(round(duration_s * NS_PER_S / self.cycle_ns)))

    def _dispatch_events(self, pending: list[ScenarioEvent], now_ns: int) -> list[ScenarioEvent]:
        while pending and _event_ns(pending[0]) <= now_ns:
            event = pending.pop(0)
            if event.kind == "play_tone":
                self.avatar.play_tone(
                    position_azimuth(int(event.params["position"])),
                    tone_hz=event.params.get("tone_hz", 440.0),
                    duration_s=event.params.get("duration_s", 0.25),
                    distance_m=event.params.get("distance_m", 1.0),
                )
            elif event.kind == "move_object":
                self.avatar.move_object(event.params["path"], event.params["duration_s"])
            else:
                self.operator.apply_event(event.kind, event.params)
        return pending

    def run(self) -> SessionResult:
        pending = list(self.scenario)
        for cycle in range(self.cycles):
            now_ns = cycle * self.cycle_ns
            self.clock.advance_to_ns(now_ns)
            pending = self._dispatch_events(pending, now_ns)
            bearing = self.avatar.object_bearing()
            if bearing is not None:
                self.operator.track_object(*bearing)
            self.operator.on_cycle()
            self.avatar.on_cycle()
            if self.recorder:
                self.recorder.flush()
            for tick in range(1, self.ticks_per_cycle + 1):
                tick_ns = now_ns + tick * self.control_ns
                self.clock.advance_to_ns(tick_ns)
                self.avatar.on_tick(tick_ns / NS_PER_S)

        if self.recorder:
            self.recorder.close()
        return SessionResult(
            cycles=self.cycles,
            joint_states=self._states_tap.drain(),
            joint_targets=self._targets_tap.drain(),
            audio_levels=list(self.operator.audio_levels),
            record_path=self.record_path,
        )


def replay_joint_states(record_path: str | Path, config: dict | None = None) -> list:
    """Re-run the servo pipeline from a session's recorded targets.

    Feeds the recorded ``joint_targets`` stream into a fresh avatar at
    the recorded capture times under a virtual clock and returns the
    joint states it produces; with the same config these match the
    recorded states bit for bit.
    """
    config = config or load_config()
    records = list(read_session(record_path))
    target_records = [(ns, msg) for ns, topic, msg in records if topic.name == "joint_targets"]
    last_ns = max((ns for ns, _, _ in records), default=0)

    clock = VirtualClock()
    bus = MessageBus()
    states_tap = bus.subscribe("joint_states", maxlen=1_000_000)
    avatar = AvatarSim(config, bus, clock, rig=rig_from_config(config))

    cycle_ns = int(round(config["control"]["comm_cycle_ms"] * 1e6))
    control_ns = int(round(config["control"]["control_period_ms"] * 1e6))
    ticks_per_cycle = cycle_ns // control_ns
    cycles = last_ns // cycle_ns + 1

    feed_index = 0
    for cycle in range(cycles):
        now_ns = cycle * cycle_ns
        clock.advance_to_ns(now_ns)
        while feed_index < len(target_records) and target_records[feed_index][0] <= now_ns:
            bus.publish("joint_targets", target_records[feed_index][1])
            feed_index += 1
        avatar.on_cycle()
        for tick in range(1, ticks_per_cycle + 1):
            tick_ns = now_ns + tick * control_ns
            clock.advance_to_ns(tick_ns)
            avatar.on_tick(tick_ns / NS_PER_S)
    return states_tap.drain()


def verify_replay(record_path: str | Path, config: dict | None = None) -> tuple[bool, int, int]:
    """Compare recorded joint states against a replay.

    Returns ``(identical, compared, mismatches)`` using byte-level
    comparison of the encoded messages.
    """
    recorded = [
        msg for _, topic, msg in read_session(record_path) if topic.name == "joint_states"
    ]
    replayed = replay_joint_states(record_path, config)
    compared = min(len(recorded), len(replayed))
    mismatches = sum(
        1
        for i in range(compared)
        if encode_payload(recorded[i]) != encode_payload(replayed[i])
    )
    if len(recorded) != len(replayed):
        mismatches += abs(len(recorded) - len(replayed))
    return mismatches == 0, compared, mismatches
