"""Live (wall-clock) daemons.

Three deployment shapes:

* ``LiveSession``: both cores in one process on the loopback bus, the
  shape used for CI and for driving the browser console without any
  network setup.
* ``AvatarDaemon``: hosts the bus TCP listener plus the servo loop.
* ``OperatorDaemon``: connects to a remote avatar over TCP, runs the
  mapping loop, and optionally exposes the console bridge.

All loops pace themselves on the monotonic clock and never block on
network I/O (bus queues decouple them).
"""

from __future__ import annotations

import logging
import threading
import time

from ..bus.core import MessageBus
from ..bus.tcp import BusClient, BusServer
from ..clock import WallClock
from ..config import load_config, rig_from_config
from ..perception import position_azimuth

from .avatar import AvatarSim
from .operator import OperatorSim
from .runtime import SETTLE_TAIL_S
from .scenario import ScenarioEvent
from .wsbridge import WsBridge

logger = logging.getLogger(__name__)


def _apply_console_command(operator: OperatorSim, avatar: AvatarSim | None, command: dict) -> None:
    kind = command.get("type")
    try:
        if kind == "set_motions":
            operator.set_motions(
                {int(k): float(v) for k, v in command.get("targets", {}).items()}
            )
        elif kind == "play_tone":
            if avatar is None:
                logger.warning("play_tone ignored: no local avatar in this process")
                return
            avatar.play_tone(
                position_azimuth(int(command.get("position", 5))),
                tone_hz=float(command.get("tone_hz", 440.0)),
                duration_s=float(command.get("duration_s", 0.25)),
                distance_m=float(command.get("distance_m", 1.0)),
            )
        elif kind in ("set_emotion", "set_au", "set_neck", "set_eyes"):
            params = {k: v for k, v in command.items() if k != "type"}
            operator.apply_event(kind, params)
        else:
            logger.warning("unknown console command %r", kind)
    except (ValueError, KeyError, TypeError) as exc:
        logger.warning("console command %r rejected: %s", kind, exc)


class _CycleLoop(threading.Thread):
    """Wall-clock cycle scheduler shared by the live deployment shapes."""

    def __init__(self, config: dict, body, name: str):
        super().__init__(name=name, daemon=True)
        self.cycle_s = config["control"]["comm_cycle_ms"] / 1000.0
        self.control_s = config["control"]["control_period_ms"] / 1000.0
        self.ticks_per_cycle = max(1, int(round(self.cycle_s / self.control_s)))
        self._body = body
        self._halt = threading.Event()

    def run(self) -> None:
        start = time.monotonic()
        cycle = 0
        while not self._halt.is_set():
            self._body(cycle)
            cycle += 1
            deadline = start + cycle * self.cycle_s
            delay = deadline - time.monotonic()
            if delay > 0:
                self._halt.wait(delay)

    def stop(self) -> None:
        self._halt.set()


class LiveSession:
    """Both cores on the loopback bus, paced by the wall clock."""

    def __init__(
        self,
        config: dict | None = None,
        scenario: list[ScenarioEvent] | None = None,
        *,
        console: bool = False,
        loop_scenario: bool = False,
    ):
        self.config = config or load_config()
        self.scenario = sorted(scenario or [], key=lambda e: e.t)
        self.loop_scenario = loop_scenario
        self.clock = WallClock()
        self.bus = MessageBus(default_maxlen=self.config["bus"]["queue_maxlen"])
        rig = rig_from_config(self.config)
        self.avatar = AvatarSim(self.config, self.bus, self.clock, rig=rig)
        self.operator = OperatorSim(self.config, self.bus, self.clock, rig=rig)
        self.bridge: WsBridge | None = None
        if console or self.config["console"]["enabled"]:
            self.bridge = WsBridge(self.bus, self.config, rig=rig)
        self._pending = list(self.scenario)
        self._scenario_started_s = 0.0
        self._loop = _CycleLoop(self.config, self._cycle, "telehead-live")

    @property
    def console_port(self) -> int | None:
        return self.bridge.port if self.bridge else None

    def start(self) -> None:
        if self.bridge:
            self.bridge.start()
        self._loop.start()

    def stop(self) -> None:
        self._loop.stop()
        self._loop.join(timeout=2.0)
        if self.bridge:
            self.bridge.stop()

    def run_for(self, seconds: float) -> None:
        self.start()
        try:
            time.sleep(seconds)
        finally:
            self.stop()

    def _cycle(self, cycle_index: int) -> None:
        now_s = self.clock.now_s()
        scenario_t = now_s - self._scenario_started_s
        while self._pending and self._pending[0].t <= scenario_t:
            event = self._pending.pop(0)
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
        if not self._pending and self.loop_scenario and self.scenario:
            self._pending = list(self.scenario)
            self._scenario_started_s = now_s + SETTLE_TAIL_S

        if self.bridge:
            for command in self.bridge.pop_commands():
                _apply_console_command(self.operator, self.avatar, command)
        bearing = self.avatar.object_bearing()
        if bearing is not None:
            self.operator.track_object(*bearing)
        self.operator.on_cycle()
        self.avatar.on_cycle()
        # catch the servo loop up to "now" in control-period steps
        target_s = self.clock.now_s()
        motor_time = next(iter(self.avatar.motors.values())).time
        while motor_time + self._loop.control_s <= target_s:
            motor_time += self._loop.control_s
            self.avatar.on_tick(motor_time)


class AvatarDaemon:
    """Hosts the bus and runs the head's servo loop."""

    def __init__(self, config: dict | None = None):
        self.config = config or load_config()
        self.clock = WallClock()
        self.bus = MessageBus(default_maxlen=self.config["bus"]["queue_maxlen"])
        try:
            self.server = BusServer(
                self.bus, self.config["bus"]["host"], self.config["bus"]["port"]
            )
        except OSError as exc:
            raise SystemExit(
                f"avatar: cannot bind {self.config['bus']['host']}:{self.config['bus']['port']}: {exc}"
            ) from exc
        self.avatar = AvatarSim(self.config, self.bus, self.clock, rig=rig_from_config(self.config))
        self._loop = _CycleLoop(self.config, self._cycle, "telehead-avatar")

    @property
    def port(self) -> int:
        return self.server.port

    def start(self) -> None:
        self._loop.start()
        logger.info("avatar daemon serving on %s:%d", *self.server.address)

    def stop(self) -> None:
        self._loop.stop()
        self._loop.join(timeout=2.0)
        self.server.close()

    def _cycle(self, cycle_index: int) -> None:
        self.avatar.on_cycle()
        target_s = self.clock.now_s()
        motor_time = next(iter(self.avatar.motors.values())).time
        while motor_time + self._loop.control_s <= target_s:
            motor_time += self._loop.control_s
            self.avatar.on_tick(motor_time)


class OperatorDaemon:
    """Connects to a remote avatar and runs the operator loop."""

    def __init__(
        self,
        config: dict | None = None,
        scenario: list[ScenarioEvent] | None = None,
        *,
        console: bool = False,
    ):
        self.config = config or load_config()
        self.clock = WallClock()
        try:
            self.client = BusClient(self.config["bus"]["host"], self.config["bus"]["port"])
        except OSError as exc:
            raise SystemExit(
                f"operator: cannot reach avatar at "
                f"{self.config['bus']['host']}:{self.config['bus']['port']}: {exc}"
            ) from exc
        self.operator = OperatorSim(self.config, self.client, self.clock, rig=rig_from_config(self.config))
        self.scenario = sorted(scenario or [], key=lambda e: e.t)
        self._pending = list(self.scenario)
        self.bridge: WsBridge | None = None
        if console or self.config["console"]["enabled"]:
            self.bridge = WsBridge(self.client, self.config)
        self._loop = _CycleLoop(self.config, self._cycle, "telehead-operator")

    def start(self) -> None:
        if self.bridge:
            self.bridge.start()
        self._loop.start()

    def stop(self) -> None:
        self._loop.stop()
        self._loop.join(timeout=2.0)
        if self.bridge:
            self.bridge.stop()
        self.client.close()

    def _cycle(self, cycle_index: int) -> None:
        now_s = self.clock.now_s()
        while self._pending and self._pending[0].t <= now_s:
            event = self._pending.pop(0)
            if event.kind in ("play_tone", "move_object"):
                logger.warning("environment event %s needs the offline runner", event.kind)
            else:
                self.operator.apply_event(event.kind, event.params)
        if self.bridge:
            for command in self.bridge.pop_commands():
                _apply_console_command(self.operator, None, command)
        self.operator.on_cycle()
