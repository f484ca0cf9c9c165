"""WebSocket bridge for browser consoles.

The operator daemon exposes a WebSocket endpoint (path ``/ws``) that
mirrors the binary bus as JSON so a browser never touches the wire
protocol.  Outbound messages carry joint states, per-chunk audio RMS
levels, and projected camera points; inbound messages are operator
commands, validated and clamped server-side exactly like every other
command source.

JSON schemas (field names are part of the public protocol, see the
README):

    -> {"type": "hello", "version": 1, "cycle_ms": .., "motions": {..},
        "motors": [..], "presets": [..]}
    -> {"type": "joint_states", "t": ns, "positions": [..],
        "velocities": [..], "inputs": [..]}
    -> {"type": "audio_levels", "seq": n, "t": ns,
        "rms_left": x, "rms_right": y}
    -> {"type": "camera_points", "eye": "left"|"right", "seq": n,
        "t": ns, "points": [[id, u, v], ..]}
    <- {"type": "set_emotion", "name": ..}
    <- {"type": "set_au", "intensities": {"12": 1.0, ..}}
    <- {"type": "set_neck", "yaw": .., "pitch": .., "roll": ..}
    <- {"type": "set_eyes", "yaw_left": .., "yaw_right": .., "pitch": ..}
    <- {"type": "set_motions", "targets": {"29": 83.0, ..}}
    <- {"type": "play_tone", "position": 1..8, ...}
"""

from __future__ import annotations

import json
import logging
import threading
from collections import deque

import numpy as np

from websockets.sync.server import serve

from ..expression import EMOTIONS
from ..rig import MOTOR_NAMES, RigTable, default_rig

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
COMMAND_TYPES = frozenset(
    {"set_emotion", "set_au", "set_neck", "set_eyes", "set_motions", "play_tone"}
)


def hello_message(rig: RigTable, cycle_ms: float) -> dict:
    return {
        "type": "hello",
        "version": PROTOCOL_VERSION,
        "cycle_ms": cycle_ms,
        "motors": list(MOTOR_NAMES),
        "presets": list(EMOTIONS),
        "motions": {
            str(mid): {
                "lo": motion.lo,
                "hi": motion.hi,
                "unit": motion.unit,
                "description": motion.description,
            }
            for mid, motion in sorted(rig.motions.items())
        },
    }


class WsBridge:
    """Serves the console endpoint and pumps bus traffic to clients.

    Inbound commands are parsed and queued; the hosting loop drains
    ``pop_commands`` once per communication cycle, which also gives the
    console its command throttling.
    """

    def __init__(self, bus, config: dict, *, rig: RigTable | None = None):
        self.bus = bus
        self.rig = rig or default_rig()
        self.cycle_ms = config["control"]["comm_cycle_ms"]
        self.host = config["console"]["host"]
        self.port = config["console"]["port"]
        self._commands: deque = deque(maxlen=256)
        self._clients: set = set()
        self._lock = threading.Lock()
        self._server = None
        self._threads: list[threading.Thread] = []
        self._running = False

    # -- lifecycle -----------------------------------------------------

    def start(self) -> None:
        self._running = True
        self._server = serve(self._handle_client, self.host, self.port)
        self.port = self._server.socket.getsockname()[1]
        self._threads = [
            threading.Thread(target=self._server.serve_forever, daemon=True),
            threading.Thread(target=self._pump_joint_states, daemon=True),
            threading.Thread(target=self._pump_audio, daemon=True),
            threading.Thread(target=self._pump_camera, daemon=True),
        ]
        for thread in self._threads:
            thread.start()
        logger.info("console bridge listening on ws://%s:%d/ws", self.host, self.port)

    def stop(self) -> None:
        self._running = False
        if self._server is not None:
            self._server.shutdown()
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            try:
                client.close()
            except Exception:
                pass

    # -- command intake --------------------------------------------------

    def pop_commands(self) -> list[dict]:
        """Commands received since the last cycle, oldest first."""
        out = []
        while True:
            try:
                out.append(self._commands.popleft())
            except IndexError:
                return out

    def _handle_client(self, connection) -> None:
        if connection.request is not None and connection.request.path not in ("/ws", "/"):
            connection.close(code=1008, reason="unknown path")
            return
        send_lock = threading.Lock()
        connection._telehead_send_lock = send_lock
        with self._lock:
            self._clients.add(connection)
        try:
            self._send(connection, hello_message(self.rig, self.cycle_ms))
            for raw in connection:
                try:
                    command = json.loads(raw)
                    if not isinstance(command, dict) or command.get("type") not in COMMAND_TYPES:
                        raise ValueError(f"unknown command {raw[:80]!r}")
                except ValueError as exc:
                    self._send(connection, {"type": "error", "message": str(exc)})
                    continue
                self._commands.append(command)
        except Exception as exc:
            logger.debug("console client dropped: %s", exc)
        finally:
            with self._lock:
                self._clients.discard(connection)

    # -- outbound ----------------------------------------------------------

    @staticmethod
    def _send(connection, message: dict) -> None:
        with connection._telehead_send_lock:
            connection.send(json.dumps(message))

    def _broadcast(self, message: dict) -> None:
        text = json.dumps(message)
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            try:
                with client._telehead_send_lock:
                    client.send(text)
            except Exception:
                with self._lock:
                    self._clients.discard(client)

    def _pump_joint_states(self) -> None:
        sub = self.bus.subscribe("joint_states")
        while self._running:
            msg = sub.get(timeout=0.25)
            if msg is None:
                continue
            self._broadcast(
                {
                    "type": "joint_states",
                    "t": msg.timestamp_ns,
                    "positions": [e.position for e in msg.entries],
                    "velocities": [e.velocity for e in msg.entries],
                    "inputs": [e.input for e in msg.entries],
                }
            )

    def _pump_audio(self) -> None:
        sub = self.bus.subscribe("audio_avatar")
        while self._running:
            chunk = sub.get(timeout=0.25)
            if chunk is None:
                continue
            samples = chunk.samples[: chunk.valid_frames].astype(np.float64)
            if len(samples) == 0:
                continue
            self._broadcast(
                {
                    "type": "audio_levels",
                    "seq": chunk.sequence,
                    "t": chunk.timestamp_ns,
                    "rms_left": float(np.sqrt(np.mean(samples[:, 0] ** 2))),
                    "rms_right": float(np.sqrt(np.mean(samples[:, 1] ** 2))),
                }
            )

    def _pump_camera(self) -> None:
        left = self.bus.subscribe("camera_left")
        right = self.bus.subscribe("camera_right")
        while self._running:
            idle = True
            for eye, sub in (("left", left), ("right", right)):
                msg = sub.get(timeout=0.05)
                if msg is None:
                    continue
                idle = False
                self._broadcast(
                    {
                        "type": "camera_points",
                        "eye": eye,
                        "seq": msg.sequence,
                        "t": msg.timestamp_ns,
                        "points": [[pid, u, v] for pid, u, v in msg.points],
                    }
                )
            if idle:
                continue
