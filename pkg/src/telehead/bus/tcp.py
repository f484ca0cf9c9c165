"""TCP transport: a broker around one in-process bus.

The avatar daemon hosts a :class:`BusServer`; remote peers connect with
:class:`BusClient`.  Clients publish by sending message frames and
subscribe by sending a control frame (reserved topic id 0); the server
then forwards matching bus traffic back over the same socket.  Framing
and payload encodings are shared with the in-process path, so the wire
is exactly what :mod:`telehead.bus.framing` describes.
"""

from __future__ import annotations

import logging
import socket
import struct
import threading

from .core import MessageBus, Subscription
from .framing import FrameReader, encode_frame
from .messages import decode_payload, encode_payload
from .topics import CONTROL_TOPIC_ID, topic_by_id, topic_by_name

logger = logging.getLogger(__name__)

_CONTROL = struct.Struct("<BB")
OP_SUBSCRIBE = 1
OP_UNSUBSCRIBE = 2


def _recv_loop(sock: socket.socket, on_frame, on_close) -> None:
    reader = FrameReader()
    try:
        while True:
            data = sock.recv(65536)
            if not data:
                break
            for topic_id, payload in reader.feed(data):
                on_frame(topic_id, payload)
    except (OSError, ValueError) as exc:
        logger.debug("connection reader stopped: %s", exc)
    finally:
        on_close()


class _ClientSession:
    """Server-side state for one connected peer."""

    def __init__(self, server: "BusServer", sock: socket.socket):
        self.server = server
        self.sock = sock
        self.subs: dict[int, Subscription] = {}
        self.send_lock = threading.Lock()
        self.alive = True

    def start(self) -> None:
        threading.Thread(
            target=_recv_loop,
            args=(self.sock, self._on_frame, self.close),
            daemon=True,
        ).start()

    def _on_frame(self, topic_id: int, payload: bytes) -> None:
        if topic_id == CONTROL_TOPIC_ID:
            op, target = _CONTROL.unpack(payload)
            if op == OP_SUBSCRIBE:
                self._subscribe(target)
            elif op == OP_UNSUBSCRIBE:
                self._unsubscribe(target)
            return
        topic = topic_by_id(topic_id)
        self.server.bus.publish(topic.name, decode_payload(topic, payload))

    def _subscribe(self, topic_id: int) -> None:
        if topic_id in self.subs:
            return
        topic = topic_by_id(topic_id)
        sub = self.server.bus.subscribe(topic.name)
        self.subs[topic_id] = sub
        threading.Thread(target=self._forward_loop, args=(topic_id, sub), daemon=True).start()

    def _unsubscribe(self, topic_id: int) -> None:
        sub = self.subs.pop(topic_id, None)
        if sub is not None:
            self.server.bus.unsubscribe(sub)

    def _forward_loop(self, topic_id: int, sub: Subscription) -> None:
        while self.alive and not sub.closed:
            message = sub.get(timeout=0.25)
            if message is None:
                continue
            frame = encode_frame(topic_id, encode_payload(message))
            try:
                with self.send_lock:
                    self.sock.sendall(frame)
            except OSError:
                self.close()
                return

    def close(self) -> None:
        if not self.alive:
            return
        self.alive = False
        for sub in self.subs.values():
            self.server.bus.unsubscribe(sub)
        self.subs.clear()
        try:
            self.sock.close()
        except OSError:
            pass
        self.server._drop(self)


class BusServer:
    """TCP listener bridging remote peers onto an in-process bus."""

    def __init__(self, bus: MessageBus, host: str = "127.0.0.1", port: int = 0):
        self.bus = bus
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(0.25)
        self.address = self._listener.getsockname()
        self._sessions: set[_ClientSession] = set()
        self._lock = threading.Lock()
        self._running = True
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self.address[1]

    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            session = _ClientSession(self, sock)
            with self._lock:
                self._sessions.add(session)
            session.start()

    def _drop(self, session: _ClientSession) -> None:
        with self._lock:
            self._sessions.discard(session)

    def close(self) -> None:
        self._running = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            sessions = list(self._sessions)
        for session in sessions:
            session.close()


class BusClient:
    """Remote peer: publish frames out, demux subscribed frames in."""

    def __init__(self, host: str, port: int, *, connect_timeout: float = 5.0):
        self._sock = socket.create_connection((host, port), timeout=connect_timeout)
        self._sock.settimeout(None)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._send_lock = threading.Lock()
        self._subs: dict[int, list[Subscription]] = {}
        self._closed = False
        threading.Thread(
            target=_recv_loop, args=(self._sock, self._on_frame, self._on_close), daemon=True
        ).start()

    def _on_frame(self, topic_id: int, payload: bytes) -> None:
        subs = self._subs.get(topic_id)
        if not subs:
            return
        topic = topic_by_id(topic_id)
        message = decode_payload(topic, payload)
        for sub in list(subs):
            sub._offer(message, timeout=1.0)

    def _on_close(self) -> None:
        self._closed = True
        for subs in self._subs.values():
            for sub in subs:
                sub.close()

    @property
    def closed(self) -> bool:
        return self._closed

    def _send(self, frame: bytes) -> None:
        if self._closed:
            raise ConnectionError("bus client is closed")
        with self._send_lock:
            self._sock.sendall(frame)

    def publish(self, topic_name: str, message) -> None:
        topic = topic_by_name(topic_name)
        self._send(encode_frame(topic.id, encode_payload(message)))

    def subscribe(self, topic_name: str, *, maxlen: int = 256) -> Subscription:
        topic = topic_by_name(topic_name)
        sub = Subscription(topic, maxlen)
        first = topic.id not in self._subs
        self._subs.setdefault(topic.id, []).append(sub)
        if first:
            self._send(encode_frame(CONTROL_TOPIC_ID, _CONTROL.pack(OP_SUBSCRIBE, topic.id)))
        return sub

    def close(self) -> None:
        self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass
        for subs in self._subs.values():
            for sub in subs:
                sub.close()
