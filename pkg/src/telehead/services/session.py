"""Session records: append-only logs of bus traffic.

File layout: an 8-byte header (`THSESS` + format version + pad), then
one record per message:

    capture_ns(8, LE) | topic-id(1) | payload-length(4, LE) | payload

Payloads reuse the bus encodings, so a session file is effectively the
wire traffic with capture timestamps.  Reading is total: corruption or
truncation raises :class:`SessionError` with the file offset.
"""

from __future__ import annotations

import struct
from pathlib import Path

from ..bus.core import MessageBus, Subscription
from ..bus.messages import decode_payload, encode_payload
from ..bus.topics import TOPICS, topic_by_id

HEADER = b"THSESS\x01\x00"
_RECORD_HEAD = struct.Struct("<qBI")

# fixed drain order keeps record files deterministic
RECORD_TOPIC_ORDER = (
    "joint_targets",
    "joint_states",
    "audio_avatar",
    "audio_operator",
    "camera_left",
    "camera_right",
)


class SessionError(ValueError):
    """Malformed session file; ``offset`` locates the bad record."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at file offset {offset})")


class SessionWriter:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh = open(self.path, "wb")
        self._fh.write(HEADER)

    def write(self, capture_ns: int, topic_id: int, payload: bytes) -> None:
        self._fh.write(_RECORD_HEAD.pack(capture_ns, topic_id, len(payload)))
        self._fh.write(payload)

    def write_message(self, capture_ns: int, topic_name: str, message) -> None:
        self.write(capture_ns, TOPICS[topic_name].id, encode_payload(message))

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_session(path: str | Path):
    """Yield ``(capture_ns, topic, message)`` records from a session file."""
    data = Path(path).read_bytes()
    if not data.startswith(HEADER):
        raise SessionError("not a session file (bad header)", 0)
    offset = len(HEADER)
    while offset < len(data):
        if len(data) - offset < _RECORD_HEAD.size:
            raise SessionError(
                f"truncated record header ({len(data) - offset} bytes left)", offset
            )
        capture_ns, topic_id, length = _RECORD_HEAD.unpack_from(data, offset)
        body_start = offset + _RECORD_HEAD.size
        if len(data) - body_start < length:
            raise SessionError(
                f"truncated payload (need {length}, have {len(data) - body_start})", offset
            )
        try:
            topic = topic_by_id(topic_id)
            message = decode_payload(topic, data[body_start : body_start + length])
        except (KeyError, ValueError) as exc:
            raise SessionError(f"bad record: {exc}", offset) from exc
        yield capture_ns, topic, message
        offset = body_start + length


class SessionRecorder:
    """Taps every topic on a bus and appends drained traffic to a writer."""

    def __init__(self, bus: MessageBus, writer: SessionWriter):
        self.writer = writer
        self._subs: list[tuple[str, Subscription]] = [
            (name, bus.subscribe(name, maxlen=4096)) for name in RECORD_TOPIC_ORDER
        ]

    def flush(self) -> None:
        for name, sub in self._subs:
            for message in sub.drain():
                self.writer.write_message(message.timestamp_ns, name, message)

    def close(self) -> None:
        self.flush()
        for _, sub in self._subs:
            sub.close()
        self.writer.close()
