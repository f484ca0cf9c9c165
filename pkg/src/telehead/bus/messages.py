"""Message schemas and their binary payload encodings.

Every payload starts with a one-byte schema tag so a frame routed to
the wrong topic is rejected deterministically instead of mis-parsing.
Integers are little-endian; timestamps are int64 nanoseconds since
session start; audio samples travel as float32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .topics import SCHEMA_AUDIO, SCHEMA_CAMERA, SCHEMA_JOINT, Topic


class SchemaError(ValueError):
    """Payload does not match the topic's schema."""


@dataclass(frozen=True)
class JointEntry:
    """One motor's slice of a joint message.

    ``input`` carries the measured input ratio in state messages and
    the commanded input limit in target messages, both in [0, 1].
    """

    name: str
    position: float
    velocity: float
    input: float


@dataclass(frozen=True)
class JointStateMsg:
    """All 21 motors, ordered by motor id."""

    timestamp_ns: int
    entries: tuple[JointEntry, ...]


@dataclass(frozen=True)
class AudioChunkMsg:
    """One communication cycle of interleaved stereo audio.

    ``samples`` has shape (frame_count, 2); when the source ran out
    mid-chunk the tail is zero-padded and ``valid_frames`` marks how
    many frames are real.
    """

    sequence: int
    timestamp_ns: int
    sample_rate: int
    samples: np.ndarray
    valid_frames: int = -1

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise SchemaError("audio samples must have shape (frames, 2)")
        object.__setattr__(self, "samples", samples)
        if self.valid_frames < 0:
            object.__setattr__(self, "valid_frames", samples.shape[0])
        if self.valid_frames > samples.shape[0]:
            raise SchemaError("valid_frames exceeds frame count")

    @property
    def frame_count(self) -> int:
        return int(self.samples.shape[0])

    @property
    def padded(self) -> bool:
        return self.valid_frames < self.frame_count

    def __eq__(self, other) -> bool:
        if not isinstance(other, AudioChunkMsg):
            return NotImplemented
        return (
            self.sequence == other.sequence
            and self.timestamp_ns == other.timestamp_ns
            and self.sample_rate == other.sample_rate
            and self.valid_frames == other.valid_frames
            and self.samples.shape == other.samples.shape
            and bool(np.all(self.samples == other.samples))
        )


@dataclass(frozen=True)
class CameraFrameMsg:
    """Synthetic camera product: projected scene points, not video."""

    sequence: int
    timestamp_ns: int
    width: int
    height: int
    points: tuple[tuple[int, float, float], ...] = field(default_factory=tuple)


_JOINT_HEAD = struct.Struct("<bqB")
_JOINT_VALS = struct.Struct("<ddd")
_AUDIO_HEAD = struct.Struct("<bIqIII")
_CAMERA_HEAD = struct.Struct("<bIqHHH")
_POINT = struct.Struct("<Idd")


def encode_payload(msg) -> bytes:
    if isinstance(msg, JointStateMsg):
        parts = [_JOINT_HEAD.pack(SCHEMA_JOINT, msg.timestamp_ns, len(msg.entries))]
        for e in msg.entries:
            name = e.name.encode("utf-8")
            if len(name) > 255:
                raise SchemaError(f"joint name too long: {e.name!r}")
            parts.append(bytes([len(name)]))
            parts.append(name)
            parts.append(_JOINT_VALS.pack(e.position, e.velocity, e.input))
        return b"".join(parts)
    if isinstance(msg, AudioChunkMsg):
        head = _AUDIO_HEAD.pack(
            SCHEMA_AUDIO,
            msg.sequence,
            msg.timestamp_ns,
            msg.sample_rate,
            msg.frame_count,
            msg.valid_frames,
        )
        body = np.ascontiguousarray(msg.samples, dtype="<f4").tobytes()
        return head + body
    if isinstance(msg, CameraFrameMsg):
        head = _CAMERA_HEAD.pack(
            SCHEMA_CAMERA,
            msg.sequence,
            msg.timestamp_ns,
            msg.width,
            msg.height,
            len(msg.points),
        )
        return head + b"".join(_POINT.pack(pid, u, v) for pid, u, v in msg.points)
    raise SchemaError(f"cannot encode {type(msg).__name__}")


def _need(payload: bytes, count: int, what: str) -> None:
    if len(payload) < count:
        raise SchemaError(f"payload truncated in {what}: need {count} bytes, have {len(payload)}")


def decode_payload(topic: Topic, payload: bytes):
    """Decode a payload for ``topic``; schema mismatches raise
    :class:`SchemaError` rather than mis-parsing."""
    _need(payload, 1, "schema tag")
    tag = payload[0]
    if tag != topic.schema:
        raise SchemaError(
            f"schema tag {tag} does not match topic {topic.name!r} (expected {topic.schema})"
        )
    if tag == SCHEMA_JOINT:
        _need(payload, _JOINT_HEAD.size, "joint header")
        _, timestamp_ns, count = _JOINT_HEAD.unpack_from(payload, 0)
        offset = _JOINT_HEAD.size
        entries = []
        for i in range(count):
            _need(payload, offset + 1, f"joint name length [{i}]")
            name_len = payload[offset]
            offset += 1
            _need(payload, offset + name_len + _JOINT_VALS.size, f"joint entry [{i}]")
            name = payload[offset : offset + name_len].decode("utf-8")
            offset += name_len
            position, velocity, input_value = _JOINT_VALS.unpack_from(payload, offset)
            offset += _JOINT_VALS.size
            entries.append(JointEntry(name, position, velocity, input_value))
        if offset != len(payload):
            raise SchemaError(f"{len(payload) - offset} trailing bytes after joint entries")
        return JointStateMsg(timestamp_ns, tuple(entries))
    if tag == SCHEMA_AUDIO:
        _need(payload, _AUDIO_HEAD.size, "audio header")
        _, sequence, timestamp_ns, rate, frame_count, valid = _AUDIO_HEAD.unpack_from(payload, 0)
        body = payload[_AUDIO_HEAD.size :]
        expected = frame_count * 2 * 4
        if len(body) != expected:
            raise SchemaError(
                f"audio body is {len(body)} bytes, expected {expected} for {frame_count} frames"
            )
        if valid > frame_count:
            raise SchemaError("valid_frames exceeds frame count")
        samples = np.frombuffer(body, dtype="<f4").reshape(frame_count, 2).copy()
        return AudioChunkMsg(sequence, timestamp_ns, rate, samples, valid)
    if tag == SCHEMA_CAMERA:
        _need(payload, _CAMERA_HEAD.size, "camera header")
        _, sequence, timestamp_ns, width, height, count = _CAMERA_HEAD.unpack_from(payload, 0)
        body = payload[_CAMERA_HEAD.size :]
        if len(body) != count * _POINT.size:
            raise SchemaError(
                f"camera body is {len(body)} bytes, expected {count * _POINT.size}"
            )
        points = tuple(
            _POINT.unpack_from(body, i * _POINT.size) for i in range(count)
        )
        return CameraFrameMsg(sequence, timestamp_ns, width, height, points)
    raise SchemaError(f"unknown schema tag {tag}")
