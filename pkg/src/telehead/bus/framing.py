"""Length-prefixed binary framing for stream transports.

Frame layout:

    magic(2) | version(1) | topic-id(1) | length(4, LE) | payload | crc32(4, LE)

The checksum covers everything between the magic and itself (version,
topic id, length, payload).  Decoding is total: any malformed input
raises :class:`FrameDecodeError` carrying the byte offset of the frame
that failed, never an unstructured crash.
"""

from __future__ import annotations

import struct
import zlib

MAGIC = b"TH"
VERSION = 1
MAX_PAYLOAD = 16 * 1024 * 1024  # sanity bound; no real message approaches this

_HEAD = struct.Struct("<2sBBI")
_CRC = struct.Struct("<I")
HEADER_SIZE = _HEAD.size
TRAILER_SIZE = _CRC.size


class FrameDecodeError(ValueError):
    """Malformed frame.

    ``offset`` is where the offending frame started; ``truncated`` is
    True when the input simply ended early, which a stream reader
    treats as "wait for more bytes" rather than corruption.
    """

    def __init__(self, message: str, offset: int = 0, *, truncated: bool = False):
        self.offset = offset
        self.truncated = truncated
        super().__init__(f"{message} (at byte {offset})")


def encode_frame(topic_id: int, payload: bytes) -> bytes:
    if not 0 <= topic_id <= 255:
        raise ValueError(f"topic id must fit a byte, got {topic_id}")
    if len(payload) > MAX_PAYLOAD:
        raise ValueError(f"payload of {len(payload)} bytes exceeds limit {MAX_PAYLOAD}")
    head = _HEAD.pack(MAGIC, VERSION, topic_id, len(payload))
    crc = zlib.crc32(head[2:] + payload)
    return head + payload + _CRC.pack(crc)


def decode_frame(buffer: bytes, offset: int = 0) -> tuple[int, bytes, int]:
    """Decode one frame; returns ``(topic_id, payload, next_offset)``."""
    if len(buffer) - offset < HEADER_SIZE:
        raise FrameDecodeError(
            f"truncated header: {len(buffer) - offset} of {HEADER_SIZE} bytes",
            offset,
            truncated=True,
        )
    magic, version, topic_id, length = _HEAD.unpack_from(buffer, offset)
    if magic != MAGIC:
        raise FrameDecodeError(f"bad magic {magic!r}", offset)
    if version != VERSION:
        raise FrameDecodeError(f"unsupported frame version {version}", offset)
    if length > MAX_PAYLOAD:
        raise FrameDecodeError(f"declared payload of {length} bytes exceeds limit", offset)
    end = offset + HEADER_SIZE + length + TRAILER_SIZE
    if len(buffer) < end:
        raise FrameDecodeError(
            f"truncated frame: need {end - offset} bytes, have {len(buffer) - offset}",
            offset,
            truncated=True,
        )
    payload = bytes(buffer[offset + HEADER_SIZE : offset + HEADER_SIZE + length])
    (crc,) = _CRC.unpack_from(buffer, end - TRAILER_SIZE)
    expected = zlib.crc32(bytes(buffer[offset + 2 : end - TRAILER_SIZE]))
    if crc != expected:
        raise FrameDecodeError(f"checksum mismatch ({crc:#x} != {expected:#x})", offset)
    return topic_id, payload, end


def iter_frames(buffer: bytes):
    """Yield ``(topic_id, payload)`` for every frame in ``buffer``."""
    offset = 0
    while offset < len(buffer):
        topic_id, payload, offset = decode_frame(buffer, offset)
        yield topic_id, payload


class FrameReader:
    """Incremental decoder for stream transports (feed bytes, pop frames)."""

    def __init__(self):
        self._buf = bytearray()
        self._consumed = 0  # bytes already sliced off the front

    def feed(self, data: bytes) -> list[tuple[int, bytes]]:
        """Append bytes; return all frames completed by them.

        Corrupt input raises :class:`FrameDecodeError` with the offset
        rebased to the whole stream.
        """
        self._buf.extend(data)
        frames = []
        offset = 0
        while offset < len(self._buf):
            try:
                topic_id, payload, offset = decode_frame(self._buf, offset)
            except FrameDecodeError as exc:
                if exc.truncated:
                    break
                raise FrameDecodeError(
                    str(exc).rsplit(" (at byte", 1)[0], self._consumed + exc.offset
                ) from None
            frames.append((topic_id, payload))
        del self._buf[:offset]
        self._consumed += offset
        return frames
