"""Topic-based transport between the avatar and operator daemons."""

from .topics import TOPICS, Topic, topic_by_id, topic_by_name
from .messages import (
    AudioChunkMsg,
    CameraFrameMsg,
    JointEntry,
    JointStateMsg,
    SchemaError,
    decode_payload,
    encode_payload,
)
from .framing import FrameDecodeError, encode_frame, decode_frame, iter_frames, FrameReader
from .core import BusBackpressureError, MessageBus, Subscription
from .audio import chunk_audio, reassemble_audio
from .delay import DelayBuffer

__all__ = [
    "TOPICS",
    "Topic",
    "topic_by_id",
    "topic_by_name",
    "JointEntry",
    "JointStateMsg",
    "AudioChunkMsg",
    "CameraFrameMsg",
    "SchemaError",
    "encode_payload",
    "decode_payload",
    "FrameDecodeError",
    "encode_frame",
    "decode_frame",
    "iter_frames",
    "FrameReader",
    "MessageBus",
    "Subscription",
    "BusBackpressureError",
    "chunk_audio",
    "reassemble_audio",
    "DelayBuffer",
]
