"""The fixed topic set exchanged between the two daemons.

Joint topics are control-critical and never dropped (publishers block
on backpressure instead); audio and camera streams drop oldest-first,
since a late sensory frame is worthless but a lost joint command is
not.
"""

from __future__ import annotations

from dataclasses import dataclass

SCHEMA_JOINT = 1
SCHEMA_AUDIO = 2
SCHEMA_CAMERA = 3
SCHEMA_CONTROL = 4

CONTROL_TOPIC_ID = 0  # reserved for transport-level subscribe/unsubscribe


@dataclass(frozen=True)
class Topic:
    name: str
    id: int
    schema: int
    drop_policy: str  # "block" | "drop_oldest"


TOPICS = {
    t.name: t
    for t in (
        Topic("joint_states", 1, SCHEMA_JOINT, "block"),
        Topic("joint_targets", 2, SCHEMA_JOINT, "block"),
        Topic("audio_avatar", 3, SCHEMA_AUDIO, "drop_oldest"),
        Topic("audio_operator", 4, SCHEMA_AUDIO, "drop_oldest"),
        Topic("camera_left", 5, SCHEMA_CAMERA, "drop_oldest"),
        Topic("camera_right", 6, SCHEMA_CAMERA, "drop_oldest"),
    )
}

_BY_ID = {t.id: t for t in TOPICS.values()}


def topic_by_name(name: str) -> Topic:
    try:
        return TOPICS[name]
    except KeyError:
        raise KeyError(f"unknown topic {name!r}; known: {sorted(TOPICS)}") from None


def topic_by_id(topic_id: int) -> Topic:
    try:
        return _BY_ID[topic_id]
    except KeyError:
        raise KeyError(f"unknown topic id {topic_id}") from None
