"""In-process publish/subscribe core.

One :class:`MessageBus` carries all topics.  Delivery is pull-based:
``publish`` appends to each live subscription's bounded queue and
consumers drain at their own pace, so no user code ever runs while bus
locks are held.  Overflow behavior follows the topic's drop policy:
audio/camera queues drop their oldest entry (counted), joint queues
make the publisher wait, and raise if the consumer never catches up.
"""

from __future__ import annotations

import threading
from collections import deque

from .messages import AudioChunkMsg, CameraFrameMsg, JointStateMsg, SchemaError
from .topics import SCHEMA_AUDIO, SCHEMA_CAMERA, SCHEMA_JOINT, Topic, topic_by_name

_SCHEMA_TYPES = {
    SCHEMA_JOINT: JointStateMsg,
    SCHEMA_AUDIO: AudioChunkMsg,
    SCHEMA_CAMERA: CameraFrameMsg,
}

DEFAULT_QUEUE_MAXLEN = 256


class BusBackpressureError(RuntimeError):
    """A never-drop topic stayed full past the publish timeout."""


class Subscription:
    """Single-consumer stream of one topic's messages."""

    def __init__(self, topic: Topic, maxlen: int):
        self.topic = topic
        self.maxlen = maxlen
        self.dropped = 0
        self._queue: deque = deque()
        self._cond = threading.Condition()
        self._closed = False

    def _offer(self, message, timeout: float) -> None:
        with self._cond:
            if self._closed:
                return
            if len(self._queue) >= self.maxlen:
                if self.topic.drop_policy == "drop_oldest":
                    self._queue.popleft()
                    self.dropped += 1
                else:
                    ok = self._cond.wait_for(
                        lambda: self._closed or len(self._queue) < self.maxlen,
                        timeout=timeout,
                    )
                    if self._closed:
                        return
                    if not ok:
                        raise BusBackpressureError(
                            f"subscriber queue for {self.topic.name!r} full for {timeout}s"
                        )
            self._queue.append(message)
            self._cond.notify_all()

    def poll(self):
        """Next message or None, without blocking."""
        with self._cond:
            if not self._queue:
                return None
            message = self._queue.popleft()
            self._cond.notify_all()
            return message

    def get(self, timeout: float | None = None):
        """Next message, waiting up to ``timeout``; None on timeout/close."""
        with self._cond:
            ok = self._cond.wait_for(lambda: self._queue or self._closed, timeout=timeout)
            if not ok or (self._closed and not self._queue):
                return None
            message = self._queue.popleft()
            self._cond.notify_all()
            return message

    def drain(self) -> list:
        """All currently queued messages, oldest first."""
        with self._cond:
            messages = list(self._queue)
            self._queue.clear()
            self._cond.notify_all()
            return messages

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    @property
    def closed(self) -> bool:
        return self._closed

    def __iter__(self):
        while True:
            message = self.get()
            if message is None and self._closed:
                return
            if message is not None:
                yield message


class MessageBus:
    """Topic-based fan-out with per-topic FIFO ordering."""

    def __init__(self, *, default_maxlen: int = DEFAULT_QUEUE_MAXLEN):
        self._default_maxlen = default_maxlen
        self._subs: dict[str, list[Subscription]] = {name: [] for name in
                                                     ("joint_states", "joint_targets",
                                                      "audio_avatar", "audio_operator",
                                                      "camera_left", "camera_right")}
        self._lock = threading.Lock()

    def subscribe(self, topic_name: str, *, maxlen: int | None = None) -> Subscription:
        topic = topic_by_name(topic_name)
        sub = Subscription(topic, maxlen or self._default_maxlen)
        with self._lock:
            self._subs[topic_name].append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        sub.close()
        with self._lock:
            try:
                self._subs[sub.topic.name].remove(sub)
            except ValueError:
                pass

    def publish(self, topic_name: str, message, *, timeout: float = 1.0) -> int:
        """Deliver to all live subscribers; returns the delivery count.

        The message type must match the topic schema.  FIFO order per
        topic is guaranteed because delivery happens synchronously in
        publish order under each subscription's own lock.
        """
        topic = topic_by_name(topic_name)
        expected = _SCHEMA_TYPES[topic.schema]
        if not isinstance(message, expected):
            raise SchemaError(
                f"topic {topic_name!r} carries {expected.__name__}, got {type(message).__name__}"
            )
        with self._lock:
            subs = list(self._subs[topic_name])
        for sub in subs:
            sub._offer(message, timeout)
        return len(subs)

    def subscriber_count(self, topic_name: str) -> int:
        with self._lock:
            return len(self._subs[topic_name])
