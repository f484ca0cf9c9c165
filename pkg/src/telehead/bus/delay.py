"""Playback delay alignment.

The faster stream is buffered so its playback lines up with the slower
one (audio waits for video; audio sent to the head waits for the
motors).  A :class:`DelayBuffer` releases each message exactly
``delay`` after its capture timestamp, preserving both order and the
spacing between messages.
"""

from __future__ import annotations

from collections import deque

from ..clock import NS_PER_MS


class DelayBuffer:
    """FIFO that holds each message until capture time + delay."""

    def __init__(self, delay_ms: float):
        if delay_ms < 0:
            raise ValueError(f"delay must be >= 0, got {delay_ms}")
        self.delay_ns = int(round(delay_ms * NS_PER_MS))
        self._queue: deque = deque()

    def __len__(self) -> int:
        return len(self._queue)

    def push(self, message, capture_ns: int | None = None) -> None:
        """Add a message; capture time defaults to its own timestamp."""
        if capture_ns is None:
            capture_ns = message.timestamp_ns
        if self._queue and capture_ns < self._queue[-1][0]:
            raise ValueError("capture timestamps must be non-decreasing")
        self._queue.append((capture_ns, message))

    def release(self, now_ns: int) -> list:
        """All messages due by ``now_ns`` (capture + delay <= now), in
        capture order."""
        due = []
        while self._queue and self._queue[0][0] + self.delay_ns <= now_ns:
            due.append(self._queue.popleft()[1])
        return due

    def next_release_ns(self) -> int | None:
        """When the head of the queue becomes due, or None if empty."""
        if not self._queue:
            return None
        return self._queue[0][0] + self.delay_ns
