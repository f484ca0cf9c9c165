"""Session clocks.

All timestamps in the system are integer nanoseconds since session
start, which sidesteps float drift in long runs and makes recorded
sessions comparable byte-for-byte.  ``VirtualClock`` advances only when
told to, giving deterministic offline runs; ``WallClock`` tracks the
monotonic clock for live operation.
"""

from __future__ import annotations

import time

NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000


class VirtualClock:
    """Deterministic clock: time moves only via ``advance``/``advance_to``."""

    def __init__(self, start_ns: int = 0):
        self._now = int(start_ns)

    def now_ns(self) -> int:
        return self._now

    def now_s(self) -> float:
        return self._now / NS_PER_S

    def advance_ns(self, delta_ns: int) -> int:
        if delta_ns < 0:
            raise ValueError("virtual time cannot move backwards")
        self._now += int(delta_ns)
        return self._now

    def advance_to_ns(self, target_ns: int) -> int:
        if target_ns < self._now:
            raise ValueError(
                f"virtual time cannot move backwards ({self._now} -> {target_ns})"
            )
        self._now = int(target_ns)
        return self._now


class WallClock:
    """Monotonic wall clock rebased to zero at construction."""

    def __init__(self):
        self._start = time.monotonic_ns()

    def now_ns(self) -> int:
        return time.monotonic_ns() - self._start

    def now_s(self) -> float:
        return self.now_ns() / NS_PER_S
