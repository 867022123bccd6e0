"""Deterministic discrete-event queue.

Events dequeue in nondecreasing time; ties break by insertion order.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Optional


@dataclass(order=True)
class Event:
    time: float
    seq: int
    kind: str = field(compare=False)
    payload: Any = field(compare=False, default=None)
    cancelled: bool = field(compare=False, default=False)


class EventQueue:
    def __init__(self, start: float = 0.0):
        self._heap: list[Event] = []
        self._seq = itertools.count()
        self.now = start

    def schedule(self, time: float, kind: str, payload: Any = None) -> Event:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time} before now={self.now}")
        ev = Event(time, next(self._seq), kind, payload)
        heapq.heappush(self._heap, ev)
        return ev

    @staticmethod
    def cancel(ev: Event) -> None:
        ev.cancelled = True

    def pop(self) -> Optional[Event]:
        while self._heap:
            ev = heapq.heappop(self._heap)
            if not ev.cancelled:
                self.now = ev.time
                return ev
        return None

    def peek_time(self) -> Optional[float]:
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0].time if self._heap else None

    def __len__(self) -> int:
        return sum(1 for ev in self._heap if not ev.cancelled)

    def run(self, handler: Callable[[Event], None],
            until: Optional[float] = None) -> None:
        while True:
            t = self.peek_time()
            if t is None or (until is not None and t > until):
                return
            handler(self.pop())
