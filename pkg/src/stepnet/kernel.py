"""Discrete-event kernel: a virtual clock and an event calendar.

Events are processed in strict (time, seq) order. seq is assigned at
schedule time, so simultaneous events fire in the order they were
scheduled and every run is reproducible.
"""

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .errors import SchedulingError

# Simulated time in seconds. Plain floats: transmission times such as
# 0.0012 s must stay exact to double precision, so no quantization.
SimTime = float


@dataclass(slots=True)
class PacketArrival:
    """A packet's last bit reached `node`."""

    node: int
    packet: object


@dataclass(slots=True)
class TransmitComplete:
    """An output port finished serializing its current packet."""

    port: object


@dataclass(slots=True)
class GenerateNext:
    """A traffic source is due to emit its next packet or burst."""

    flow: object


@dataclass(slots=True)
class SimEnd:
    """Explicit stop marker; the engine stops processing when it fires."""


@dataclass(slots=True)
class Event:
    time: SimTime
    seq: int
    payload: object
    cancelled: bool = False


class EventCalendar:
    """Pending events ordered by (time, seq), plus the current clock.

    Popping always yields the minimum (time, seq) entry; cancelled events
    are skipped. The clock never decreases.
    """

    def __init__(self):
        self._heap = []
        self._next_seq = 0
        self._live = 0
        self.now: SimTime = 0.0

    def __len__(self):
        return self._live

    def schedule(self, time: SimTime, payload) -> Event:
        """Insert an event; returns a handle usable with cancel().

        Scheduling before the current clock is a kernel bug and raises.
        """
        if not math.isfinite(time):
            raise SchedulingError(f"event time must be finite, got {time!r}")
        if time < self.now:
            raise SchedulingError(
                f"cannot schedule at t={time} when clock is t={self.now}"
            )
        event = Event(time, self._next_seq, payload)
        self._next_seq += 1
        heappush(self._heap, (time, event.seq, event))
        self._live += 1
        return event

    def cancel(self, event: Event) -> None:
        """Mark an event so it is never delivered. Idempotent."""
        if not event.cancelled:
            event.cancelled = True
            self._live -= 1

    def peek_time(self):
        """Time of the next live event, or None if the calendar is empty."""
        heap = self._heap
        while heap and heap[0][2].cancelled:
            heappop(heap)
        return heap[0][0] if heap else None

    def next(self):
        """Pop the minimum (time, seq) event and advance the clock to it.

        Returns None when no live events remain.
        """
        heap = self._heap
        while heap:
            event = heappop(heap)[2]
            if event.cancelled:
                continue
            self._live -= 1
            self.now = event.time
            return event
        return None
