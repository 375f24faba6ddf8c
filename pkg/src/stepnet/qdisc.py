"""Queuing disciplines attached to router output ports.

Three disciplines share one enqueue/dequeue contract:

* FIFO   - a single drop-on-full queue, no classification.
* PQ     - strict priority over per-class queues; lower classes can starve.
* WFQ    - packet-count weighted round robin over per-class queues that
           share one buffer: weight_i packets are served from class i per
           round, in fixed class order, skipping empty classes without
           banking their credit.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum


class TrafficClass(Enum):
    """Traffic class; the enum value doubles as priority rank (0 highest)."""

    VOICE = 0
    VIDEO = 1
    BEST_EFFORT = 2

    @property
    def priority(self) -> int:
        return self.value

    @property
    def tos(self) -> int:
        return _CLASS_TO_TOS[self]

    @property
    def label(self) -> str:
        return self.name.lower()


CLASS_ORDER = (TrafficClass.VOICE, TrafficClass.VIDEO, TrafficClass.BEST_EFFORT)

# ToS marking <-> class is a bijection over {6, 4, 0}.
_CLASS_TO_TOS = {
    TrafficClass.VOICE: 6,
    TrafficClass.VIDEO: 4,
    TrafficClass.BEST_EFFORT: 0,
}
TOS_TO_CLASS = {tos: cls for cls, tos in _CLASS_TO_TOS.items()}


def classify(tos: int) -> TrafficClass:
    """Map a ToS marking to its class; unknown markings fall back to
    best effort (lenient)."""
    return TOS_TO_CLASS.get(tos, TrafficClass.BEST_EFFORT)


class Classifier:
    """Stateful classify() that also counts unmapped ToS values."""

    def __init__(self):
        self.unmapped = 0

    def classify(self, tos: int) -> TrafficClass:
        cls = TOS_TO_CLASS.get(tos)
        if cls is None:
            self.unmapped += 1
            return TrafficClass.BEST_EFFORT
        return cls


class Verdict(Enum):
    ACCEPTED = "accepted"
    # The only drop cause is a full buffer at arrival time.
    DROPPED = "dropped"


@dataclass
class QdiscConfig:
    kind: str = "fifo"  # fifo | pq | wfq
    fifo_capacity: int = 500
    pq_capacity: dict = field(
        default_factory=lambda: {cls: 500 for cls in CLASS_ORDER}
    )
    wfq_capacity: int = 500
    wfq_weights: dict = field(
        default_factory=lambda: {
            TrafficClass.VOICE: 60,
            TrafficClass.VIDEO: 40,
            TrafficClass.BEST_EFFORT: 10,
        }
    )

    def validate(self):
        if self.kind not in ("fifo", "pq", "wfq"):
            raise ValueError(f"unknown qdisc kind {self.kind!r}")
        if self.fifo_capacity < 1:
            raise ValueError("fifo capacity must be >= 1")
        if any(c < 1 for c in self.pq_capacity.values()):
            raise ValueError("pq per-class capacities must be >= 1")
        if self.wfq_capacity < 1:
            raise ValueError("wfq shared capacity must be >= 1")
        if any(w < 1 for w in self.wfq_weights.values()):
            raise ValueError("wfq weights must be >= 1")
        return self


@dataclass(frozen=True)
class Backlog:
    per_class: dict
    total: int


class Qdisc:
    """Common surface: enqueue returns a Verdict, dequeue the next packet
    to transmit (or None), backlog the stored counts. Per-class drop
    counters are kept on every kind.
    """

    kind = "?"

    def __init__(self):
        self.dropped = {cls: 0 for cls in CLASS_ORDER}

    def enqueue(self, packet, now: float) -> Verdict:
        raise NotImplementedError

    def dequeue(self, now: float):
        raise NotImplementedError

    def __len__(self):
        raise NotImplementedError

    def backlog(self) -> Backlog:
        per_class = self._per_class_counts()
        return Backlog(per_class, sum(per_class.values()))

    def _per_class_counts(self):
        raise NotImplementedError

    def _drop(self, packet) -> Verdict:
        self.dropped[packet.cls] += 1
        return Verdict.DROPPED


class FifoQdisc(Qdisc):
    kind = "fifo"

    def __init__(self, capacity: int = 500):
        super().__init__()
        self.capacity = capacity
        self._q = deque()

    def enqueue(self, packet, now: float) -> Verdict:
        if len(self._q) >= self.capacity:
            return self._drop(packet)
        self._q.append(packet)
        return Verdict.ACCEPTED

    def dequeue(self, now: float):
        return self._q.popleft() if self._q else None

    def __len__(self):
        return len(self._q)

    def _per_class_counts(self):
        counts = {cls: 0 for cls in CLASS_ORDER}
        for packet in self._q:
            counts[packet.cls] += 1
        return counts


class PriorityQdisc(Qdisc):
    """Strict priority: the highest-priority nonempty queue is always
    served first, so sustained high-priority load starves the rest.
    """

    kind = "pq"

    def __init__(self, capacity=None):
        super().__init__()
        self.capacity = dict(capacity) if capacity else {c: 500 for c in CLASS_ORDER}
        self._queues = {cls: deque() for cls in CLASS_ORDER}

    def enqueue(self, packet, now: float) -> Verdict:
        q = self._queues[packet.cls]
        if len(q) >= self.capacity[packet.cls]:
            return self._drop(packet)
        q.append(packet)
        return Verdict.ACCEPTED

    def dequeue(self, now: float):
        for cls in CLASS_ORDER:
            q = self._queues[cls]
            if q:
                return q.popleft()
        return None

    def __len__(self):
        return sum(len(q) for q in self._queues.values())

    def _per_class_counts(self):
        return {cls: len(q) for cls, q in self._queues.items()}


class WfqQdisc(Qdisc):
    """Packet-count weighted round robin over per-class queues sharing one
    buffer. Classes are visited in fixed order (voice, video, best effort);
    up to weight_i packets are served from class i before the cursor moves
    on. A class found empty forfeits the rest of its turn; credit is not
    banked across rounds. When everything is empty the round resets.
    """

    kind = "wfq"

    def __init__(self, capacity: int = 500, weights=None):
        super().__init__()
        self.capacity = capacity
        self.weights = dict(weights) if weights else {
            TrafficClass.VOICE: 60,
            TrafficClass.VIDEO: 40,
            TrafficClass.BEST_EFFORT: 10,
        }
        self._queues = {cls: deque() for cls in CLASS_ORDER}
        self._total = 0
        self._cursor = 0
        self._credit = dict(self.weights)

    def enqueue(self, packet, now: float) -> Verdict:
        if self._total >= self.capacity:
            return self._drop(packet)
        self._queues[packet.cls].append(packet)
        self._total += 1
        return Verdict.ACCEPTED

    def dequeue(self, now: float):
        if self._total == 0:
            self._cursor = 0
            self._credit = dict(self.weights)
            return None
        while True:
            cls = CLASS_ORDER[self._cursor]
            q = self._queues[cls]
            if q and self._credit[cls] > 0:
                self._credit[cls] -= 1
                self._total -= 1
                return q.popleft()
            self._cursor = (self._cursor + 1) % len(CLASS_ORDER)
            if self._cursor == 0:
                self._credit = dict(self.weights)

    def __len__(self):
        return self._total

    def _per_class_counts(self):
        return {cls: len(q) for cls, q in self._queues.items()}


def build_qdisc(config: QdiscConfig) -> Qdisc:
    config.validate()
    if config.kind == "fifo":
        return FifoQdisc(config.fifo_capacity)
    if config.kind == "pq":
        return PriorityQdisc(config.pq_capacity)
    return WfqQdisc(config.wfq_capacity, config.wfq_weights)
