"""Per-packet records and the derived metric families: drops, end-to-end
delay, delay variation, and traffic received, plus per-router queuing delay.

Delay variation is reported as the population variance of end-to-end delay
within each reporting window; a smoothed successive-difference estimator
(gain 1/16) is emitted alongside it as a clearly labeled alternative.
"""

import math
from dataclasses import dataclass, field

from .errors import MetricsError
from .qdisc import CLASS_ORDER, TrafficClass


@dataclass(slots=True)
class PacketRecord:
    flow: str
    cls: TrafficClass
    size: int
    created: float
    delivered: float | None = None
    dropped_at: int | None = None  # node id of the dropping router
    dropped_time: float | None = None
    hops: list | None = None  # [node, enqueued, dequeued] triples (detail mode)


def e2e_delay(record: PacketRecord) -> float:
    """Delivery time minus creation time. Undelivered records have no delay."""
    if record.delivered is None:
        raise MetricsError("end-to-end delay requested for an undelivered packet")
    return record.delivered - record.created


def delay_variation(delays) -> float | None:
    """Population variance of a delay series; None below 2 samples."""
    n = len(delays)
    if n < 2:
        return None
    mean = math.fsum(delays) / n
    return math.fsum((d - mean) ** 2 for d in delays) / n


def jitter_rfc(delays, gain: float = 1.0 / 16.0) -> float | None:
    """Smoothed mean of |successive delay differences| (interarrival-jitter
    style estimator); None below 2 samples. `delays` must be in arrival
    order at the sink."""
    if len(delays) < 2:
        return None
    j = 0.0
    prev = delays[0]
    for d in delays[1:]:
        j += (abs(d - prev) - j) * gain
        prev = d
    return j


@dataclass
class ClassSummary:
    label: str
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    in_flight: int = 0
    mean_delay_s: float = 0.0
    max_delay_s: float = 0.0
    delay_var_s2: float = 0.0
    throughput_bps: float = 0.0

    @property
    def conserved(self) -> bool:
        return self.sent == self.delivered + self.dropped + self.in_flight


class MetricStore:
    """Collects one record per generated packet during a run and derives
    all reported statistics afterwards.

    `window` is the time-series bucket length; `warmup` drops records
    created before the cutoff from statistics (never from the conservation
    identity, which always holds on the full record set). Per-hop queue
    timestamps are only collected when `detail` is on.
    """

    def __init__(self, window: float = 1.0, warmup: float = 0.0, detail: bool = False):
        if window <= 0:
            raise ValueError(f"window must be positive, got {window}")
        if warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {warmup}")
        self.window = window
        self.warmup = warmup
        self.detail = detail
        self.records: list[PacketRecord] = []
        self.end_time: float = 0.0
        self._delivered_order: list[PacketRecord] = []
        self._drops_by_node: dict[tuple[TrafficClass, int], int] = {}
        self._queue_samples: dict[int, list[tuple[float, float]]] = {}

    # -- run-time hooks ------------------------------------------------------

    def on_sent(self, packet) -> PacketRecord:
        record = PacketRecord(packet.flow, packet.cls, packet.size, packet.created)
        if self.detail:
            record.hops = []
        self.records.append(record)
        packet.record = record
        return record

    def on_enqueue(self, packet, node: int, now: float) -> None:
        if self.detail:
            packet.record.hops.append([node, now, None])

    def on_dequeue(self, packet, node: int, now: float) -> None:
        if self.detail:
            hop = packet.record.hops[-1]
            hop[2] = now
            self._queue_samples.setdefault(node, []).append((now, now - hop[1]))

    def on_dropped(self, packet, node: int, now: float) -> None:
        record = packet.record
        record.dropped_at = node
        record.dropped_time = now
        key = (packet.cls, node)
        self._drops_by_node[key] = self._drops_by_node.get(key, 0) + 1

    def on_delivered(self, packet, now: float) -> None:
        record = packet.record
        record.delivered = now
        self._delivered_order.append(record)

    def finalize(self, end_time: float) -> None:
        self.end_time = end_time

    # -- derived statistics ----------------------------------------------------

    def _in_stats(self, record: PacketRecord) -> bool:
        return record.created >= self.warmup

    def delays(self, cls: TrafficClass) -> list[float]:
        """End-to-end delays of delivered packets of a class, in arrival
        order at the sinks (warmup filtered)."""
        return [
            r.delivered - r.created
            for r in self._delivered_order
            if r.cls is cls and self._in_stats(r)
        ]

    def _windows(self) -> int:
        horizon = self.end_time
        if horizon <= 0:
            return 0
        return max(1, math.ceil(horizon / self.window - 1e-9))

    def _window_index(self, t: float, n: int) -> int:
        return min(int(t / self.window), n - 1)

    def _window_starts(self, n: int) -> list[float]:
        return [i * self.window for i in range(n)]

    def _delivered_in_windows(self, cls: TrafficClass, n: int):
        buckets = [[] for _ in range(n)]
        for r in self._delivered_order:
            if r.cls is cls and self._in_stats(r):
                buckets[self._window_index(r.delivered, n)].append(r)
        return buckets

    def delay_series(self, cls: TrafficClass) -> list[tuple[float, float]]:
        """Windowed mean end-to-end delay; windows without deliveries are
        omitted."""
        n = self._windows()
        out = []
        for start, bucket in zip(self._window_starts(n), self._delivered_in_windows(cls, n)):
            if bucket:
                mean = math.fsum(r.delivered - r.created for r in bucket) / len(bucket)
                out.append((start, mean))
        return out

    def delay_variation_series(self, cls: TrafficClass) -> list[tuple[float, float]]:
        """Windowed population variance of end-to-end delay; windows with
        fewer than 2 samples yield no datapoint."""
        n = self._windows()
        out = []
        for start, bucket in zip(self._window_starts(n), self._delivered_in_windows(cls, n)):
            var = delay_variation([r.delivered - r.created for r in bucket])
            if var is not None:
                out.append((start, var))
        return out

    def jitter_series(self, cls: TrafficClass) -> list[tuple[float, float]]:
        """Running smoothed-difference jitter estimate sampled at the end of
        each window that saw at least one delivery."""
        n = self._windows()
        out = []
        j = 0.0
        prev = None
        for start, bucket in zip(self._window_starts(n), self._delivered_in_windows(cls, n)):
            for r in bucket:
                d = r.delivered - r.created
                if prev is not None:
                    j += (abs(d - prev) - j) / 16.0
                prev = d
            if bucket and prev is not None:
                out.append((start, j))
        return out

    def traffic_received(self, cls: TrafficClass) -> list[tuple[float, float, float]]:
        """(window start, bytes/s, packets/s) for every window, zero-filled."""
        n = self._windows()
        received_bytes = [0.0] * n
        received_packets = [0.0] * n
        for r in self._delivered_order:
            if r.cls is cls and self._in_stats(r):
                i = self._window_index(r.delivered, n)
                received_bytes[i] += r.size
                received_packets[i] += 1
        w = self.window
        return [
            (start, received_bytes[i] / w, received_packets[i] / w)
            for i, start in enumerate(self._window_starts(n))
        ]

    def drops(self, cls: TrafficClass):
        """Total drop count, per-node counts, and a zero-filled per-window
        drop-rate series (drops/s) for one class."""
        per_node = {
            node: count
            for (c, node), count in self._drops_by_node.items()
            if c is cls
        }
        n = self._windows()
        series_counts = [0.0] * n
        total = 0
        for r in self.records:
            if r.cls is cls and r.dropped_time is not None:
                total += 1
                if self._in_stats(r):
                    series_counts[self._window_index(r.dropped_time, n)] += 1
        w = self.window
        series = [(start, series_counts[i] / w) for i, start in enumerate(self._window_starts(n))]
        return total, per_node, series

    def queuing_delay_samples(self, node: int) -> list[tuple[float, float]]:
        """(dequeue time, queue wait) samples at one router."""
        if not self.detail:
            raise MetricsError(
                "queuing delay needs per-hop timestamps: enable detail mode "
                "(scenario `detail = per_hop`, CLI `--detail per-hop`)"
            )
        return self._queue_samples.get(node, [])

    def queuing_delay(self, node: int) -> list[tuple[float, float]]:
        """Windowed mean queue wait at one router, zero-filled."""
        samples = self.queuing_delay_samples(node)
        n = self._windows()
        sums = [0.0] * n
        counts = [0] * n
        for t, wait in samples:
            if t >= self.warmup:
                i = self._window_index(t, n)
                sums[i] += wait
                counts[i] += 1
        return [
            (start, sums[i] / counts[i] if counts[i] else 0.0)
            for i, start in enumerate(self._window_starts(n))
        ]

    def mean_queuing_delay(self, node: int) -> float:
        samples = [w for t, w in self.queuing_delay_samples(node) if t >= self.warmup]
        if not samples:
            return 0.0
        return math.fsum(samples) / len(samples)

    def summarize(self) -> list[ClassSummary]:
        """One row per class plus a totals row. Counts obey
        sent = delivered + dropped + in_flight per row."""
        rows = {cls: ClassSummary(cls.label) for cls in CLASS_ORDER}
        delays = {cls: [] for cls in CLASS_ORDER}
        received_bytes = {cls: 0 for cls in CLASS_ORDER}
        for r in self.records:
            if not self._in_stats(r):
                continue
            row = rows[r.cls]
            row.sent += 1
            if r.delivered is not None:
                row.delivered += 1
                delays[r.cls].append(r.delivered - r.created)
                received_bytes[r.cls] += r.size
            elif r.dropped_at is not None:
                row.dropped += 1
            else:
                row.in_flight += 1
        span = self.end_time - self.warmup
        for cls, row in rows.items():
            ds = delays[cls]
            if ds:
                row.mean_delay_s = math.fsum(ds) / len(ds)
                row.max_delay_s = max(ds)
                row.delay_var_s2 = delay_variation(ds) or 0.0
            if span > 0:
                row.throughput_bps = received_bytes[cls] * 8.0 / span
        total = ClassSummary("total")
        total.sent = sum(r.sent for r in rows.values())
        total.delivered = sum(r.delivered for r in rows.values())
        total.dropped = sum(r.dropped for r in rows.values())
        total.in_flight = sum(r.in_flight for r in rows.values())
        all_delays = [d for ds in delays.values() for d in ds]
        if all_delays:
            total.mean_delay_s = math.fsum(all_delays) / len(all_delays)
            total.max_delay_s = max(all_delays)
            total.delay_var_s2 = delay_variation(all_delays) or 0.0
        if span > 0:
            total.throughput_bps = sum(received_bytes.values()) * 8.0 / span
        return [rows[cls] for cls in CLASS_ORDER] + [total]

    def conservation(self) -> dict[str, tuple[int, int, int, int]]:
        """(sent, delivered, dropped, in_flight) per class over the FULL
        record set, ignoring warmup. sent always equals the sum of the
        other three."""
        out = {}
        for cls in CLASS_ORDER:
            sent = delivered = dropped = 0
            for r in self.records:
                if r.cls is not cls:
                    continue
                sent += 1
                if r.delivered is not None:
                    delivered += 1
                elif r.dropped_at is not None:
                    dropped += 1
            out[cls.label] = (sent, delivered, dropped, sent - delivered - dropped)
        return out
