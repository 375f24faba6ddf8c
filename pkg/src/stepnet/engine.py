"""Event-driven engine: wires a topology, per-port queuing disciplines,
traffic sources, and a metric store into one deterministic run.

Hosts do not queue; they serialize straight onto their access link.
Queuing happens only at router output ports: a packet arriving at a router
is enqueued toward its next hop, and each port transmits one packet at a
time, pulling the next from its discipline when the previous serialization
completes.
"""

import itertools
import random
from dataclasses import dataclass

from .kernel import (
    EventCalendar,
    GenerateNext,
    PacketArrival,
    SimEnd,
    TransmitComplete,
)
from .metrics import MetricStore
from .netmodel import HOST, Topology
from .qdisc import QdiscConfig, Verdict, build_qdisc
from .traffic import FlowSpec, make_source, sink_receive

_ACCEPTED = Verdict.ACCEPTED


@dataclass
class RunSummary:
    events_processed: int
    final_clock: float


class Port:
    """One router output direction: a discipline in front of a link."""

    __slots__ = ("node", "peer", "link", "qdisc", "busy")

    def __init__(self, node, peer, link, qdisc):
        self.node = node
        self.peer = peer
        self.link = link
        self.qdisc = qdisc
        self.busy = False


class Engine:
    """Single-threaded simulation instance owning all of its state.

    Distinct engines (other scenarios or seeds) can run side by side, but
    one engine must never be driven from two execution contexts at once.
    """

    def __init__(
        self,
        topology: Topology,
        qdisc_config: QdiscConfig,
        flows: list[FlowSpec],
        store: MetricStore | None = None,
        seed: int = 0,
    ):
        self.topology = topology
        self.store = store if store is not None else MetricStore()
        self.seed = seed
        self.calendar = EventCalendar()
        self._packet_ids = itertools.count()

        self.ports: dict[tuple[int, int], Port] = {}
        for node in topology.nodes:
            if node.kind == HOST:
                continue
            for peer in sorted(topology.neighbors(node.id)):
                link = topology.link_between(node.id, peer)
                self.ports[(node.id, peer)] = Port(
                    node.id, peer, link, build_qdisc(qdisc_config)
                )

        # Each flow draws from its own substream keyed by (seed, flow name),
        # so adding a flow never perturbs the draws of the others.
        self.sources = [
            make_source(
                spec,
                topology.path(spec.src, spec.dst),
                self._packet_ids,
                random.Random(f"{seed}/{spec.name}"),
            )
            for spec in flows
        ]
        for source in self.sources:
            if source.spec.start < source.spec.stop:
                self.calendar.schedule(source.first_time(), GenerateNext(source))

    def run(self, until: float) -> RunSummary:
        """Process events in (time, seq) order until the calendar empties or
        the next event lies beyond `until`. Later events stay pending (their
        packets count as in-flight)."""
        calendar = self.calendar
        processed = 0
        while True:
            next_time = calendar.peek_time()
            if next_time is None or next_time > until:
                break
            event = calendar.next()
            processed += 1
            payload = event.payload
            kind = type(payload)
            if kind is PacketArrival:
                self._on_arrival(payload.node, payload.packet, calendar.now)
            elif kind is TransmitComplete:
                self._on_complete(payload.port, calendar.now)
            elif kind is GenerateNext:
                self._on_generate(payload.flow, calendar.now)
            elif kind is SimEnd:
                break
        self.store.finalize(until)
        return RunSummary(processed, calendar.now)

    # -- handlers ------------------------------------------------------------

    def _on_generate(self, source, now):
        packets, next_time = source.generate(now)
        calendar = self.calendar
        store = self.store
        host = source.spec.src
        link = self.topology.link_between(host, source.path[1])
        for packet in packets:
            store.on_sent(packet)
            _, arrive = link.transmit(host, packet.size * 8, now)
            packet.cursor = 1
            calendar.schedule(arrive, PacketArrival(packet.path[1], packet))
        if next_time is not None:
            calendar.schedule(next_time, GenerateNext(source))

    def _on_arrival(self, node, packet, now):
        if self.topology.nodes[node].kind == HOST:
            sink_receive(self.store, packet, node, now)
            return
        port = self.ports[(node, packet.path[packet.cursor + 1])]
        if port.qdisc.enqueue(packet, now) is not _ACCEPTED:
            self.store.on_dropped(packet, node, now)
            return
        if self.store.detail:
            self.store.on_enqueue(packet, node, now)
        if not port.busy:
            self._serve(port, now)

    def _serve(self, port, now):
        packet = port.qdisc.dequeue(now)
        if self.store.detail:
            self.store.on_dequeue(packet, port.node, now)
        depart, arrive = port.link.transmit(port.node, packet.size * 8, now)
        packet.cursor += 1
        port.busy = True
        self.calendar.schedule(depart, TransmitComplete(port))
        self.calendar.schedule(arrive, PacketArrival(packet.path[packet.cursor], packet))

    def _on_complete(self, port, now):
        port.busy = False
        if len(port.qdisc):
            self._serve(port, now)
