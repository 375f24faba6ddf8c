"""Network model: nodes, full-duplex links, the step-topology builder,
static minimum-hop routing, and link transmission/propagation timing.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import RoutingError, TopologyError

HOST = "host"
ROUTER = "router"


@dataclass(slots=True)
class Node:
    id: int
    kind: str
    # Backbone position for reporting: routers carry (step, offset) from the
    # builder; hosts carry the router they attach to instead.
    step: int | None = None
    offset: int | None = None
    attached_to: int | None = None


class Link:
    """Full-duplex point-to-point link. The two directions serialize
    independently; `transmit` models non-preemptive store-and-forward.
    """

    __slots__ = ("a", "b", "rate_bps", "prop_delay_s", "_busy_until")

    def __init__(self, a: int, b: int, rate_bps: float, prop_delay_s: float):
        if rate_bps <= 0:
            raise TopologyError(f"link {a}-{b}: rate must be positive, got {rate_bps}")
        if prop_delay_s < 0:
            raise TopologyError(
                f"link {a}-{b}: propagation delay must be >= 0, got {prop_delay_s}"
            )
        self.a = a
        self.b = b
        self.rate_bps = rate_bps
        self.prop_delay_s = prop_delay_s
        self._busy_until = {a: 0.0, b: 0.0}

    def other(self, node: int) -> int:
        return self.b if node == self.a else self.a

    def busy_until(self, sender: int) -> float:
        return self._busy_until[sender]

    def transmit(self, sender: int, size_bits: float, now: float):
        """Serialize `size_bits` out of `sender` starting no earlier than now.

        Returns (depart, arrive): the times the last bit leaves the sender
        and reaches the far end. The direction's busy_until advances to
        `depart`, so later hand-offs queue up behind this one.
        """
        busy = self._busy_until[sender]
        depart = max(now, busy) + transmission_time(size_bits, self.rate_bps)
        self._busy_until[sender] = depart
        return depart, depart + self.prop_delay_s


def transmission_time(size_bits: float, rate_bps: float) -> float:
    """Seconds needed to serialize size_bits at rate_bps."""
    if rate_bps <= 0:
        raise TopologyError(f"rate must be positive, got {rate_bps}")
    return size_bits / rate_bps


@dataclass
class StepParams:
    """Parameters for the staircase backbone builder."""

    steps: int
    nodes_per_step: int
    rate_bps: float = 10_000_000.0
    prop_delay_s: float = 5e-6


class Topology:
    """Nodes, links, and a precomputed next-hop table.

    Node ids are dense from 0 in creation order. Routing is minimum-hop
    with ties broken toward the lowest next-hop id, so routes are unique
    and deterministic.
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self.links: list[Link] = []
        self._adj: dict[int, dict[int, Link]] = {}
        self._next_hop: dict[tuple[int, int], int] = {}
        self._paths: dict[tuple[int, int], tuple[int, ...]] = {}

    # -- construction -----------------------------------------------------

    def add_node(self, kind: str, step=None, offset=None, attached_to=None) -> int:
        node = Node(len(self.nodes), kind, step, offset, attached_to)
        self.nodes.append(node)
        self._adj[node.id] = {}
        return node.id

    def add_link(self, a: int, b: int, rate_bps: float, prop_delay_s: float) -> Link:
        for n in (a, b):
            if not 0 <= n < len(self.nodes):
                raise TopologyError(f"link endpoint {n} does not exist")
        if a == b:
            raise TopologyError(f"self-link on node {a}")
        if b in self._adj[a]:
            raise TopologyError(f"duplicate link {a}-{b}")
        link = Link(a, b, rate_bps, prop_delay_s)
        self.links.append(link)
        self._adj[a][b] = link
        self._adj[b][a] = link
        return link

    def attach_host(self, router: int, rate_bps: float, prop_delay_s: float) -> int:
        """Append a host node linked to `router`; routes are extended
        incrementally (a leaf host routes everything through its router).
        """
        if not 0 <= router < len(self.nodes):
            raise TopologyError(f"cannot attach host: node {router} does not exist")
        if self.nodes[router].kind != ROUTER:
            raise TopologyError(f"cannot attach host to node {router}: not a router")
        host = self.add_node(HOST, attached_to=router)
        self.add_link(host, router, rate_bps, prop_delay_s)
        if self._next_hop:
            self._extend_routes(host, router)
        return host

    def _extend_routes(self, host: int, router: int) -> None:
        for other in range(len(self.nodes)):
            if other == host:
                continue
            self._next_hop[(host, other)] = router
            self._next_hop[(other, host)] = (
                host if other == router else self._next_hop[(other, router)]
            )
        self._paths.clear()

    # -- lookups -----------------------------------------------------------

    def neighbors(self, node: int):
        return self._adj[node].keys()

    def link_between(self, a: int, b: int) -> Link:
        try:
            return self._adj[a][b]
        except KeyError:
            raise TopologyError(f"no link between {a} and {b}") from None

    def hosts(self):
        return [n for n in self.nodes if n.kind == HOST]

    def routers(self):
        return [n for n in self.nodes if n.kind == ROUTER]

    # -- routing -----------------------------------------------------------

    def compute_routes(self) -> dict[tuple[int, int], int]:
        """Fill the next-hop table for every (src, dst) pair via BFS from
        each destination. Raises RoutingError naming an unreachable pair.
        """
        table = {}
        ids = range(len(self.nodes))
        for dst in ids:
            dist = {dst: 0}
            frontier = deque([dst])
            while frontier:
                cur = frontier.popleft()
                for nb in self._adj[cur]:
                    if nb not in dist:
                        dist[nb] = dist[cur] + 1
                        frontier.append(nb)
            for src in ids:
                if src == dst:
                    continue
                if src not in dist:
                    raise RoutingError(f"no route from node {src} to node {dst}")
                # Lowest-id neighbor one hop closer to dst wins ties.
                table[(src, dst)] = min(
                    nb for nb in self._adj[src] if dist[nb] == dist[src] - 1
                )
        self._next_hop = table
        self._paths.clear()
        return table

    def next_hop(self, src: int, dst: int) -> int:
        return self._next_hop[(src, dst)]

    def path(self, src: int, dst: int) -> tuple[int, ...]:
        """Full node sequence src..dst; the identity route is empty."""
        if src == dst:
            return ()
        key = (src, dst)
        cached = self._paths.get(key)
        if cached is not None:
            return cached
        path = [src]
        cur = src
        while cur != dst:
            cur = self._next_hop[(cur, dst)]
            path.append(cur)
            if len(path) > len(self.nodes):
                raise RoutingError(f"routing loop between {src} and {dst}")
        result = tuple(path)
        self._paths[key] = result
        return result

    def path_latency_bound(self, path, size_bits: float) -> float:
        """Store-and-forward lower bound: per-hop tx time plus propagation.
        Queuing only ever adds to this.
        """
        total = 0.0
        for a, b in zip(path, path[1:]):
            link = self.link_between(a, b)
            total += transmission_time(size_bits, link.rate_bps) + link.prop_delay_s
        return total


def build_step_topology(params: StepParams) -> Topology:
    """Build the staircase backbone: S steps of K routers chained in
    sequence, the last node of each step linked to the first of the next.
    Yields S*K nodes and S*K - 1 links; (step, offset) metadata is kept
    for reporting.
    """
    s, k = params.steps, params.nodes_per_step
    if s < 1 or k < 1:
        raise TopologyError(f"steps and nodes_per_step must be >= 1, got {s}, {k}")
    topo = Topology()
    for step in range(s):
        for offset in range(k):
            topo.add_node(ROUTER, step=step, offset=offset)
    for left in range(s * k - 1):
        topo.add_link(left, left + 1, params.rate_bps, params.prop_delay_s)
    topo.compute_routes()
    return topo
