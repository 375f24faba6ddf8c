import random

import pytest

from stepnet.errors import RoutingError, TopologyError
from stepnet.netmodel import (
    HOST,
    ROUTER,
    Link,
    StepParams,
    Topology,
    build_step_topology,
    transmission_time,
)

RATE = 10e6
PROP = 5e-6


def test_step_topology_3x2_counts():
    topo = build_step_topology(StepParams(steps=3, nodes_per_step=2))
    assert len(topo.nodes) == 6
    assert len(topo.links) == 5


def test_single_step_degenerates_to_bus_chain():
    topo = build_step_topology(StepParams(steps=1, nodes_per_step=4))
    assert len(topo.nodes) == 4
    assert len(topo.links) == 3


def test_two_single_node_steps():
    topo = build_step_topology(StepParams(steps=2, nodes_per_step=1))
    assert len(topo.nodes) == 2
    assert len(topo.links) == 1


def test_degenerate_parameters_rejected():
    with pytest.raises(TopologyError):
        build_step_topology(StepParams(steps=0, nodes_per_step=2))
    with pytest.raises(TopologyError):
        build_step_topology(StepParams(steps=2, nodes_per_step=0))


def test_step_offset_metadata_recorded():
    topo = build_step_topology(StepParams(steps=2, nodes_per_step=3))
    assert [(n.step, n.offset) for n in topo.nodes] == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
    ]
    assert all(n.kind == ROUTER for n in topo.nodes)


def test_attach_host_grows_topology():
    topo = build_step_topology(StepParams(steps=3, nodes_per_step=2))
    host = topo.attach_host(0, RATE, PROP)
    assert len(topo.nodes) == 7
    assert len(topo.links) == 6
    assert topo.nodes[host].kind == HOST
    assert topo.nodes[host].attached_to == 0


def test_attach_three_hosts_raises_router_degree_by_three():
    topo = build_step_topology(StepParams(steps=3, nodes_per_step=2))
    before = len(topo.neighbors(0))
    for _ in range(3):
        topo.attach_host(0, RATE, PROP)
    assert len(topo.neighbors(0)) == before + 3


def test_attach_to_host_rejected():
    topo = build_step_topology(StepParams(steps=2, nodes_per_step=1))
    host = topo.attach_host(0, RATE, PROP)
    with pytest.raises(TopologyError):
        topo.attach_host(host, RATE, PROP)


def test_attach_to_missing_node_rejected():
    topo = build_step_topology(StepParams(steps=2, nodes_per_step=1))
    with pytest.raises(TopologyError):
        topo.attach_host(99, RATE, PROP)


def test_route_on_path_graph():
    topo = build_step_topology(StepParams(steps=1, nodes_per_step=4))
    assert topo.path(0, 3) == (0, 1, 2, 3)
    assert topo.path(3, 0) == (3, 2, 1, 0)


def test_route_to_self_is_empty():
    topo = build_step_topology(StepParams(steps=1, nodes_per_step=4))
    assert topo.path(2, 2) == ()


def test_equal_hop_ties_resolve_to_lowest_next_hop_id():
    # diamond: 0-1-3 and 0-2-3 are both two hops; 1 must win at node 0
    topo = Topology()
    for _ in range(4):
        topo.add_node(ROUTER)
    topo.add_link(0, 1, RATE, PROP)
    topo.add_link(0, 2, RATE, PROP)
    topo.add_link(1, 3, RATE, PROP)
    topo.add_link(2, 3, RATE, PROP)
    topo.compute_routes()
    assert topo.next_hop(0, 3) == 1
    assert topo.path(0, 3) == (0, 1, 3)


def test_disconnected_graph_names_an_unreachable_pair():
    topo = Topology()
    topo.add_node(ROUTER)
    topo.add_node(ROUTER)
    with pytest.raises(RoutingError, match=r"no route from node \d+ to node \d+"):
        topo.compute_routes()


def test_routes_extended_incrementally_after_attach():
    topo = build_step_topology(StepParams(steps=2, nodes_per_step=2))
    a = topo.attach_host(0, RATE, PROP)
    b = topo.attach_host(3, RATE, PROP)
    assert topo.path(a, b) == (a, 0, 1, 2, 3, b)
    assert topo.path(b, a) == (b, 3, 2, 1, 0, a)


def test_routes_are_loop_free_on_random_shapes():
    rng = random.Random(9)
    for _ in range(20):
        topo = build_step_topology(
            StepParams(steps=rng.randint(1, 5), nodes_per_step=rng.randint(1, 5))
        )
        hosts = [
            topo.attach_host(rng.randrange(len(topo.routers())), RATE, PROP)
            for _ in range(rng.randint(1, 4))
        ]
        n = len(topo.nodes)
        for src in range(n):
            for dst in range(n):
                assert len(topo.path(src, dst)) <= n


def test_transmission_time_arithmetic():
    assert transmission_time(12_000, 10e6) == 0.0012
    assert transmission_time(8_000_000, 10e6) == 0.8
    assert transmission_time(0, 10e6) == 0.0


def test_transmission_time_needs_positive_rate():
    with pytest.raises(TopologyError):
        transmission_time(8, 0)
    with pytest.raises(TopologyError):
        transmission_time(8, -1)


def test_idle_link_departure_and_arrival():
    link = Link(0, 1, 10e6, 5e-6)
    depart, arrive = link.transmit(0, 12_000, 0.0)
    assert depart == 0.0012
    assert arrive == 0.0012 + 5e-6
    assert arrive == pytest.approx(0.001205, rel=1e-12)


def test_busy_link_defers_transmission():
    link = Link(0, 1, 10e6, 0.0)
    link.transmit(0, 100_000, 0.0)  # keeps the direction busy until 0.01
    depart, _ = link.transmit(0, 12_000, 0.005)
    assert depart == 0.01 + 0.0012


def test_back_to_back_packets_separated_by_one_tx_time():
    link = Link(0, 1, 10e6, 5e-6)
    d1, _ = link.transmit(0, 12_000, 0.0)
    d2, _ = link.transmit(0, 12_000, 0.0)
    assert d2 == d1 + 12_000 / 10e6


def test_directions_are_independent():
    link = Link(0, 1, 10e6, 0.0)
    d_ab, _ = link.transmit(0, 80_000, 0.0)
    d_ba, _ = link.transmit(1, 80_000, 0.0)
    assert d_ab == d_ba == 0.008


def test_no_serialization_overlap_over_random_handoffs():
    rng = random.Random(7)
    link = Link(0, 1, 10e6, 1e-5)
    now = 0.0
    last_depart = 0.0
    for _ in range(500):
        now += rng.random() * 0.001
        bits = rng.randrange(8, 120_000)
        depart, arrive = link.transmit(0, bits, now)
        # the new serialization starts only after the previous one finished
        assert depart >= last_depart + bits / 10e6
        assert arrive == depart + 1e-5
        last_depart = depart


def test_invalid_link_parameters_rejected():
    with pytest.raises(TopologyError):
        Link(0, 1, 0.0, 0.0)
    with pytest.raises(TopologyError):
        Link(0, 1, 10e6, -1e-9)


def test_path_latency_bound_sums_tx_and_prop():
    topo = build_step_topology(StepParams(steps=1, nodes_per_step=3, rate_bps=10e6, prop_delay_s=5e-6))
    bound = topo.path_latency_bound(topo.path(0, 2), 12_000)
    assert bound == pytest.approx(2 * (0.0012 + 5e-6), rel=1e-12)
