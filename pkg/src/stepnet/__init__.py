"""stepnet: a deterministic packet-level network simulator for comparing
queuing disciplines (FIFO, strict priority, weighted round robin) under
voice, video, and bulk-transfer traffic on step topologies.
"""

from .engine import Engine, RunSummary
from .errors import (
    MetricsError,
    RoutingError,
    ScenarioError,
    SchedulingError,
    SimulationError,
    TopologyError,
)
from .kernel import EventCalendar, SimTime
from .metrics import MetricStore, delay_variation, e2e_delay, jitter_rfc
from .netmodel import (
    Link,
    Node,
    StepParams,
    Topology,
    build_step_topology,
    transmission_time,
)
from .qdisc import (
    CLASS_ORDER,
    Classifier,
    QdiscConfig,
    TrafficClass,
    Verdict,
    build_qdisc,
    classify,
)
from .reports import emit_csv, emit_svg, sweep
from .scenario import RunResult, ScenarioConfig, parse_scenario, run_scenario
from .traffic import AppParams, FlowSpec, Packet, fragment, sink_receive

__version__ = "0.1.0"

__all__ = [
    "AppParams",
    "CLASS_ORDER",
    "Classifier",
    "Engine",
    "EventCalendar",
    "FlowSpec",
    "Link",
    "MetricStore",
    "MetricsError",
    "Node",
    "Packet",
    "QdiscConfig",
    "RoutingError",
    "RunResult",
    "RunSummary",
    "ScenarioConfig",
    "ScenarioError",
    "SchedulingError",
    "SimTime",
    "SimulationError",
    "StepParams",
    "Topology",
    "TopologyError",
    "TrafficClass",
    "Verdict",
    "build_qdisc",
    "build_step_topology",
    "classify",
    "delay_variation",
    "e2e_delay",
    "emit_csv",
    "emit_svg",
    "fragment",
    "jitter_rfc",
    "parse_scenario",
    "run_scenario",
    "sink_receive",
    "sweep",
    "transmission_time",
]
