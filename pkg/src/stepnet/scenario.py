"""Scenario files: a flat, sectioned key=value format and its runner.

A scenario is the machine-readable form of an experiment: the simulated
duration and seed, the step-topology shape, one queuing-discipline
configuration applied to every router port, the host attachments, and a
list of flows. `[flow]` sections repeat; all other sections appear once.

Host groups (`count = N`) declare N hosts `name.0 .. name.N-1`, each with
its own access link. A flow with `count = M` expands to M replicas spread
round-robin over its source and destination groups, optionally staggered
in start time.
"""

import math
from dataclasses import dataclass, field, replace

from .engine import Engine, RunSummary
from .errors import ScenarioError
from .metrics import MetricStore
from .netmodel import StepParams, Topology, build_step_topology
from .qdisc import CLASS_ORDER, QdiscConfig, TrafficClass
from .traffic import APPS, AppParams, FlowSpec


@dataclass
class HostGroup:
    name: str
    router: int
    count: int = 1
    rate_bps: float | None = None  # None: inherit the topology link profile
    prop_delay_s: float | None = None


@dataclass
class FlowEntry:
    name: str
    app: str
    src: str
    dst: str
    count: int = 1
    start_s: float = 0.0
    stop_s: float | None = None
    stagger_s: float = 0.0
    params: AppParams = field(default_factory=AppParams)


@dataclass
class ScenarioConfig:
    duration_s: float
    seed: int = 0
    window_s: float = 1.0
    warmup_s: float = 0.0
    detail: bool = False
    steps: int = 1
    nodes_per_step: int = 2
    link_rate_bps: float = 10_000_000.0
    prop_delay_s: float = 5e-6
    qdisc: QdiscConfig = field(default_factory=QdiscConfig)
    hosts: list[HostGroup] = field(default_factory=list)
    flows: list[FlowEntry] = field(default_factory=list)


_SIM_KEYS = {"duration_s", "seed", "window_s", "warmup_s", "detail"}
_TOPOLOGY_KEYS = {"steps", "nodes_per_step", "link_rate_bps", "prop_delay_s"}
_QDISC_KEYS = {
    "kind",
    "fifo_capacity",
    "pq_capacity_voice",
    "pq_capacity_video",
    "pq_capacity_best_effort",
    "wfq_capacity",
    "wfq_weight_voice",
    "wfq_weight_video",
    "wfq_weight_best_effort",
}
_FLOW_KEYS = {
    "name",
    "app",
    "src",
    "dst",
    "count",
    "start_s",
    "stop_s",
    "stagger_s",
    "voip_interval_s",
    "voip_payload_bytes",
    "video_fps",
    "video_frame_bytes",
    "ftp_interval_s",
    "ftp_file_bytes",
    "mtu_bytes",
    "poisson_rate_pps",
    "poisson_mean_bytes",
}
_HOST_ATTR_KEYS = {"router", "count", "rate_bps", "prop_delay_s"}
_SECTIONS = {"sim", "topology", "qdisc", "hosts", "flow"}
_REQUIRED_SECTIONS = ("sim", "topology", "qdisc")

_CLASS_SUFFIX = {
    "voice": TrafficClass.VOICE,
    "video": TrafficClass.VIDEO,
    "best_effort": TrafficClass.BEST_EFFORT,
}


class _Errors:
    def __init__(self):
        self.items = []

    def add(self, lineno, message):
        if lineno is None:
            self.items.append(f"scenario: {message}")
        else:
            self.items.append(f"line {lineno}: {message}")

    def raise_if_any(self):
        if self.items:
            raise ScenarioError(self.items)


def _parse_number(raw, kind, lineno, errors, key):
    try:
        value = int(raw) if kind is int else float(raw)
    except ValueError:
        errors.add(lineno, f"{key}: expected {'an integer' if kind is int else 'a number'}, got {raw!r}")
        return None
    if kind is float and not math.isfinite(value):
        errors.add(lineno, f"{key}: value must be finite, got {raw!r}")
        return None
    return value


def _positive(value, lineno, errors, key):
    if value is not None and value <= 0:
        errors.add(lineno, f"{key}: must be positive, got {value}")
        return None
    return value


def _non_negative(value, lineno, errors, key):
    if value is not None and value < 0:
        errors.add(lineno, f"{key}: must be >= 0, got {value}")
        return None
    return value


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and validate scenario text. Raises ScenarioError carrying every
    problem found (with line numbers), not just the first."""
    errors = _Errors()
    sections = _split_sections(text, errors)

    seen = {name for name, _, _ in sections}
    for required in _REQUIRED_SECTIONS:
        if required not in seen:
            errors.add(None, f"missing required section [{required}]")

    config = ScenarioConfig(duration_s=0.0)
    single_seen = {}
    for name, lineno, entries in sections:
        if name in ("sim", "topology", "qdisc", "hosts"):
            if name in single_seen:
                errors.add(lineno, f"duplicate section [{name}] (first at line {single_seen[name]})")
                continue
            single_seen[name] = lineno
        if name == "sim":
            _parse_sim(entries, config, errors)
        elif name == "topology":
            _parse_topology(entries, config, errors)
        elif name == "qdisc":
            _parse_qdisc(entries, config, errors)
        elif name == "hosts":
            _parse_hosts(entries, config, errors)
        elif name == "flow":
            _parse_flow(entries, lineno, config, errors)

    _cross_validate(config, errors, "sim" in seen)
    errors.raise_if_any()
    return config


def _split_sections(text, errors):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                errors.add(lineno, f"unknown section [{name}]")
                current = None
                continue
            current = (name, lineno, [])
            sections.append(current)
            continue
        if "=" not in line:
            errors.add(lineno, f"expected `key = value`, got {line!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if current is None:
            errors.add(lineno, f"{key}: key outside of any section")
            continue
        current[2].append((lineno, key, value))
    return sections


def _check_keys(entries, allowed, section, errors):
    out = {}
    for lineno, key, value in entries:
        if key not in allowed:
            errors.add(lineno, f"unknown key {key!r} in section [{section}]")
            continue
        if key in out:
            errors.add(lineno, f"duplicate key {key!r} in section [{section}]")
            continue
        out[key] = (lineno, value)
    return out


def _parse_sim(entries, config, errors):
    values = _check_keys(entries, _SIM_KEYS, "sim", errors)
    if "duration_s" not in values:
        errors.add(None, "missing required key duration_s in section [sim]")
    for key, (lineno, raw) in values.items():
        if key == "duration_s":
            v = _positive(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                config.duration_s = v
        elif key == "seed":
            v = _parse_number(raw, int, lineno, errors, key)
            if v is not None:
                config.seed = v
        elif key == "window_s":
            v = _positive(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                config.window_s = v
        elif key == "warmup_s":
            v = _non_negative(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                config.warmup_s = v
        elif key == "detail":
            norm = raw.replace("-", "_")
            if norm not in ("summary", "per_hop"):
                errors.add(lineno, f"detail: expected summary or per_hop, got {raw!r}")
            else:
                config.detail = norm == "per_hop"


def _parse_topology(entries, config, errors):
    values = _check_keys(entries, _TOPOLOGY_KEYS, "topology", errors)
    for required in ("steps", "nodes_per_step"):
        if required not in values:
            errors.add(None, f"missing required key {required} in section [topology]")
    for key, (lineno, raw) in values.items():
        if key in ("steps", "nodes_per_step"):
            v = _parse_number(raw, int, lineno, errors, key)
            if v is not None and v < 1:
                errors.add(lineno, f"{key}: must be >= 1, got {v}")
            elif v is not None:
                setattr(config, key, v)
        elif key == "link_rate_bps":
            v = _positive(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                config.link_rate_bps = v
        elif key == "prop_delay_s":
            v = _non_negative(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                config.prop_delay_s = v


def _parse_qdisc(entries, config, errors):
    values = _check_keys(entries, _QDISC_KEYS, "qdisc", errors)
    if "kind" not in values:
        errors.add(None, "missing required key kind in section [qdisc]")
    qc = config.qdisc
    for key, (lineno, raw) in values.items():
        if key == "kind":
            if raw not in ("fifo", "pq", "wfq"):
                errors.add(lineno, f"kind: expected fifo, pq or wfq, got {raw!r}")
            else:
                qc.kind = raw
            continue
        v = _parse_number(raw, int, lineno, errors, key)
        if v is None:
            continue
        if v < 1:
            errors.add(lineno, f"{key}: must be >= 1, got {v}")
            continue
        if key == "fifo_capacity":
            qc.fifo_capacity = v
        elif key == "wfq_capacity":
            qc.wfq_capacity = v
        elif key.startswith("pq_capacity_"):
            qc.pq_capacity[_CLASS_SUFFIX[key.removeprefix("pq_capacity_")]] = v
        elif key.startswith("wfq_weight_"):
            qc.wfq_weights[_CLASS_SUFFIX[key.removeprefix("wfq_weight_")]] = v


def _parse_hosts(entries, config, errors):
    names = set()
    for lineno, name, raw in entries:
        if name in names:
            errors.add(lineno, f"duplicate host group {name!r}")
            continue
        names.add(name)
        group = HostGroup(name=name, router=-1)
        seen_attrs = set()
        for token in raw.split():
            if "=" not in token:
                errors.add(lineno, f"host {name}: expected attr=value tokens, got {token!r}")
                continue
            attr, value = token.split("=", 1)
            if attr not in _HOST_ATTR_KEYS:
                errors.add(lineno, f"host {name}: unknown attribute {attr!r}")
                continue
            if attr in seen_attrs:
                errors.add(lineno, f"host {name}: duplicate attribute {attr!r}")
                continue
            seen_attrs.add(attr)
            if attr == "router":
                v = _non_negative(_parse_number(value, int, lineno, errors, attr), lineno, errors, attr)
                if v is not None:
                    group.router = v
            elif attr == "count":
                v = _parse_number(value, int, lineno, errors, attr)
                if v is not None and v < 1:
                    errors.add(lineno, f"host {name}: count must be >= 1, got {v}")
                elif v is not None:
                    group.count = v
            elif attr == "rate_bps":
                group.rate_bps = _positive(
                    _parse_number(value, float, lineno, errors, attr), lineno, errors, attr
                )
            elif attr == "prop_delay_s":
                group.prop_delay_s = _non_negative(
                    _parse_number(value, float, lineno, errors, attr), lineno, errors, attr
                )
        if "router" not in seen_attrs:
            errors.add(lineno, f"host {name}: missing required attribute router=<id>")
            continue
        config.hosts.append(group)


def _parse_flow(entries, header_line, config, errors):
    values = _check_keys(entries, _FLOW_KEYS, "flow", errors)
    entry = FlowEntry(name=f"flow{len(config.flows)}", app="", src="", dst="")
    for required in ("app", "src", "dst"):
        if required not in values:
            errors.add(header_line, f"flow: missing required key {required}")
    for key, (lineno, raw) in values.items():
        if key == "name":
            entry.name = raw
        elif key == "app":
            if raw not in APPS:
                errors.add(lineno, f"app: expected one of {', '.join(APPS)}, got {raw!r}")
            else:
                entry.app = raw
        elif key in ("src", "dst"):
            setattr(entry, key, raw)
        elif key == "count":
            v = _parse_number(raw, int, lineno, errors, key)
            if v is not None and v < 1:
                errors.add(lineno, f"count: must be >= 1, got {v}")
            elif v is not None:
                entry.count = v
        elif key == "start_s":
            v = _non_negative(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                entry.start_s = v
        elif key == "stop_s":
            v = _positive(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                entry.stop_s = v
        elif key == "stagger_s":
            v = _non_negative(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                entry.stagger_s = v
        elif key in ("voip_payload_bytes", "video_frame_bytes", "ftp_file_bytes", "mtu_bytes"):
            v = _positive(_parse_number(raw, int, lineno, errors, key), lineno, errors, key)
            if v is not None:
                setattr(entry.params, key, v)
        else:
            v = _positive(_parse_number(raw, float, lineno, errors, key), lineno, errors, key)
            if v is not None:
                setattr(entry.params, key, v)
    if entry.stop_s is not None and entry.stop_s <= entry.start_s:
        errors.add(header_line, f"flow {entry.name}: stop_s must exceed start_s")
    config.flows.append(entry)


def _cross_validate(config, errors, have_sim):
    groups = {g.name: g for g in config.hosts}
    backbone = config.steps * config.nodes_per_step
    for group in config.hosts:
        if group.router >= backbone:
            errors.add(
                None,
                f"host {group.name}: router {group.router} does not exist "
                f"(backbone has nodes 0..{backbone - 1})",
            )
    names = set()
    for entry in config.flows:
        if entry.name in names:
            errors.add(None, f"duplicate flow name {entry.name!r}")
        names.add(entry.name)
        for end in ("src", "dst"):
            ref = getattr(entry, end)
            if ref and ref not in groups:
                errors.add(None, f"flow {entry.name}: {end} references undeclared host {ref!r}")
        if entry.src in groups and entry.dst in groups:
            src_group, dst_group = groups[entry.src], groups[entry.dst]
            for k in range(entry.count):
                if (entry.src, k % src_group.count) == (entry.dst, k % dst_group.count):
                    errors.add(
                        None,
                        f"flow {entry.name}: replica {k} has identical src and dst host",
                    )
                    break
        if have_sim and config.duration_s > 0 and entry.start_s >= config.duration_s:
            errors.add(None, f"flow {entry.name}: start_s lies beyond the simulation duration")


@dataclass
class RunResult:
    config: ScenarioConfig
    qdisc_kind: str
    seed: int
    duration_s: float
    topology: Topology
    host_ids: dict[str, list[int]]
    flows: list[FlowSpec]
    store: MetricStore
    run: RunSummary


def expand_flows(config: ScenarioConfig, host_ids, duration_s: float) -> list[FlowSpec]:
    """Turn flow entries into concrete per-replica FlowSpecs with resolved
    host node ids and staggered start times."""
    specs = []
    for entry in config.flows:
        src_hosts = host_ids[entry.src]
        dst_hosts = host_ids[entry.dst]
        stop = entry.stop_s if entry.stop_s is not None else duration_s
        for k in range(entry.count):
            name = entry.name if entry.count == 1 else f"{entry.name}[{k}]"
            specs.append(
                FlowSpec(
                    name=name,
                    app=entry.app,
                    src=src_hosts[k % len(src_hosts)],
                    dst=dst_hosts[k % len(dst_hosts)],
                    start=entry.start_s + k * entry.stagger_s,
                    stop=stop,
                    params=entry.params,
                )
            )
    return specs


def build_topology(config: ScenarioConfig):
    """Backbone plus host attachments; returns (topology, name -> node ids)."""
    topo = build_step_topology(
        StepParams(
            steps=config.steps,
            nodes_per_step=config.nodes_per_step,
            rate_bps=config.link_rate_bps,
            prop_delay_s=config.prop_delay_s,
        )
    )
    host_ids: dict[str, list[int]] = {}
    for group in config.hosts:
        rate = group.rate_bps if group.rate_bps is not None else config.link_rate_bps
        delay = group.prop_delay_s if group.prop_delay_s is not None else config.prop_delay_s
        host_ids[group.name] = [
            topo.attach_host(group.router, rate, delay) for _ in range(group.count)
        ]
    return topo, host_ids


def run_scenario(
    config: ScenarioConfig,
    seed: int | None = None,
    qdisc_kind: str | None = None,
    duration_s: float | None = None,
    detail: bool | None = None,
) -> RunResult:
    """Wire the scenario up and run it to its duration. Deterministic for a
    fixed (config, seed): rerunning yields identical metrics."""
    duration = duration_s if duration_s is not None else config.duration_s
    used_seed = seed if seed is not None else config.seed
    qdisc = config.qdisc if qdisc_kind is None else replace(config.qdisc, kind=qdisc_kind)
    use_detail = config.detail if detail is None else detail

    topo, host_ids = build_topology(config)
    flows = expand_flows(config, host_ids, duration)
    store = MetricStore(window=config.window_s, warmup=config.warmup_s, detail=use_detail)
    engine = Engine(topo, qdisc, flows, store, seed=used_seed)
    summary = engine.run(duration)
    return RunResult(
        config=config,
        qdisc_kind=qdisc.kind,
        seed=used_seed,
        duration_s=duration,
        topology=topo,
        host_ids=host_ids,
        flows=flows,
        store=store,
        run=summary,
    )
