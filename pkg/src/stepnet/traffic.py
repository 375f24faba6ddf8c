"""Packet-level traffic sources for the three application profiles, plus a
Poisson source used only for analytical queue validation.

Profiles (all payload-only sizes, header overhead ignored):

* VoIP  - PCM-quality speech: a 160-byte packet every 20 ms (64 kbps),
          continuous talk, ToS 6.
* Video - low-resolution streaming: one 15,360-byte frame at 10 fps
          (1.2288 Mbps), fragmented at the MTU payload, ToS 4.
* FTP   - bulk background load: a 1,000,000-byte file every 10 s
          (0.8 Mbps mean), fragmented and handed to the access link as a
          back-to-back burst, ToS 0.
"""

import math
import random
from dataclasses import dataclass, field

from .errors import RoutingError
from .qdisc import TrafficClass, classify


@dataclass(slots=True)
class Packet:
    id: int
    flow: str
    cls: TrafficClass
    tos: int
    size: int  # payload bytes
    created: float
    src: int
    dst: int
    path: tuple
    cursor: int = 0  # index into path of the node the packet is at / heading to
    record: object = None  # metrics hook, set by the engine


def fragment(total: int, mtu_payload: int) -> list[int]:
    """Split a message into ceil(total/mtu) payload sizes; all but the last
    equal the MTU payload and the sizes sum to the original total."""
    if total < 1:
        raise ValueError(f"message size must be >= 1 byte, got {total}")
    if mtu_payload < 1:
        raise ValueError(f"mtu payload must be >= 1 byte, got {mtu_payload}")
    full, rest = divmod(total, mtu_payload)
    sizes = [mtu_payload] * full
    if rest:
        sizes.append(rest)
    return sizes


@dataclass
class AppParams:
    voip_interval_s: float = 0.02
    voip_payload_bytes: int = 160
    video_fps: float = 10.0
    video_frame_bytes: int = 15_360
    ftp_interval_s: float = 10.0
    ftp_file_bytes: int = 1_000_000
    mtu_bytes: int = 1500
    poisson_rate_pps: float = 500.0
    poisson_mean_bytes: float = 1250.0

    def validate(self):
        positive = {
            "voip_interval_s": self.voip_interval_s,
            "voip_payload_bytes": self.voip_payload_bytes,
            "video_fps": self.video_fps,
            "video_frame_bytes": self.video_frame_bytes,
            "ftp_interval_s": self.ftp_interval_s,
            "ftp_file_bytes": self.ftp_file_bytes,
            "mtu_bytes": self.mtu_bytes,
            "poisson_rate_pps": self.poisson_rate_pps,
            "poisson_mean_bytes": self.poisson_mean_bytes,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        return self


APPS = ("voip", "video", "ftp", "poisson")

_APP_CLASS = {
    "voip": TrafficClass.VOICE,
    "video": TrafficClass.VIDEO,
    "ftp": TrafficClass.BEST_EFFORT,
    "poisson": TrafficClass.BEST_EFFORT,
}


@dataclass
class FlowSpec:
    name: str
    app: str  # one of APPS
    src: int  # source host node id
    dst: int  # sink host node id
    start: float = 0.0
    stop: float = math.inf
    params: AppParams = field(default_factory=AppParams)

    @property
    def cls(self) -> TrafficClass:
        return _APP_CLASS[self.app]

    @property
    def tos(self) -> int:
        return self.cls.tos


class Source:
    """Deterministic packet process for one flow. generate(now) returns the
    burst emitted at `now` plus the next generation time (None once past
    the stop time)."""

    def __init__(self, spec: FlowSpec, path, id_counter, rng=None):
        self.spec = spec
        self.path = tuple(path)
        self._ids = id_counter
        self.rng = rng
        self.generated = 0
        self._emissions = 0

    @property
    def name(self):
        return self.spec.name

    def first_time(self) -> float:
        return self.spec.start

    def generate(self, now: float):
        spec = self.spec
        if not spec.start <= now < spec.stop:
            raise ValueError(
                f"flow {spec.name}: generate at t={now} outside [{spec.start}, {spec.stop})"
            )
        sizes, next_time = self._emit(now)
        packets = [self._packet(size, now) for size in sizes]
        self.generated += len(packets)
        if next_time is not None and next_time >= spec.stop:
            next_time = None
        return packets, next_time

    def _emit(self, now: float):
        raise NotImplementedError

    def _packet(self, size: int, now: float) -> Packet:
        spec = self.spec
        return Packet(
            id=next(self._ids),
            flow=spec.name,
            cls=spec.cls,
            tos=spec.tos,
            size=size,
            created=now,
            src=spec.src,
            dst=spec.dst,
            path=self.path,
        )


class VoipSource(Source):
    def _emit(self, now):
        p = self.spec.params
        self._emissions += 1
        # start + k*interval, not repeated addition: no cumulative float drift.
        return (
            fragment(p.voip_payload_bytes, p.mtu_bytes),
            self.spec.start + self._emissions * p.voip_interval_s,
        )


class VideoSource(Source):
    def _emit(self, now):
        p = self.spec.params
        self._emissions += 1
        return (
            fragment(p.video_frame_bytes, p.mtu_bytes),
            self.spec.start + self._emissions / p.video_fps,
        )


class FtpSource(Source):
    def _emit(self, now):
        p = self.spec.params
        self._emissions += 1
        return (
            fragment(p.ftp_file_bytes, p.mtu_bytes),
            self.spec.start + self._emissions * p.ftp_interval_s,
        )


class PoissonSource(Source):
    """Exponential inter-arrivals and (integer, >=1 byte) exponential sizes.
    Exists for M/M/1 validation; not part of the application profiles."""

    def _emit(self, now):
        p = self.spec.params
        size = min(p.mtu_bytes, max(1, round(self.rng.expovariate(1.0 / p.poisson_mean_bytes))))
        return [size], now + self.rng.expovariate(p.poisson_rate_pps)


_SOURCE_TYPES = {
    "voip": VoipSource,
    "video": VideoSource,
    "ftp": FtpSource,
    "poisson": PoissonSource,
}


def make_source(spec: FlowSpec, path, id_counter, rng=None) -> Source:
    spec.params.validate()
    if spec.app not in _SOURCE_TYPES:
        raise ValueError(f"unknown app {spec.app!r}")
    return _SOURCE_TYPES[spec.app](spec, path, id_counter, rng)


def sink_receive(store, packet: Packet, node: int, now: float) -> None:
    """Record a delivery at its sink. Delivery to any other host means the
    routing layer misbehaved, which is a hard error."""
    if packet.dst != node:
        raise RoutingError(
            f"packet {packet.id} for node {packet.dst} delivered to node {node}"
        )
    store.on_delivered(packet, now)


def offered_rate_bps(spec: FlowSpec) -> float:
    """Closed-form offered load of a flow at its configured parameters."""
    p = spec.params
    if spec.app == "voip":
        return p.voip_payload_bytes * 8.0 / p.voip_interval_s
    if spec.app == "video":
        return p.video_frame_bytes * p.video_fps * 8.0
    if spec.app == "ftp":
        return p.ftp_file_bytes * 8.0 / p.ftp_interval_s
    if spec.app == "poisson":
        return p.poisson_mean_bytes * p.poisson_rate_pps * 8.0
    raise ValueError(f"unknown app {spec.app!r}")
