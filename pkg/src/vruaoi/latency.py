"""Per-packet latency components and their end-to-end composition.

The conventional path adds backhaul, transport and core network delay twice
(towards the remote cloud and back); the MEC path processes the packet at
the host collocated with the radio node and skips them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .config import Architecture, ProcessingModel, ScenarioConfig
from .errors import DomainError
from .radio import draw_channel, equal_share, link_rate, pathloss_db, received_power_dbm

# guards ceil() against float noise such as 0.007 / 0.001 = 7.000000000000001
_SLOT_EPS = 1e-9


@dataclass(frozen=True)
class LatencyBreakdown:
    t_ul: float
    t_bh: float
    t_tn: float
    t_cn: float
    t_exc: float
    t_dl: float
    e2e: float

    @classmethod
    def compose(cls, arch, t_ul, t_bh, t_tn, t_cn, t_exc, t_dl) -> "LatencyBreakdown":
        if Architecture(arch) is Architecture.MEC:
            t_bh = t_tn = t_cn = 0 * t_bh
        parts = cls(t_ul, t_bh, t_tn, t_cn, t_exc, t_dl, 0)
        return replace(parts, e2e=compose_e2e(arch, parts))


@dataclass(frozen=True)
class ProcessingQueue:
    capacity_cycles_per_sec: float
    busy_until: float = 0.0     # absolute, seconds


class Streams(NamedTuple):
    """Independent random streams of one replication."""
    traffic: np.random.Generator
    mobility: np.random.Generator
    radio: np.random.Generator
    network: np.random.Generator


def to_slots(seconds, slot_duration: float):
    """Round a duration up to whole slots (array-aware)."""
    slots = np.ceil(np.asarray(seconds, dtype=float) / slot_duration - _SLOT_EPS)
    slots = np.maximum(slots, 0)
    return int(slots) if slots.ndim == 0 else slots.astype(np.int64)


def transmission_latency(packet_bits, rate, slot_duration: float = 1e-3) -> float:
    """Air time of a packet in seconds, rounded up to whole slots."""
    if rate <= 0:
        raise DomainError("transmission over a zero-rate link never completes")
    if packet_bits == 0:
        return 0.0
    return to_slots(packet_bits / rate, slot_duration) * slot_duration


def process(queue: ProcessingQueue, arrival: float, packet_bits, cycles_per_bit):
    """FCFS single-server processing; returns (t_exc, updated queue)."""
    service = _service_time(packet_bits, cycles_per_bit, queue.capacity_cycles_per_sec)
    start = max(arrival, queue.busy_until)
    done = start + service
    return done - arrival, ProcessingQueue(queue.capacity_cycles_per_sec, done)


def _service_time(packet_bits, cycles_per_bit, capacity):
    if math.isinf(capacity):
        return 0.0
    return packet_bits * cycles_per_bit / capacity


class SlotServer:
    """FCFS server driven by integer slot arrivals.

    Keeps only the backlog relative to the previous arrival, so two servers
    fed arrival sequences that differ by a constant slot shift perform
    identical floating-point operations and return identical results.
    """

    def __init__(self, capacity_cycles_per_sec, slot_duration, model=ProcessingModel.QUEUE):
        if math.isinf(capacity_cycles_per_sec):
            self.cycles_per_slot = math.inf
        else:
            self.cycles_per_slot = capacity_cycles_per_sec * slot_duration
        self.queueing = ProcessingModel(model) is ProcessingModel.QUEUE
        self.backlog = 0.0      # slots of work left, measured from last_arrival
        self.last_arrival = None
        self.busy_slots = 0.0

    def serve(self, arrival_slot: int, cycles: float) -> int:
        """Whole slots from arrival until the packet leaves the server."""
        service = 0.0 if math.isinf(self.cycles_per_slot) else cycles / self.cycles_per_slot
        self.busy_slots += service
        if not self.queueing:
            return max(0, math.ceil(service - _SLOT_EPS))
        if self.last_arrival is not None:
            self.backlog = max(0.0, self.backlog - (arrival_slot - self.last_arrival))
        self.last_arrival = arrival_slot
        self.backlog += service
        return max(0, math.ceil(self.backlog - _SLOT_EPS))


def fcfs_slots(arrival_slots, cycles, server: SlotServer) -> np.ndarray:
    """Batch form of ``[server.serve(a, c) for a, c in ...]`` for sorted arrivals."""
    if math.isinf(server.cycles_per_slot):
        service = [0.0] * len(cycles)
    else:
        service = (np.asarray(cycles, dtype=float) / server.cycles_per_slot).tolist()
    server.busy_slots += math.fsum(service)
    eps, ceil = _SLOT_EPS, math.ceil
    if not server.queueing:
        return np.array([max(0, ceil(s - eps)) for s in service], dtype=np.int64)
    out = []
    append = out.append
    backlog, last = server.backlog, server.last_arrival
    for a, s in zip(np.asarray(arrival_slots).tolist(), service):
        if last is not None:
            backlog -= a - last
            if backlog < 0.0:
                backlog = 0.0
        last = a
        backlog += s
        w = ceil(backlog - eps)
        append(w if w > 0 else 0)
    server.backlog, server.last_arrival = backlog, last
    return np.array(out, dtype=np.int64)


def compose_e2e(arch, parts: LatencyBreakdown):
    if Architecture(arch) is Architecture.CONVENTIONAL:
        return parts.t_ul + 2 * (parts.t_bh + parts.t_tn + parts.t_cn) + parts.t_exc + parts.t_dl
    return parts.t_ul + parts.t_exc + parts.t_dl


def network_slots(config: ScenarioConfig, rng, size):
    """Backhaul, transport and core delays in slots, one sample each per packet."""
    lat = config.latency
    return tuple(to_slots(dist.sample(rng, size), config.slot_duration)
                 for dist in (lat.backhaul, lat.transport, lat.core))


def radio_slots(bits, distance, cohort, config: ScenarioConfig, rng, *, downlink: bool):
    """Air time in slots for packets sharing their pool with ``cohort`` peers."""
    r = config.radio
    pool, power = (r.bandwidth_dl, r.tx_power_enb) if downlink else (r.bandwidth_ul, r.tx_power_ue)
    shadowing, fading = draw_channel(r, rng, np.shape(bits))
    pl = pathloss_db(distance, r.carrier_freq, r.h_enb, r.h_ue)
    share = equal_share(pool, cohort)
    _, rate = link_rate(share, received_power_dbm(power, pl, shadowing, fading), r.noise_density)
    if np.any(rate <= 0):
        raise DomainError("unreachable link: zero achievable rate")
    with np.errstate(divide="ignore", invalid="ignore"):
        seconds = np.where(np.asarray(bits) == 0, 0.0, bits / rate)
    return to_slots(seconds, config.slot_duration)


def packet_journey(bits: int, ul_distance: float, dl_distance: float, cohort: int,
                   arrival_slot: int, server: SlotServer, config: ScenarioConfig,
                   streams: Streams, arch=None) -> LatencyBreakdown:
    """Latency components, in slots, of one packet generated at ``arrival_slot``.

    ``cohort`` is the number of VRUs generating in the same slot; uplink and
    downlink pools are split equally among them.  Network delays are drawn
    for both architectures so the random streams stay paired.
    """
    arch = Architecture(config.architecture if arch is None else arch)
    t_ul = int(radio_slots(np.array([bits]), ul_distance, cohort, config, streams.radio,
                           downlink=False)[0])
    t_dl = int(radio_slots(np.array([bits]), dl_distance, cohort, config, streams.radio,
                           downlink=True)[0])
    bh, tn, cn = (int(x[0]) for x in network_slots(config, streams.network, 1))
    up = bh + tn + cn if arch is Architecture.CONVENTIONAL else 0
    t_exc = server.serve(arrival_slot + t_ul + up, bits * config.latency.cycles_per_bit)
    return LatencyBreakdown.compose(arch, t_ul, bh, tn, cn, t_exc, t_dl)


def server_for(arch, config: ScenarioConfig) -> SlotServer:
    lat = config.latency
    capacity = lat.mec_cycles_per_sec if Architecture(arch) is Architecture.MEC else lat.cloud_cycles_per_sec
    return SlotServer(capacity, config.slot_duration, lat.processing_model)
