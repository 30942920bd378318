"""Time-slotted simulation loop, replication and parameter sweeps.

One replication draws every architecture-independent quantity once (VRU
offsets and positions, packet sizes, vehicle trajectories, radio channels,
network delays) from four seeded substreams, then pushes the same packet
population through each requested architecture.  MEC and conventional runs
of a replication therefore see identical traffic and radio draws.
"""
from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import config as cfgmod
from .aoi import PaoiSummary, network_paoi, peak_samples
from .config import Architecture, ScenarioConfig
from .errors import SimulationError, ValidationError
from .latency import (LatencyBreakdown, Streams, fcfs_slots, network_slots, radio_slots,
                      server_for)
from .traffic import Fleet, farthest_members, place_vrus, spawn_vehicles

BOTH = (Architecture.MEC, Architecture.CONVENTIONAL)


class Axis(str, enum.Enum):
    DENSITY = "density"
    INTERARRIVAL = "interarrival"


@dataclass(frozen=True, eq=False)
class PacketLog:
    """Per-packet record in slots; network terms are zero under MEC."""
    vru: np.ndarray
    gen: np.ndarray
    deliver: np.ndarray
    t_ul: np.ndarray
    t_bh: np.ndarray
    t_tn: np.ndarray
    t_cn: np.ndarray
    t_exc: np.ndarray
    t_dl: np.ndarray
    e2e: np.ndarray
    cluster_size: np.ndarray

    def __len__(self):
        return len(self.gen)

    def breakdown(self, i: int) -> LatencyBreakdown:
        return LatencyBreakdown(*(int(getattr(self, k)[i]) for k in
                                  ("t_ul", "t_bh", "t_tn", "t_cn", "t_exc", "t_dl", "e2e")))


@dataclass(frozen=True)
class SimResult:
    config_digest: str
    seed: int
    replication: int
    architecture: Architecture
    paoi: PaoiSummary
    mean_e2e: float               # seconds
    generated: int
    delivered: int
    stale: int
    per_packet_log: PacketLog | None = field(default=None, compare=False, repr=False)
    runtime: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class Aggregate:
    architecture: Architecture
    paoi_mean: float
    paoi_std: float
    e2e_mean: float
    e2e_std: float
    results: tuple

    @property
    def reps(self) -> int:
        return len(self.results)

    @classmethod
    def of(cls, arch, results) -> "Aggregate":
        paoi = np.array([r.paoi.network_paoi for r in results])
        e2e = np.array([r.mean_e2e for r in results])
        ddof = 1 if len(results) > 1 else 0
        return cls(Architecture(arch), float(paoi.mean()), float(paoi.std(ddof=ddof)),
                   float(e2e.mean()), float(e2e.std(ddof=ddof)), tuple(results))


@dataclass(frozen=True)
class SweepPoint:
    x: float
    aggregates: dict              # Architecture -> Aggregate


@dataclass(frozen=True)
class SweepResult:
    axis: Axis
    points: tuple
    seed: int
    config_digest: str

    def series(self, arch, stat="paoi_mean") -> np.ndarray:
        arch = Architecture(arch)
        return np.array([getattr(p.aggregates[arch], stat) for p in self.points])

    @property
    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points])


def make_streams(seed: int, replication: int = 0) -> Streams:
    """Master seed -> replication -> (traffic, mobility, radio, network)."""
    root = np.random.SeedSequence(seed, spawn_key=(replication,))
    return Streams(*(np.random.default_rng(s) for s in root.spawn(4)))


def _packets(config: ScenarioConfig, offsets: np.ndarray):
    """Generation slots and owners of every packet, ordered by (slot, VRU)."""
    period, horizon = config.period_slots, config.horizon
    counts = np.maximum(0, (horizon - offsets + period - 1) // period)
    vru = np.repeat(np.arange(len(offsets)), counts)
    first = np.repeat(np.cumsum(counts) - counts, counts)
    gen = offsets[vru] + period * (np.arange(vru.size) - first)
    order = np.lexsort((vru, gen))
    return gen[order], vru[order]


def _clusters(config: ScenarioConfig, gen, vru_x, fleet: Fleet, chunk: int = 20_000):
    """Farthest approaching member per packet, snapshotted at generation."""
    far_x = np.full(gen.size, np.nan)
    size = np.zeros(gen.size, dtype=np.int64)
    slots, row = np.unique(gen, return_inverse=True)
    pos, speed, ids = fleet.snapshots(slots)
    for a in range(0, gen.size, chunk):
        r = row[a:a + chunk]
        idx, n = farthest_members(vru_x[a:a + chunk], pos[r], speed[r], ids[r],
                                  config.cluster_radius)
        hit = np.flatnonzero(idx >= 0)
        far_x[a + hit] = pos[r[hit], idx[hit]]
        size[a:a + chunk] = n
    return far_x, size


def _simulate(config: ScenarioConfig, archs, replication: int = 0, keep_log: bool = False):
    started = time.perf_counter()
    cfgmod.check_valid(config)
    st = make_streams(config.seed, replication)
    m, dt = config.mobility, config.slot_duration

    vrus = place_vrus(config, st.traffic)
    offsets = np.array([v.offset_slots for v in vrus], dtype=np.int64)
    vru_pos = np.array([v.position for v in vrus])
    gen, vru = _packets(config, offsets)
    n = gen.size
    bits = st.traffic.integers(config.traffic.packet_bits_min,
                               config.traffic.packet_bits_max + 1, n)
    cohort = np.bincount(offsets, minlength=config.period_slots)[offsets[vru]]

    fleet = Fleet(spawn_vehicles(m, st.mobility), m, dt, st.mobility)
    far_x, cluster_size = _clusters(config, gen, vru_pos[vru], fleet)

    # geometry: VRU area on one side of the road, eNB on the other
    lateral = m.vru_setback + m.enb_setback
    d_ul = np.hypot(vru_pos[vru] - m.enb_position, lateral)
    # an empty cluster still gets its broadcast; aim it at the VRU's own spot
    target_x = np.where(np.isnan(far_x), vru_pos[vru], far_x)
    d_dl = np.hypot(target_x - m.enb_position, m.enb_setback)

    t_ul = radio_slots(bits, d_ul, cohort, config, st.radio, downlink=False)
    t_dl = radio_slots(bits, d_dl, cohort, config, st.radio, downlink=True)
    bh, tn, cn = network_slots(config, st.network, n)
    cycles = bits * config.latency.cycles_per_bit

    post = gen >= config.warmup_slots
    runtime = time.perf_counter() - started
    results = {}
    for arch in archs:
        t0 = time.perf_counter()
        arch = Architecture(arch)
        results[arch] = _finish(config, arch, replication, gen, vru, cycles, t_ul, t_dl,
                                bh, tn, cn, cluster_size, post, keep_log)
        results[arch] = _with_runtime(results[arch], runtime + time.perf_counter() - t0)
    return results


def _with_runtime(result: SimResult, runtime: float) -> SimResult:
    return SimResult(**{**result.__dict__, "runtime": runtime})


def _finish(config, arch, replication, gen, vru, cycles, t_ul, t_dl, bh, tn, cn,
            cluster_size, post, keep_log) -> SimResult:
    n = gen.size
    if arch is Architecture.CONVENTIONAL:
        net = bh + tn + cn
    else:
        net = np.zeros(n, dtype=np.int64)
        bh = tn = cn = net
    arrive = gen + t_ul + net
    order = np.lexsort((np.arange(n), arrive))
    t_exc = np.empty(n, dtype=np.int64)
    t_exc[order] = fcfs_slots(arrive[order], cycles[order], server_for(arch, config))
    deliver = arrive + t_exc + net + t_dl
    e2e = deliver - gen

    sums, counts, stale = peak_samples(vru, gen, deliver, (cluster_size > 0) & post,
                                       config.traffic.num_vrus)
    per_vru = {k: float(sums[k] / counts[k]) * config.slot_duration
               for k in np.flatnonzero(counts).tolist()}
    if not post.any():
        raise SimulationError("horizon leaves no packets after warmup")
    mean_e2e = float(e2e[post].mean()) * config.slot_duration
    summary = PaoiSummary(per_vru, network_paoi(per_vru), mean_e2e, arch)
    log = None
    if keep_log:
        log = PacketLog(vru, gen, deliver, t_ul, bh, tn, cn, t_exc, t_dl, e2e, cluster_size)
    return SimResult(cfgmod.digest(config), config.seed, replication, arch, summary, mean_e2e,
                     generated=n, delivered=int(np.count_nonzero(deliver >= gen)),
                     stale=stale, per_packet_log=log)


def run(config: ScenarioConfig, replication: int = 0, keep_log: bool = False) -> SimResult:
    """Simulate ``config.architecture`` for one replication."""
    arch = Architecture(config.architecture)
    return _simulate(config, (arch,), replication, keep_log)[arch]


def run_pair(config: ScenarioConfig, replication: int = 0, keep_log: bool = False) -> dict:
    """Both architectures on common random numbers."""
    return _simulate(config, BOTH, replication, keep_log)


def _job(args):
    config, replication, archs = args
    return _simulate(config, archs, replication)


def _sweep(axis, configs, xs, replications, workers, archs, base) -> SweepResult:
    if replications < 1:
        raise ValidationError("replications ≥ 1")
    archs = tuple(Architecture(a) for a in archs)
    pairs = sorted(zip(xs, configs), key=lambda p: p[0])
    jobs = [(cfg, rep, archs) for _, cfg in pairs for rep in range(replications)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_job, jobs))   # map keeps submission order
    else:
        outcomes = [_job(j) for j in jobs]
    points = []
    for i, (x, _) in enumerate(pairs):
        chunk = outcomes[i * replications:(i + 1) * replications]
        aggs = {a: Aggregate.of(a, [o[a] for o in chunk]) for a in archs}
        points.append(SweepPoint(float(x), aggs))
    return SweepResult(Axis(axis), tuple(points), base.seed, cfgmod.digest(base))


def sweep_density(base: ScenarioConfig, k_values, replications: int = 20, workers: int = 1,
                  archs=BOTH) -> SweepResult:
    if len(k_values) == 0:
        raise ValidationError("k_values must be non-empty")
    configs = [cfgmod.check_valid(base.replace(**{"traffic.num_vrus": int(k)})) for k in k_values]
    return _sweep(Axis.DENSITY, configs, [int(k) for k in k_values], replications, workers,
                  archs, base)


def sweep_interarrival(base: ScenarioConfig, t_values, replications: int = 20, workers: int = 1,
                       archs=BOTH) -> SweepResult:
    """Sweep the message period; ``t_values`` are in seconds."""
    if len(t_values) == 0:
        raise ValidationError("t_values must be non-empty")
    configs = [cfgmod.check_valid(base.replace(**{"traffic.period": float(t)})) for t in t_values]
    return _sweep(Axis.INTERARRIVAL, configs, [float(t) for t in t_values], replications,
                  workers, archs, base)
