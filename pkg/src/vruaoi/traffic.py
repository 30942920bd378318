"""VRU message schedules, vehicle kinematics and target clusters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MobilityParams, ScenarioConfig


@dataclass(frozen=True)
class VruAgent:
    id: int
    offset_slots: int
    period_slots: int
    position: float          # m along the road
    packet_bits_min: int
    packet_bits_max: int

    def draw_bits(self, rng, size=None):
        return rng.integers(self.packet_bits_min, self.packet_bits_max + 1, size)


@dataclass(frozen=True)
class VehicleAgent:
    id: int
    position: float          # m along the road
    speed: float             # m/s; the sign is the driving direction
    in_coverage: bool = True


@dataclass(frozen=True)
class Cluster:
    vru_id: int
    member_ids: frozenset
    farthest_member: int | None


def generation_times(vru: VruAgent, horizon: int) -> list[int]:
    """Slots ``offset + n * period`` for n = 0, 1, ... that fall before ``horizon``."""
    return list(range(vru.offset_slots, max(horizon, 0), vru.period_slots))


def draw_offsets(k: int, period_slots: int, rng) -> np.ndarray:
    return rng.integers(0, period_slots, k)


def place_vrus(config: ScenarioConfig, rng) -> list[VruAgent]:
    """Offsets first, then positions, both from the traffic stream."""
    t, m = config.traffic, config.mobility
    offsets = draw_offsets(t.num_vrus, config.period_slots, rng)
    half = 0.5 * m.vru_area_length
    positions = m.vru_area_position + rng.uniform(-half, half, t.num_vrus)
    return [
        VruAgent(k, int(offsets[k]), config.period_slots, float(positions[k]),
                 t.packet_bits_min, t.packet_bits_max)
        for k in range(t.num_vrus)
    ]


def spawn_vehicles(mobility: MobilityParams, rng) -> list[VehicleAgent]:
    """Initial population: forward lane first, then the reverse lane."""
    n = mobility.vehicles_per_direction
    positions = rng.uniform(0.0, mobility.road_length, 2 * n)
    speeds = rng.uniform(mobility.v_min, mobility.v_max, 2 * n)
    speeds[n:] *= -1.0
    return [VehicleAgent(i, float(positions[i]), float(speeds[i])) for i in range(2 * n)]


def step_mobility(vehicles, dt: float, mobility: MobilityParams, rng) -> list[VehicleAgent]:
    """Advance every vehicle by ``dt`` seconds.

    A vehicle that leaves the segment is replaced, in list order, by a fresh
    entrant at the boundary of its direction with a newly drawn speed.
    """
    next_id = max((v.id for v in vehicles), default=-1) + 1
    out = []
    for v in vehicles:
        x = v.position + v.speed * dt
        if x > mobility.road_length or x < 0.0:
            speed = float(rng.uniform(mobility.v_min, mobility.v_max))
            if v.speed > 0:
                out.append(VehicleAgent(next_id, 0.0, speed))
            else:
                out.append(VehicleAgent(next_id, mobility.road_length, -speed))
            next_id += 1
        else:
            out.append(VehicleAgent(v.id, x, v.speed, v.in_coverage))
    return out


def compute_cluster(vru: VruAgent, vehicles, cluster_radius: float) -> Cluster:
    members = []
    for v in vehicles:
        gap = vru.position - v.position
        if v.in_coverage and abs(gap) <= cluster_radius and gap * v.speed > 0:
            members.append((abs(gap), -v.id, v.id))
    if not members:
        return Cluster(vru.id, frozenset(), None)
    farthest = max(members)[2]
    return Cluster(vru.id, frozenset(m[2] for m in members), farthest)


class Fleet:
    """Array-backed vehicle population evaluated in closed form.

    Equivalent to calling :func:`step_mobility` once per slot: each vehicle
    keeps (entry slot, entry position, speed) and its position at slot ``t``
    is ``entry_pos + speed * dt * (t - entry_slot)``.  Replacements are applied
    lazily, in (exit slot, index) order, so the speed draws consume the
    mobility stream in the same order as per-slot stepping.
    """

    def __init__(self, vehicles, mobility: MobilityParams, slot_duration: float, rng):
        self.mobility = mobility
        self.dt = slot_duration
        self.rng = rng
        self.ids = np.array([v.id for v in vehicles], dtype=np.int64)
        self.entry_slot = np.zeros(len(vehicles), dtype=np.int64)
        self.entry_pos = np.array([v.position for v in vehicles], dtype=float)
        self.speed = np.array([v.speed for v in vehicles], dtype=float)
        self.next_id = int(self.ids.max()) + 1 if len(vehicles) else 0
        self.exit_slot = np.array([self._exit_slot(i) for i in range(len(vehicles))],
                                  dtype=np.int64)
        # per vehicle index: (entry_slot, entry_pos, speed, id) of every occupant
        self.history = [[(0, self.entry_pos[i], self.speed[i], int(self.ids[i]))]
                        for i in range(len(vehicles))]

    def _outside(self, i, k) -> bool:
        x = self.entry_pos[i] + self.speed[i] * self.dt * k
        return x > self.mobility.road_length or x < 0.0

    def _exit_slot(self, i) -> int:
        v = self.speed[i]
        room = self.mobility.road_length - self.entry_pos[i] if v > 0 else self.entry_pos[i]
        k = int(np.floor(room / (abs(v) * self.dt))) + 1
        # the closed form can be off by one slot through rounding
        while k > 1 and self._outside(i, k - 1):
            k -= 1
        while not self._outside(i, k):
            k += 1
        return int(self.entry_slot[i]) + k

    def advance_to(self, t: int) -> None:
        while len(self.exit_slot) and self.exit_slot.min() <= t:
            due = np.flatnonzero(self.exit_slot == self.exit_slot.min())
            slot = int(self.exit_slot[due[0]])
            for i in due:
                speed = float(self.rng.uniform(self.mobility.v_min, self.mobility.v_max))
                forward = self.speed[i] > 0
                self.ids[i] = self.next_id
                self.next_id += 1
                self.entry_slot[i] = slot
                self.entry_pos[i] = 0.0 if forward else self.mobility.road_length
                self.speed[i] = speed if forward else -speed
                self.exit_slot[i] = self._exit_slot(i)
                self.history[i].append((slot, self.entry_pos[i], self.speed[i], int(self.ids[i])))

    def positions_at(self, t: int) -> np.ndarray:
        self.advance_to(t)
        return self.entry_pos + self.speed * self.dt * (t - self.entry_slot)

    def snapshots(self, slots: np.ndarray):
        """Positions, speeds and ids at each of the sorted ``slots``.

        Returns three arrays of shape (len(slots), number of vehicles).
        """
        slots = np.asarray(slots, dtype=np.int64)
        shape = (slots.size, len(self.history))
        pos, speed = np.empty(shape), np.empty(shape)
        ids = np.empty(shape, dtype=np.int64)
        if slots.size == 0:
            return pos, speed, ids
        self.advance_to(int(slots[-1]))
        for j, segs in enumerate(self.history):
            entry, x0, v, vid = (np.array(c) for c in zip(*segs))
            k = np.searchsorted(entry, slots, side="right") - 1
            pos[:, j] = x0[k] + v[k] * self.dt * (slots - entry[k])
            speed[:, j] = v[k]
            ids[:, j] = vid[k]
        return pos, speed, ids

    def agents_at(self, t: int) -> list[VehicleAgent]:
        x = self.positions_at(t)
        return [VehicleAgent(int(i), float(p), float(s)) for i, p, s in zip(self.ids, x, self.speed)]


def farthest_members(vru_x: np.ndarray, veh_x: np.ndarray, veh_speed: np.ndarray,
                     veh_ids: np.ndarray, cluster_radius: float):
    """Vectorised :func:`compute_cluster` reduced to the farthest member.

    Vehicle arrays are either shared, shape (m,), or given per VRU row,
    shape (n, m).  Returns (column index of the farthest member or -1,
    cluster size) per VRU.
    """
    n = vru_x.shape[0]
    if veh_x.shape[-1] == 0:
        return np.full(n, -1), np.zeros(n, dtype=np.int64)
    veh_x, veh_speed, veh_ids = (np.broadcast_to(a, (n, veh_x.shape[-1]))
                                 for a in (veh_x, veh_speed, veh_ids))
    gap = vru_x[:, None] - veh_x
    member = (np.abs(gap) <= cluster_radius) & (gap * veh_speed > 0)
    dist = np.where(member, np.abs(gap), -1.0)
    best = dist.max(axis=1)
    tied = member & (dist == best[:, None])
    best_id = np.where(tied, veh_ids, np.iinfo(np.int64).max).min(axis=1)
    rows, cols = np.nonzero(tied & (veh_ids == best_id[:, None]))
    out = np.full(n, -1)
    out[rows] = cols
    return out, member.sum(axis=1)
