"""Age-of-information tracking and peak-AoI statistics.

Slot convention: after ``step_age(tracker, t, g)`` the tracker holds the age
observed at the end of slot ``t``, i.e. ``t - g + 1`` for an update generated
in slot ``g`` and received in slot ``t``.  Between updates the age grows by one
per slot.  The peak recorded at a delivery is the age reached just before the
update lands, ``t - g_prev``, which equals the inter-generation gap plus the
new packet's end-to-end latency.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Architecture
from .errors import ContractError, EmptyError, InsufficientData


@dataclass
class AoiTracker:
    vru_id: int
    current_age: int | None = None
    last_delivered_generation: int | None = None
    last_slot: int | None = None
    peaks: list = field(default_factory=list)
    deliveries: int = 0
    stale: int = 0


@dataclass(frozen=True)
class PaoiSummary:
    per_vru_paoi: dict          # vru id -> seconds
    network_paoi: float         # seconds
    mean_e2e: float             # seconds
    architecture: Architecture


def step_age(tracker: AoiTracker, t: int, delivery: int | None = None,
             record_peak: bool = True) -> AoiTracker:
    """Advance the tracker to slot ``t``, optionally applying a delivery.

    ``t`` may jump ahead; skipped slots carry no delivery.  A delivery older
    than the freshest one already applied is counted as stale and ignored.
    ``record_peak=False`` applies the update without sampling its peak.
    """
    if tracker.last_slot is not None and t <= tracker.last_slot:
        raise ContractError(f"slot must advance: got {t} after {tracker.last_slot}")
    if delivery is not None and delivery > t:
        raise ContractError(f"packet generated at {delivery} cannot arrive at {t}")
    gap = 1 if tracker.last_slot is None else t - tracker.last_slot
    tracker.last_slot = t
    fresh = delivery is not None and (
        tracker.last_delivered_generation is None or delivery > tracker.last_delivered_generation)
    if not fresh:
        if delivery is not None:
            tracker.stale += 1
        if tracker.current_age is not None:
            tracker.current_age += gap
        return tracker
    if tracker.current_age is not None and record_peak:
        tracker.peaks.append(tracker.current_age + gap - 1)
    tracker.current_age = t - delivery + 1
    tracker.last_delivered_generation = delivery
    tracker.deliveries += 1
    return tracker


def paoi_from_formula(period: float, e2e_samples) -> float:
    """Peak AoI of a periodic source: period plus mean end-to-end latency."""
    if len(e2e_samples) == 0:
        raise EmptyError("no latency samples")
    return period + float(np.mean(e2e_samples))


def paoi_from_peaks(tracker: AoiTracker, slot_duration: float) -> float:
    if not tracker.peaks:
        raise InsufficientData(f"VRU {tracker.vru_id}: need two deliveries for a peak")
    return float(np.mean(tracker.peaks)) * slot_duration


def network_paoi(per_vru: dict) -> float:
    if not per_vru:
        raise EmptyError("no VRU has a peak-AoI sample")
    return float(np.mean(list(per_vru.values())))


def peak_samples(vru, gen, deliver, record, num_vrus: int):
    """Vectorised equivalent of replaying every delivery through :func:`step_age`.

    Deliveries of one VRU landing in the same slot collapse to the freshest.
    Returns per-VRU peak sums and counts (in slots) and the stale count.
    """
    vru, gen, deliver = (np.asarray(a, dtype=np.int64) for a in (vru, gen, deliver))
    record = np.asarray(record, dtype=bool)
    order = np.lexsort((gen, deliver, vru))
    v, g, d, rec = vru[order], gen[order], deliver[order], record[order]
    n = v.size
    last_of_slot = np.ones(n, dtype=bool)
    last_of_slot[:-1] = (v[1:] != v[:-1]) | (d[1:] != d[:-1])
    # freshest generation applied so far, per VRU, before each row
    first_row = np.ones(n, dtype=bool)
    first_row[1:] = v[1:] != v[:-1]
    offset = v * (int(g.max(initial=0)) + 2)          # keeps the running max within one VRU
    running = np.maximum.accumulate(np.where(last_of_slot, g, -1) + offset) - offset
    prev = np.empty(n, dtype=np.int64)
    prev[1:] = running[:-1]
    prev[first_row] = -1
    applied = last_of_slot & (g > prev)
    has_prev = applied & (prev >= 0)
    peaks = d - prev
    take = has_prev & rec
    sums = np.bincount(v[take], weights=peaks[take], minlength=num_vrus)
    counts = np.bincount(v[take], minlength=num_vrus)
    return sums, counts, int(n - applied.sum())
