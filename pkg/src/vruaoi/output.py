"""Plot-ready result tables and their serialization.

All times are written in milliseconds.  Floats are rendered with ``repr`` so
that reading a file back reproduces every value bit for bit.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .config import Architecture
from .engine import Axis, SimResult, SweepResult
from .errors import EmptyError

COLUMNS = ("axis", "arch", "paoi_ms_mean", "paoi_ms_std", "e2e_ms_mean", "e2e_ms_std",
           "reps", "seed", "config_digest")


@dataclass(frozen=True)
class OutputRecord:
    axis: float           # K for density sweeps, T in ms for inter-arrival sweeps
    arch: str
    paoi_ms_mean: float
    paoi_ms_std: float
    e2e_ms_mean: float
    e2e_ms_std: float
    reps: int
    seed: int
    config_digest: str


def records_from_sweep(sweep: SweepResult) -> list[OutputRecord]:
    """One row per (axis value, architecture), sorted by value then name."""
    rows = []
    for point in sweep.points:
        x = point.x * 1e3 if sweep.axis is Axis.INTERARRIVAL else point.x
        for arch in sorted(point.aggregates, key=lambda a: Architecture(a).value):
            agg = point.aggregates[arch]
            rows.append(OutputRecord(
                float(x), Architecture(arch).value,
                agg.paoi_mean * 1e3, agg.paoi_std * 1e3, agg.e2e_mean * 1e3, agg.e2e_std * 1e3,
                agg.reps, sweep.seed, sweep.config_digest,
            ))
    rows.sort(key=lambda r: (r.axis, r.arch))
    return rows


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def render(records, fmt: str = "csv") -> str:
    if not records:
        raise EmptyError("no records to write")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in records:
            writer.writerow([_cell(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([dataclasses.asdict(r) for r in records], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


def write_results(records, fmt: str, path) -> None:
    text = render(records, fmt)
    Path(path).write_text(text)


def read_results(path, fmt: str = "csv") -> list[OutputRecord]:
    text = Path(path).read_text()
    if fmt == "json":
        return [OutputRecord(**row) for row in json.loads(text)]
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        OutputRecord(float(r["axis"]), r["arch"], float(r["paoi_ms_mean"]),
                     float(r["paoi_ms_std"]), float(r["e2e_ms_mean"]), float(r["e2e_ms_std"]),
                     int(r["reps"]), int(r["seed"]), r["config_digest"])
        for r in rows
    ]


def result_to_dict(result: SimResult) -> dict:
    return {
        "architecture": result.architecture.value,
        "seed": result.seed,
        "replication": result.replication,
        "config_digest": result.config_digest,
        "time_unit": "ms",
        "paoi_ms": result.paoi.network_paoi * 1e3,
        "e2e_ms_mean": result.mean_e2e * 1e3,
        "packets_generated": result.generated,
        "packets_delivered": result.delivered,
        "stale_deliveries": result.stale,
        "per_vru_paoi_ms": {str(k): v * 1e3 for k, v in sorted(result.paoi.per_vru_paoi.items())},
    }
