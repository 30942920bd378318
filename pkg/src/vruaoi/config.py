"""Scenario configuration: domain types, JSON ingestion and validation.

A config file is a single JSON object.  Every section and key is optional;
missing values take the calibrated defaults defined on the dataclasses below.
Unknown keys are rejected so that a typo never silently falls back to a
default.  Units are fixed: seconds, slots, meters, m/s, Hz, GHz, dBm, dB,
bits and CPU cycles.  See ``docs/config-schema.md`` for the full schema.
"""
from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParseError, ValidationError


class Architecture(str, enum.Enum):
    CONVENTIONAL = "conventional"
    MEC = "mec"


class Fading(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    NONE = "none"


class OffsetMode(str, enum.Enum):
    UNIFORM_IN_PERIOD = "uniform_in_period"


class ProcessingModel(str, enum.Enum):
    QUEUE = "queue"
    CONSTANT = "constant"


# parameter names per distribution kind, in serialization order
_DELAY_PARAMS = {
    "constant": ("value",),
    "uniform": ("low", "high"),
    "exponential": ("mean",),
}


@dataclass(frozen=True)
class DelayDistribution:
    """Per-packet delay law for one network segment, in seconds."""

    kind: str = "constant"
    params: tuple[float, ...] = (0.0,)

    @classmethod
    def constant(cls, value: float) -> "DelayDistribution":
        return cls("constant", (float(value),))

    @classmethod
    def uniform(cls, low: float, high: float) -> "DelayDistribution":
        return cls("uniform", (float(low), float(high)))

    @classmethod
    def exponential(cls, mean: float) -> "DelayDistribution":
        return cls("exponential", (float(mean),))

    @property
    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return self.params[0]

    def sample(self, rng, size=None):
        if self.kind == "constant":
            if size is None:
                return self.params[0]
            return np.full(size, self.params[0])
        if self.kind == "uniform":
            return rng.uniform(self.params[0], self.params[1], size)
        return rng.exponential(self.params[0], size)

    def violations(self, name: str) -> list[str]:
        if self.kind not in _DELAY_PARAMS:
            return [f"{name}.kind in {sorted(_DELAY_PARAMS)}"]
        if len(self.params) != len(_DELAY_PARAMS[self.kind]):
            return [f"{name}: {self.kind} takes {_DELAY_PARAMS[self.kind]}"]
        out = []
        for pname, v in zip(_DELAY_PARAMS[self.kind], self.params):
            if not _finite(v) or v < 0:
                out.append(f"{name}.{pname} ≥ 0 and finite")
        if self.kind == "uniform" and not out and self.params[0] > self.params[1]:
            out.append(f"{name}: low ≤ high")
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(zip(_DELAY_PARAMS[self.kind], self.params))}


@dataclass(frozen=True)
class RadioParams:
    carrier_freq: float = 2.0          # GHz
    bandwidth_ul: float = 10e3         # Hz, pool reserved for VRU traffic
    bandwidth_dl: float = 10e3         # Hz
    tx_power_ue: float = 23.0          # dBm
    tx_power_enb: float = 46.0         # dBm
    noise_density: float = -174.0      # dBm/Hz
    h_enb: float = 25.0                # m
    h_ue: float = 1.5                  # m
    shadowing_sigma: float = 4.0       # dB
    fading: Fading = Fading.RAYLEIGH


@dataclass(frozen=True)
class TrafficParams:
    num_vrus: int = 100
    period: float = 0.1                # s
    packet_bits_min: int = 4000
    packet_bits_max: int = 8000
    offset_mode: OffsetMode = OffsetMode.UNIFORM_IN_PERIOD


@dataclass(frozen=True)
class MobilityParams:
    road_length: float = 2000.0        # m
    v_min: float = 22.0                # m/s
    v_max: float = 39.0                # m/s
    vehicles_per_direction: int = 20
    vru_area_position: float = 1000.0  # m along the road
    vru_area_length: float = 50.0      # m; VRUs spread uniformly over it
    vru_setback: float = 30.0          # m lateral distance, VRU area to road
    enb_position: float = 1000.0       # m along the road
    enb_setback: float = 20.0          # m lateral distance, eNB to road


@dataclass(frozen=True)
class LatencyParams:
    backhaul: DelayDistribution = DelayDistribution.constant(0.004)
    transport: DelayDistribution = DelayDistribution.constant(0.015)
    core: DelayDistribution = DelayDistribution.constant(0.030)
    mec_cycles_per_sec: float = 4e9
    cloud_cycles_per_sec: float = 4e10
    cycles_per_bit: float = 20.0
    processing_model: ProcessingModel = ProcessingModel.QUEUE


@dataclass(frozen=True)
class ScenarioConfig:
    slot_duration: float = 1e-3        # s
    horizon: int = 60_000              # slots
    warmup: int | None = None          # slots; None means 5 periods
    seed: int = 20200
    architecture: Architecture = Architecture.MEC
    cluster_radius: float = 200.0      # m
    radio: RadioParams = field(default_factory=RadioParams)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    mobility: MobilityParams = field(default_factory=MobilityParams)
    latency: LatencyParams = field(default_factory=LatencyParams)

    @property
    def period_slots(self) -> int:
        return int(round(self.traffic.period / self.slot_duration))

    @property
    def warmup_slots(self) -> int:
        if self.warmup is None:
            return 5 * self.period_slots
        return self.warmup

    def replace(self, **changes) -> "ScenarioConfig":
        """Copy with top-level fields or dotted nested fields replaced.

        >>> cfg = ScenarioConfig().replace(**{"traffic.num_vrus": 150})
        >>> cfg.traffic.num_vrus
        150
        """
        top, nested = {}, {}
        for key, value in changes.items():
            if "." in key:
                section, name = key.split(".", 1)
                nested.setdefault(section, {})[name] = value
            else:
                top[key] = value
        for section, values in nested.items():
            top[section] = dataclasses.replace(getattr(self, section), **values)
        return dataclasses.replace(self, **top)


def calibrated_defaults() -> ScenarioConfig:
    """The shipped parameter preset.

    Values are calibration choices, tuned so that K=150, T=100 ms lands near
    160 ms (MEC) and 258 ms (conventional) network PAoI.  They are not taken
    from any published parameter table.
    """
    return ScenarioConfig()


PRESETS = {"calibrated": calibrated_defaults}


# -- validation ---------------------------------------------------------------

def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def _positive(x, allow_inf=False) -> bool:
    try:
        return x > 0 and (allow_inf or math.isfinite(x))
    except TypeError:
        return False


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate(config: ScenarioConfig) -> list[str]:
    """Return every violated invariant; an empty list means valid.

    Never raises.  NaN and infinities are violations, except that resource
    capacities (bandwidths, CPU rates) may be +inf to model an ideal,
    zero-latency resource.
    """
    out: list[str] = []

    def check(ok, message):
        try:
            good = bool(ok())
        except Exception:
            good = False
        if not good:
            out.append(message)

    c = config
    check(lambda: _positive(c.slot_duration), "slot_duration > 0")
    check(lambda: _is_int(c.horizon) and c.horizon >= 1, "horizon ≥ 1 slot")
    check(lambda: c.warmup is None or (_is_int(c.warmup) and c.warmup >= 0), "warmup ≥ 0")
    check(lambda: not _is_int(c.horizon) or c.horizon > c.warmup_slots, "horizon > warmup")
    check(lambda: _is_int(c.seed) and 0 <= c.seed < 2**64, "seed is a 64-bit unsigned integer")
    check(lambda: Architecture(c.architecture), "architecture in {conventional, mec}")
    check(lambda: _positive(c.cluster_radius), "cluster_radius > 0")

    r = c.radio
    check(lambda: _positive(r.carrier_freq), "carrier_freq > 0")
    check(lambda: _positive(r.bandwidth_ul, allow_inf=True), "bandwidth_ul > 0")
    check(lambda: _positive(r.bandwidth_dl, allow_inf=True), "bandwidth_dl > 0")
    for name in ("tx_power_ue", "tx_power_enb", "noise_density"):
        check(lambda name=name: _finite(getattr(r, name)), f"{name} is finite")
    check(lambda: _finite(r.h_enb) and r.h_enb > 1.0, "h_enb > 1.0")
    check(lambda: _finite(r.h_ue) and r.h_ue > 1.0, "h_ue > 1.0")
    check(lambda: _finite(r.shadowing_sigma) and r.shadowing_sigma >= 0, "shadowing_sigma ≥ 0")
    check(lambda: Fading(r.fading), "fading in {rayleigh, none}")

    t = c.traffic
    check(lambda: _is_int(t.num_vrus) and t.num_vrus >= 1, "num_vrus ≥ 1")
    check(lambda: _finite(t.period) and t.period >= c.slot_duration, "period ≥ slot_duration")
    check(
        lambda: not (_finite(t.period) and _positive(c.slot_duration))
        or abs(t.period / c.slot_duration - round(t.period / c.slot_duration)) < 1e-6,
        "period is a whole number of slots",
    )
    check(lambda: _is_int(t.packet_bits_min) and t.packet_bits_min > 0, "l_min > 0")
    check(lambda: _is_int(t.packet_bits_max), "l_max is an integer")
    check(
        lambda: not (_is_int(t.packet_bits_min) and _is_int(t.packet_bits_max))
        or t.packet_bits_min <= t.packet_bits_max,
        "l_min ≤ l_max",
    )
    check(lambda: OffsetMode(t.offset_mode), "offset_mode in {uniform_in_period}")

    m = c.mobility
    check(lambda: _positive(m.road_length), "road_length > 0")
    check(lambda: _positive(m.v_min), "v_min > 0")
    check(lambda: _finite(m.v_max) and m.v_min <= m.v_max, "v_min ≤ v_max")
    check(lambda: _is_int(m.vehicles_per_direction) and m.vehicles_per_direction >= 0,
          "vehicles_per_direction ≥ 0")
    check(lambda: _finite(m.vru_area_length) and m.vru_area_length >= 0, "vru_area_length ≥ 0")
    for name in ("vru_area_position", "enb_position"):
        check(lambda name=name: _finite(getattr(m, name)), f"{name} is finite")
    check(lambda: _finite(m.vru_setback), "vru_setback is finite")
    check(lambda: _finite(m.enb_setback), "enb_setback is finite")

    lat = c.latency
    for name in ("backhaul", "transport", "core"):
        dist = getattr(lat, name)
        try:
            out.extend(dist.violations(name))
        except Exception:
            out.append(f"{name} is a DelayDistribution")
    check(lambda: _positive(lat.mec_cycles_per_sec, allow_inf=True), "mec_cycles_per_sec > 0")
    check(lambda: _positive(lat.cloud_cycles_per_sec, allow_inf=True), "cloud_cycles_per_sec > 0")
    check(lambda: _finite(lat.cycles_per_bit) and lat.cycles_per_bit >= 0, "cycles_per_bit ≥ 0")
    check(lambda: ProcessingModel(lat.processing_model), "processing_model in {queue, constant}")
    return out


def check_valid(config: ScenarioConfig) -> ScenarioConfig:
    problems = validate(config)
    if problems:
        raise ValidationError(problems)
    return config


# -- (de)serialization --------------------------------------------------------

_SECTIONS = {
    "radio": RadioParams,
    "traffic": TrafficParams,
    "mobility": MobilityParams,
    "latency": LatencyParams,
}
_ENUMS = {
    "architecture": Architecture,
    "fading": Fading,
    "offset_mode": OffsetMode,
    "processing_model": ProcessingModel,
}
_DELAY_FIELDS = ("backhaul", "transport", "core")
_INT_FIELDS = {"horizon", "warmup", "seed", "num_vrus", "packet_bits_min",
               "packet_bits_max", "vehicles_per_direction"}


def _plain(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, DelayDistribution):
        return value.to_dict()
    return value


def to_dict(config: ScenarioConfig) -> dict:
    out: dict[str, Any] = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name in _SECTIONS:
            out[f.name] = {g.name: _plain(getattr(value, g.name))
                           for g in dataclasses.fields(value)}
        else:
            out[f.name] = _plain(value)
    return out


def dumps(config: ScenarioConfig) -> str:
    return json.dumps(to_dict(config), indent=2, sort_keys=False, allow_nan=True)


def save_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(dumps(config) + "\n")


def digest(config: ScenarioConfig) -> str:
    """Short stable hash of the full parameter set (seed included)."""
    blob = json.dumps(to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _convert(name: str, value):
    if name in _ENUMS:
        try:
            return _ENUMS[name](value)
        except ValueError:
            allowed = ", ".join(e.value for e in _ENUMS[name])
            raise ParseError(f"{name}: {value!r} is not one of {{{allowed}}}") from None
    if name in _DELAY_FIELDS:
        return _delay_from_dict(name, value)
    if name in _INT_FIELDS:
        if value is None and name == "warmup":
            return None
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not _is_int(value):
            raise ParseError(f"{name}: expected an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{name}: expected a number, got {value!r}")
    return float(value)


def _delay_from_dict(name: str, data) -> DelayDistribution:
    if not isinstance(data, dict) or "kind" not in data:
        raise ParseError(f"{name}: expected an object with a 'kind' key")
    kind = data["kind"]
    if kind not in _DELAY_PARAMS:
        raise ParseError(f"{name}.kind: {kind!r} is not one of {sorted(_DELAY_PARAMS)}")
    expected = set(_DELAY_PARAMS[kind]) | {"kind"}
    if set(data) != expected:
        raise ParseError(f"{name}: {kind} takes exactly {sorted(expected - {'kind'})}")
    params = []
    for pname in _DELAY_PARAMS[kind]:
        v = data[pname]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{name}.{pname}: expected a number, got {v!r}")
        params.append(float(v))
    return DelayDistribution(kind, tuple(params))


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ParseError(f"{where or 'config'}: expected a JSON object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        prefix = f"{where}." if where else ""
        raise ParseError("unknown key(s): " + ", ".join(prefix + k for k in unknown))
    kwargs = {}
    for name, value in data.items():
        if name in _SECTIONS:
            kwargs[name] = _build(_SECTIONS[name], value, name)
        else:
            kwargs[name] = _convert(name, value)
    return cls(**kwargs)


def from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a config from parsed JSON; defaults fill the gaps."""
    config = _build(ScenarioConfig, data, "")
    return check_valid(config)


def loads(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    return from_dict(data)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
