import math

import pytest

from vruaoi.config import DelayDistribution, calibrated_defaults


def small(**changes):
    """A few seconds of traffic from a handful of VRUs; fast enough for unit tests."""
    base = {"horizon": 4000, "traffic.num_vrus": 12}
    base.update(changes)
    return calibrated_defaults().replace(**base)


def ideal(**changes):
    """Every latency component forced to zero."""
    zero = DelayDistribution.constant(0.0)
    base = {
        "radio.bandwidth_ul": math.inf, "radio.bandwidth_dl": math.inf,
        "latency.backhaul": zero, "latency.transport": zero, "latency.core": zero,
        "latency.mec_cycles_per_sec": math.inf, "latency.cloud_cycles_per_sec": math.inf,
    }
    base.update(changes)
    return small(**base)


@pytest.fixture
def small_config():
    return small()
