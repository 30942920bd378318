import math

import numpy as np
import pytest

from conftest import ideal, small
from vruaoi.aoi import paoi_from_formula
from vruaoi.config import Architecture, DelayDistribution
from vruaoi.engine import (BOTH, Axis, make_streams, run, run_pair, sweep_density,
                           sweep_interarrival)
from vruaoi.errors import ValidationError
from vruaoi.latency import compose_e2e

MEC, CONV = Architecture.MEC, Architecture.CONVENTIONAL


@pytest.mark.parametrize("period", [0.01, 0.1])
@pytest.mark.parametrize("arch", list(Architecture))
def test_zero_latency_gives_paoi_equal_to_period(arch, period):
    r = run(ideal(architecture=arch, **{"traffic.period": period}))
    assert r.mean_e2e == 0.0
    assert r.paoi.network_paoi == pytest.approx(period, abs=1e-12)
    assert all(v == pytest.approx(period, abs=1e-12) for v in r.paoi.per_vru_paoi.values())


def test_identical_inputs_give_identical_results(small_config):
    a, b = run(small_config), run(small_config)
    assert a == b
    assert a.paoi.per_vru_paoi == b.paoi.per_vru_paoi


def test_different_seeds_differ(small_config):
    assert run(small_config).paoi != run(small_config.replace(seed=1)).paoi


def test_replications_are_independent_streams():
    a = make_streams(7, 0).radio.random(4)
    b = make_streams(7, 1).radio.random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, make_streams(7, 0).radio.random(4))


def test_streams_do_not_overlap():
    s = make_streams(11)
    draws = [g.random(3) for g in s]
    assert len({tuple(d) for d in draws}) == 4


def test_pair_shares_radio_draws_and_gap_is_the_network_term():
    c = small(**{"latency.cloud_cycles_per_sec": 4e9,
                 "latency.backhaul": DelayDistribution.uniform(0.001, 0.006),
                 "latency.core": DelayDistribution.exponential(0.02)})
    pair = run_pair(c, keep_log=True)
    m, v = pair[MEC].per_packet_log, pair[CONV].per_packet_log
    assert np.array_equal(m.t_ul, v.t_ul) and np.array_equal(m.t_dl, v.t_dl)
    assert np.array_equal(m.t_exc, v.t_exc)
    net = v.t_bh + v.t_tn + v.t_cn
    assert np.array_equal(v.e2e - m.e2e, 2 * net)


def test_log_composition_identity(small_config):
    for arch, result in run_pair(small_config, keep_log=True).items():
        log = result.per_packet_log
        for i in range(0, len(log), 37):
            assert log.e2e[i] == compose_e2e(arch, log.breakdown(i))
        if arch is MEC:
            assert not log.t_bh.any() and not log.t_tn.any() and not log.t_cn.any()


def test_conservation_and_causality(small_config):
    r = run(small_config, keep_log=True)
    log = r.per_packet_log
    expected = sum(len(range(o, small_config.horizon, small_config.period_slots))
                   for o in np.unique(log.gen[log.gen < small_config.period_slots]))
    assert r.generated == r.delivered == len(log)
    assert np.all(log.deliver >= log.gen)
    assert np.all(log.gen < small_config.horizon)
    # every VRU transmits exactly once per period
    counts = np.bincount(log.vru)
    assert counts.max() - counts.min() <= 1
    assert expected <= len(log)


def deterministic(**changes):
    """Latency fixed per VRU: no channel randomness, ideal downlink, idle processor."""
    base = {"radio.shadowing_sigma": 0.0, "radio.fading": "none",
            "radio.bandwidth_dl": math.inf, "latency.mec_cycles_per_sec": math.inf,
            "latency.cloud_cycles_per_sec": math.inf,
            "traffic.packet_bits_min": 6000, "traffic.packet_bits_max": 6000}
    base.update(changes)
    return small(**base)


@pytest.mark.parametrize("arch", list(Architecture))
def test_peaks_equal_formula_with_deterministic_latency(arch):
    c = deterministic(architecture=arch)
    r = run(c, keep_log=True)
    log = r.per_packet_log
    post = log.gen >= c.warmup_slots
    assert r.stale == 0
    for k, paoi in r.paoi.per_vru_paoi.items():
        e2e = log.e2e[post & (log.vru == k)]
        assert np.ptp(e2e) == 0
        formula = paoi_from_formula(c.traffic.period, e2e * c.slot_duration)
        assert abs(paoi - formula) <= c.slot_duration


def test_sweep_orders_points_and_pairs_architectures():
    base = small(horizon=2000)
    s = sweep_density(base, [9, 3, 6], replications=2)
    assert s.axis is Axis.DENSITY and list(s.xs) == [3, 6, 9]
    for p in s.points:
        assert set(p.aggregates) == set(BOTH)
        assert p.aggregates[MEC].reps == 2
        assert (p.aggregates[CONV].paoi_mean > p.aggregates[MEC].paoi_mean)


def test_parallel_sweep_is_bit_identical():
    base = small(horizon=1500)
    serial = sweep_interarrival(base, [0.05, 0.02], replications=2, workers=1)
    parallel = sweep_interarrival(base, [0.05, 0.02], replications=2, workers=2)
    assert serial == parallel


def test_sweep_argument_errors():
    with pytest.raises(ValidationError):
        sweep_density(small(), [], 2)
    with pytest.raises(ValidationError):
        sweep_density(small(), [5], 0)
    with pytest.raises(ValidationError):
        sweep_interarrival(small(), [0.0005], 1)


def test_single_replication_has_zero_spread():
    s = sweep_density(small(horizon=1500), [4], replications=1)
    assert s.series(MEC, "paoi_std")[0] == 0.0


def test_empty_cluster_records_no_peak():
    c = small(**{"mobility.vehicles_per_direction": 0})
    with pytest.raises(Exception, match="no VRU"):
        run(c)
