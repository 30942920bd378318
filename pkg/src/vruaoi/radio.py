"""Link budget, achievable rate and the equal-share scheduler.

All functions accept numpy arrays as well as scalars; the engine evaluates
whole packet populations in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Fading, RadioParams
from .errors import DomainError


@dataclass(frozen=True)
class LinkState:
    distance: float      # m
    pathloss: float      # dB
    shadowing: float     # dB, added to the pathloss
    fading_power: float  # linear, unit mean under Rayleigh
    snr: float           # dB over the allocated bandwidth
    rate: float          # bit/s over the allocated bandwidth


def pathloss_db(d, f_c, h_enb, h_ue):
    """Distance-dependent pathloss in dB.

    ``d`` in meters, ``f_c`` in GHz, antenna heights in meters.  Effective
    heights are ``h - 1.0``, so both heights must exceed one meter.
    """
    d = np.asarray(d, dtype=float)
    h_enb_eff = np.asarray(h_enb, dtype=float) - 1.0
    h_ue_eff = np.asarray(h_ue, dtype=float) - 1.0
    f_c = np.asarray(f_c, dtype=float)
    for name, arg in (("d", d), ("h_enb - 1", h_enb_eff), ("h_ue - 1", h_ue_eff), ("f_c", f_c)):
        if not np.all(arg > 0):
            raise DomainError(f"pathloss undefined: {name} must be > 0")
    pl = (22.7 * np.log10(d) - 17.3 * np.log10(h_enb_eff) - 17.3 * np.log10(h_ue_eff)
          + 2.7 * np.log10(f_c) - 7.56)
    return float(pl) if pl.ndim == 0 else pl


def noise_dbm(noise_density, bandwidth):
    with np.errstate(divide="ignore"):
        return noise_density + 10.0 * np.log10(bandwidth)


def shannon_rate(bandwidth, snr_db):
    """``bandwidth * log2(1 + snr)`` with the SNR given in dB."""
    bandwidth = np.asarray(bandwidth, dtype=float)
    if np.any(bandwidth < 0):
        raise DomainError("bandwidth must be ≥ 0")
    gain = np.log2(1.0 + np.power(10.0, np.asarray(snr_db, dtype=float) / 10.0))
    with np.errstate(invalid="ignore"):
        rate = np.where(bandwidth == 0, 0.0, bandwidth * gain)
    return float(rate) if rate.ndim == 0 else rate


def link_rate(bandwidth, rx_power_dbm, noise_density):
    """Rate and SNR with thermal noise integrated over ``bandwidth``.

    An infinite bandwidth models an ideal link and yields an infinite rate.
    """
    bandwidth = np.asarray(bandwidth, dtype=float)
    snr = rx_power_dbm - noise_dbm(noise_density, bandwidth)
    ideal = np.isinf(bandwidth)
    rate = np.where(ideal, np.inf, shannon_rate(np.where(ideal, 1.0, bandwidth), snr))
    return snr, rate


def equal_share(total_bandwidth, active_count):
    """Continuous equal split of a bandwidth pool among ``active_count`` users."""
    active_count = np.asarray(active_count)
    if np.any(active_count < 1):
        raise DomainError("equal_share needs at least one active user")
    share = total_bandwidth / active_count
    return float(share) if np.ndim(share) == 0 else share


def draw_channel(radio: RadioParams, rng, size=None):
    """Shadowing (dB) and fading power samples; shadowing is drawn first."""
    if radio.shadowing_sigma > 0:
        shadowing = rng.normal(0.0, radio.shadowing_sigma, size)
    else:
        shadowing = np.zeros(size) if size is not None else 0.0
    if Fading(radio.fading) is Fading.RAYLEIGH:
        fading = rng.exponential(1.0, size)
    else:
        fading = np.ones(size) if size is not None else 1.0
    return shadowing, fading


def received_power_dbm(tx_power_dbm, pathloss, shadowing, fading_power):
    with np.errstate(divide="ignore"):
        return tx_power_dbm - pathloss - shadowing + 10.0 * np.log10(fading_power)


def sample_link(d, radio: RadioParams, rng, *, bandwidth=None, tx_power_dbm=None) -> LinkState:
    """Draw one link realisation at distance ``d``.

    Defaults describe an uplink from a UE over the whole UL pool; pass
    ``bandwidth`` for an allocated share and ``tx_power_dbm`` for the eNB.
    """
    bandwidth = radio.bandwidth_ul if bandwidth is None else bandwidth
    tx_power_dbm = radio.tx_power_ue if tx_power_dbm is None else tx_power_dbm
    pl = pathloss_db(d, radio.carrier_freq, radio.h_enb, radio.h_ue)
    shadowing, fading = draw_channel(radio, rng)
    rx = received_power_dbm(tx_power_dbm, pl, shadowing, fading)
    snr, rate = link_rate(bandwidth, rx, radio.noise_density)
    return LinkState(float(d), pl, float(shadowing), float(fading), float(snr), float(rate))
