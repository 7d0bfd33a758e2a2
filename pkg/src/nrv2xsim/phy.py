"""Link budget and threshold decoding.

Deterministic LOS abstraction: free-space-style pathloss, RSRP from the link
budget, SINR against co-channel interferers plus thermal noise, and a fixed
SINR threshold per channel. Transmissions interfere only when they overlap in
both slot and subchannel; different subchannels of one slot are orthogonal.
"""

import math
from dataclasses import dataclass

from .timeline import scs_khz

SUBCARRIERS_PER_RB = 12


@dataclass(frozen=True)
class RadioConfig:
    tx_power_dbm: float = 23.0
    carrier_ghz: float = 5.89
    noise_figure_db: float = 5.0
    noise_psd_dbm_hz: float = -174.0
    antenna_gain_db: float = 0.0
    pssch_sinr_threshold_db: float = 12.0
    pscch_sinr_threshold_db: float = 0.0
    shadowing_sigma_db: float = 0.0


def pathloss_db(distance_m: float, carrier_ghz: float) -> float:
    """LOS pathloss: 32.4 + 20 log10(d_m) + 20 log10(f_GHz)."""
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return 32.4 + 20.0 * math.log10(distance_m) + 20.0 * math.log10(carrier_ghz)


def rsrp_dbm(tx_power_dbm: float, pathloss: float, gains_db: float = 0.0) -> float:
    return tx_power_dbm - pathloss + gains_db


def noise_dbm(occupied_bandwidth_hz: float, cfg: RadioConfig) -> float:
    if occupied_bandwidth_hz <= 0:
        raise ValueError(f"bandwidth must be positive, got {occupied_bandwidth_hz}")
    return cfg.noise_psd_dbm_hz + 10.0 * math.log10(occupied_bandwidth_hz) + cfg.noise_figure_db


def subchannel_bandwidth_hz(subchannel_size_rbs: int, mu: int) -> float:
    return subchannel_size_rbs * SUBCARRIERS_PER_RB * scs_khz(mu) * 1000.0


def _dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def sinr_db(signal_dbm: float, interferer_dbms: list[float], noise_floor_dbm: float) -> float:
    # fsum keeps the linear interference sum order-independent.
    denom_mw = math.fsum(_dbm_to_mw(x) for x in interferer_dbms) + _dbm_to_mw(noise_floor_dbm)
    return signal_dbm - 10.0 * math.log10(denom_mw)


def decode(sinr: float, channel: str, cfg: RadioConfig) -> bool:
    """Threshold decode for 'pssch' or 'pscch'."""
    if channel == "pssch":
        return sinr >= cfg.pssch_sinr_threshold_db
    if channel == "pscch":
        return sinr >= cfg.pscch_sinr_threshold_db
    raise ValueError(f"unknown channel {channel!r}")


def link_margin_db(distance_m: float, subchannel_size_rbs: int, mu: int,
                   cfg: RadioConfig, channel: str = "pssch") -> float:
    """Interference-free SNR margin over the decode threshold at a distance.

    The default thresholds are calibrated so the longest pair distance of the
    highway layout decodes with margin at every numerology; the `calibrate`
    CLI subcommand prints this table.
    """
    pl = pathloss_db(distance_m, cfg.carrier_ghz)
    rx = rsrp_dbm(cfg.tx_power_dbm, pl, cfg.antenna_gain_db)
    n = noise_dbm(subchannel_bandwidth_hz(subchannel_size_rbs, mu), cfg)
    snr = sinr_db(rx, [], n)
    thr = cfg.pssch_sinr_threshold_db if channel == "pssch" else cfg.pscch_sinr_threshold_db
    return snr - thr
