"""KPI collection and export: packet inter-reception and simultaneous transmissions.

PIR gaps are taken between the generation timestamps of successfully delivered
packets, so a loss-free pair sits at exactly the packet interval and any loss
pushes the per-pair mean strictly above it. A transmission is "simultaneous"
when another UE also transmits PSSCH in the same slot (scope "slot"), or on the
same (slot, subchannel) cell (scope "resource").
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field

from .pool import Resource

log = logging.getLogger(__name__)

IDEAL_EPS_MS = 1e-9


class OutOfOrderEventError(Exception):
    pass


@dataclass(frozen=True)
class PirSample:
    tx_ue: int
    rx_ue: int
    value_ms: float
    n_receptions: int


class KpiTrace:
    """One drop's raw KPI events."""

    def __init__(self):
        self.tx_events: list[tuple[int, int, int]] = []      # (slot, tx_ue, subchannel)
        self._last_tx_slot = -1
        self._rx_times: dict[tuple[int, int], list[int]] = defaultdict(list)
        self._seen: set[tuple[int, int, int]] = set()

    def record_pssch_tx(self, slot: int, tx_ue: int, resource: Resource) -> None:
        if slot < self._last_tx_slot:
            raise OutOfOrderEventError(
                f"tx at slot {slot} after slot {self._last_tx_slot}"
            )
        self._last_tx_slot = slot
        self.tx_events.append((slot, tx_ue, resource.subchannel))

    def record_app_rx(self, time_us: int, tx_ue: int, rx_ue: int, packet_id: int) -> None:
        """First successful copy per (pair, packet); time is the generation instant."""
        key = (tx_ue, rx_ue, packet_id)
        if key in self._seen:
            return
        times = self._rx_times[(tx_ue, rx_ue)]
        if times and time_us < times[-1]:
            raise OutOfOrderEventError(
                f"rx for pair ({tx_ue},{rx_ue}) at {time_us} us after {times[-1]} us"
            )
        self._seen.add(key)
        times.append(time_us)

    def pir_samples(self, pairs: list[tuple[int, int]]) -> tuple[list[PirSample], int]:
        """Mean reception gap per pair; pairs with < 2 receptions are starved."""
        samples, starved = [], 0
        for tx, rx in pairs:
            times = self._rx_times.get((tx, rx), [])
            if len(times) < 2:
                starved += 1
                continue
            gaps_us = [b - a for a, b in zip(times, times[1:])]
            value_ms = sum(gaps_us) / len(gaps_us) / 1000.0
            samples.append(PirSample(tx, rx, value_ms, len(times)))
        return samples, starved

    def simultaneous_pct(self, scope: str = "slot") -> float:
        """Share of PSSCH transmissions co-scheduled with another UE."""
        if scope not in ("slot", "resource"):
            raise ValueError(f"unknown simultaneous scope {scope!r}")
        if not self.tx_events:
            log.warning("simultaneous_pct on empty trace, returning 0")
            return 0.0
        users: dict[object, set[int]] = defaultdict(set)
        for slot, tx_ue, subch in self.tx_events:
            key = slot if scope == "slot" else (slot, subch)
            users[key].add(tx_ue)
        flagged = 0
        for slot, tx_ue, subch in self.tx_events:
            key = slot if scope == "slot" else (slot, subch)
            if len(users[key]) > 1:
                flagged += 1
        return 100.0 * flagged / len(self.tx_events)


def ideal_fraction(samples: list[float], inter_packet_ms: float) -> float:
    if not samples:
        return 0.0
    hit = sum(1 for v in samples if abs(v - inter_packet_ms) <= IDEAL_EPS_MS)
    return hit / len(samples)


def empirical_cdf(samples: list[float]) -> list[tuple[float, float]]:
    """(value, P[X <= value]) rows, unique ascending values, last row at 1.0."""
    n = len(samples)
    if n == 0:
        return []
    out = []
    seen = 0
    for v in sorted(samples):
        seen += 1
        if out and out[-1][0] == v:
            out[-1] = (v, seen / n)    # duplicates collapse to the max rank
        else:
            out.append((v, seen / n))
    return out


def export_cdf(samples: list[float], path) -> None:
    rows = empirical_cdf(samples)
    with open(path, "w") as f:
        f.write("value,cdf\n")
        for v, p in rows:
            f.write(f"{v:.6f},{p:.9f}\n")


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")


def median(values: list[float]) -> float:
    if not values:
        return float("nan")
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2.0
