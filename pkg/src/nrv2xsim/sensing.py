"""Sensing database and candidate exclusion.

Each UE keeps the SCIs it decoded. At selection time the reservations heard in
the sensing window are projected forward into the selection window and any
window resource whose projected RSRP clears the threshold is excluded; the
threshold relaxes in +3 dB steps until at least x_percent of the window
survives.
"""

import math
from dataclasses import dataclass, field

from .pool import PoolConfig, Resource, SelectionWindow, enumerate_window_resources
from .timeline import SidelinkPattern, ms_to_slots, slots_to_ms_ceil

THRESHOLD_STEP_DB = 3.0


@dataclass(frozen=True)
class SciRecord:
    """One decoded first-stage SCI.

    chained_resources are the later same-period resources announced alongside
    the one carrying the SCI. p_rsvp_ms == 0 means no periodicity signaled.
    """

    tx_ue: int
    slot: int
    resource: Resource
    p_rsvp_ms: int
    rsrp_dbm: float
    chained_resources: tuple[Resource, ...] = ()


@dataclass(frozen=True)
class ExclusionSet:
    excluded: frozenset[Resource]
    final_threshold_dbm: float
    total_resources: int

    @property
    def candidate_count(self) -> int:
        return self.total_resources - len(self.excluded)


class SensingDatabase:
    """Per-UE store of decoded SCIs, queryable by slot interval.

    Eviction is memory management only: queries filter by interval, so evicting
    anything older than the deepest sensing window never changes results.
    """

    def __init__(self):
        self._records: dict[tuple[int, int, int], SciRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def record(self, sci: SciRecord) -> None:
        # Latest decode of the same cell wins; RSRP may differ run to run of
        # the same reservation (shadowing hook), keep the newest.
        key = (sci.tx_ue, sci.slot, sci.resource.subchannel)
        self._records[key] = sci

    def entries_in(self, start_slot: int, end_slot: int) -> list[SciRecord]:
        """Records with start_slot <= slot < end_slot, deterministic order."""
        hits = [r for r in self._records.values() if start_slot <= r.slot < end_slot]
        hits.sort(key=lambda r: (r.slot, r.tx_ue, r.resource.subchannel))
        return hits

    def evict_before(self, slot: int) -> int:
        stale = [k for k, r in self._records.items() if r.slot < slot]
        for k in stale:
            del self._records[k]
        return len(stale)


def reservation_q(t2_slots: int, p_rsvp_ms: int, mu: int) -> int:
    """Number of projected periods: Q = ceil(T_scal / P_rsvp), T_scal = T2 in ms."""
    if p_rsvp_ms <= 0:
        return 0
    t_scal_ms = slots_to_ms_ceil(t2_slots, mu)
    return math.ceil(t_scal_ms / p_rsvp_ms)


def project_reservations(db: SensingDatabase, sensing_interval: tuple[int, int],
                         window: SelectionWindow, mu: int) -> list[tuple[Resource, float]]:
    """Periodic replicas of sensed reservations that land in the window.

    Every SCI with p_rsvp_ms > 0 contributes its resource and chained resources
    shifted by k * P_rsvp slots for k = 1..Q. SCIs without periodicity
    contribute nothing here (their direct landings are handled by
    build_exclusion).
    """
    out: list[tuple[Resource, float]] = []
    for sci in db.entries_in(*sensing_interval):
        if sci.p_rsvp_ms <= 0:
            continue
        step = ms_to_slots(sci.p_rsvp_ms, mu)
        q = reservation_q(window.t2_slots, sci.p_rsvp_ms, mu)
        for k in range(1, q + 1):
            for res in (sci.resource, *sci.chained_resources):
                hit = res.shifted(k * step)
                if window.contains_slot(hit.slot):
                    out.append((hit, sci.rsrp_dbm))
    return out


def _direct_landings(db: SensingDatabase, sensing_interval: tuple[int, int],
                     window: SelectionWindow) -> list[tuple[Resource, float]]:
    # Resources announced outright by a sensed SCI (no periodic shift) that
    # happen to fall inside the selection window, e.g. chained same-period
    # reservations of a recent transmission.
    out = []
    for sci in db.entries_in(*sensing_interval):
        for res in (sci.resource, *sci.chained_resources):
            if window.contains_slot(res.slot):
                out.append((res, sci.rsrp_dbm))
    return out


def build_exclusion(db: SensingDatabase, sensing_interval: tuple[int, int],
                    window: SelectionWindow, pool: PoolConfig,
                    pattern: SidelinkPattern, mu: int, x_percent: int,
                    initial_threshold_dbm: float,
                    exclusion_scope: str = "resource") -> ExclusionSet:
    """RSRP-filter the window against projected and direct reservations.

    exclusion_scope "resource" excludes exactly the reserved cells; "slot"
    spreads each landing across every subchannel of its slot first. Threshold
    escalates by 3 dB until candidates reach x_percent of the window.
    """
    if exclusion_scope not in ("resource", "slot"):
        raise ValueError(f"unknown exclusion scope {exclusion_scope!r}")
    resources = enumerate_window_resources(window, pool, pattern)
    total = len(resources)

    landings = _direct_landings(db, sensing_interval, window)
    landings += project_reservations(db, sensing_interval, window, mu)
    if exclusion_scope == "slot":
        landings = [
            (Resource(res.slot, c), rsrp)
            for res, rsrp in landings
            for c in range(pool.num_subchannels)
        ]

    # Strongest projected RSRP per window cell decides its fate.
    strongest: dict[Resource, float] = {}
    window_set = set(resources)
    for res, rsrp in landings:
        key = Resource(res.slot, res.subchannel)
        if key in window_set and rsrp > strongest.get(key, -math.inf):
            strongest[key] = rsrp

    threshold = initial_threshold_dbm
    while True:
        excluded = frozenset(r for r, rsrp in strongest.items() if rsrp >= threshold)
        # Integer-exact candidate quota: candidates/total >= x/100.
        if (total - len(excluded)) * 100 >= x_percent * total:
            return ExclusionSet(excluded, threshold, total)
        threshold += THRESHOLD_STEP_DB
