"""Slot-clocked discrete-event engine.

Each drop is sequential: events are ordered by (slot, kind) with kind ranks
arrival < selection < transmission < resolution < period-end, so every
transmission of a slot is registered before any reception outcome for that
slot is computed. Drops are independent given their derived seeds and may run
in parallel; results merge in drop order, so serial and parallel runs produce
identical aggregates.
"""

import dataclasses
import heapq
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from multiprocessing import Pool as ProcessPool

import numpy as np

from .config import RunConfig
from .kpi import KpiTrace, PirSample, export_cdf, ideal_fraction, median, write_summary
from .mode2 import NoCandidatesError, PeriodDecision, on_period_end, trigger_selection
from .phy import pathloss_db, rsrp_dbm, sinr_db, noise_dbm, subchannel_bandwidth_hz
from .pool import EmptyWindowError, PoolConfig, SensingWindowSpec
from .scenario import build_layout, generate_arrivals
from .sensing import SciRecord, SensingDatabase
from .timeline import ms_to_slots, slot_duration_us

log = logging.getLogger(__name__)

# Event kind ranks; ties within a slot resolve in this order.
ARRIVAL, SELECT, TX, RESOLVE, PERIOD_END = range(5)

_PURPOSES = {"offset": 0, "selection": 1, "slrrc": 2, "keep": 3, "shadowing": 4}


def rng_stream(drop_seed: int, ue_id: int, purpose: str) -> np.random.Generator:
    """Isolated per-(drop, UE, purpose) stream; consuming one never moves another."""
    key = (drop_seed, ue_id, _PURPOSES[purpose])
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


class EventQueue:
    """Min-heap of (slot, kind, seq, payload) with stable FIFO tie-breaking."""

    def __init__(self):
        self._heap: list = []
        self._seq = itertools.count()

    def push(self, slot: int, kind: int, payload=None) -> None:
        heapq.heappush(self._heap, (slot, kind, next(self._seq), payload))

    def pop(self):
        slot, kind, _, payload = heapq.heappop(self._heap)
        return slot, kind, payload

    def __len__(self) -> int:
        return len(self._heap)


class _UeState:
    __slots__ = ("info", "queue", "grant", "db", "pending_slots", "current_packet",
                 "rng_selection", "rng_slrrc", "rng_keep")

    def __init__(self, info, drop_seed):
        self.info = info
        self.queue: deque = deque()
        self.grant = None
        self.db = SensingDatabase()
        self.pending_slots: set[int] = set()
        self.current_packet: tuple[int, int] | None = None    # (packet_id, gen_us)
        self.rng_selection = rng_stream(drop_seed, info.ue_id, "selection")
        self.rng_slrrc = rng_stream(drop_seed, info.ue_id, "slrrc")
        self.rng_keep = rng_stream(drop_seed, info.ue_id, "keep")


@dataclass
class DropResult:
    drop_index: int
    drop_seed: int
    pir_samples: list[PirSample]
    starved_pairs: int
    simtx_slot_pct: float
    simtx_resource_pct: float
    tx_count: int
    generated: int
    delivered: int
    lost: int
    in_flight: int
    selection_failures: int


class _Drop:
    """State and event handlers for one drop."""

    def __init__(self, cfg: RunConfig, drop_index: int, drop_seed: int):
        self.cfg = cfg
        self.drop_index = drop_index
        self.drop_seed = drop_seed
        self.mu = cfg.mu
        self.horizon = cfg.duration_slots()
        self.pattern = cfg.timeline.pattern()
        self.pool = PoolConfig(cfg.pool.bandwidth_rbs(cfg.mu), cfg.pool.subchannel_size_rbs,
                               cfg.pool.pscch_symbols, cfg.pool.pssch_symbols)
        self.sensing_spec = SensingWindowSpec(cfg.pool.t0_ms, cfg.pool.tproc0_slots)
        self.t0_slots = ms_to_slots(cfg.pool.t0_ms, cfg.mu)
        self.layout = build_layout(cfg.scenario)
        self.noise_floor = noise_dbm(
            subchannel_bandwidth_hz(cfg.pool.subchannel_size_rbs, cfg.mu), cfg.phy)

        self.ues = {u.ue_id: _UeState(u, drop_seed) for u in self.layout.ues}
        self.tx_ids = [u.ue_id for u in self.layout.transmitters]
        self.pairs = self.layout.pir_pairs(cfg.scenario.pir_pairing)
        self.pair_set = set(self.pairs)
        self.rxp = self._link_powers()

        self.q = EventQueue()
        self.trace = KpiTrace()
        self.slot_txs: list = []
        self._resolve_scheduled: set[int] = set()
        self.delivered_ids: dict[int, set[int]] = {t: set() for t in self.tx_ids}
        self.generated = 0
        self.lost = 0
        self.selection_failures = 0

    def _link_powers(self):
        """Received power per (tx, listener) link; geometry is time-invariant."""
        cfg = self.cfg.phy
        shadow: dict[tuple[int, int], float] = {}
        if cfg.shadowing_sigma_db > 0:
            ids = sorted(self.ues)
            for i in ids:
                stream = rng_stream(self.drop_seed, i, "shadowing")
                for j in ids:
                    if j > i:
                        shadow[(i, j)] = float(stream.normal(0.0, cfg.shadowing_sigma_db))
        rxp: dict[int, dict[int, float]] = {}
        for t in (u.ue_id for u in self.layout.transmitters):
            rxp[t] = {}
            for u in self.layout.ues:
                if u.ue_id == t:
                    continue
                d = self.layout.distance_m(self.ues[t].info, u)
                pl = pathloss_db(d, cfg.carrier_ghz)
                s = shadow.get((min(t, u.ue_id), max(t, u.ue_id)), 0.0)
                rxp[t][u.ue_id] = rsrp_dbm(cfg.tx_power_dbm, pl + s, cfg.antenna_gain_db)
        return rxp

    # -- event handlers -------------------------------------------------------

    def run(self) -> DropResult:
        step_us = self.cfg.scenario.inter_packet_ms * 1000
        slot_us = slot_duration_us(self.mu)
        duration_us = int(self.cfg.duration_s * 1_000_000)
        for t in self.tx_ids:
            offset_us = int(rng_stream(self.drop_seed, t, "offset").integers(0, step_us))
            for pid, gen_us in enumerate(generate_arrivals(offset_us, duration_us,
                                                           self.cfg.scenario.inter_packet_ms)):
                # A packet born mid-slot becomes schedulable at the next boundary.
                arrival_slot = -(-gen_us // slot_us)
                if arrival_slot < self.horizon:
                    self.q.push(arrival_slot, ARRIVAL, (t, pid, gen_us))

        handlers = {ARRIVAL: self._on_arrival, SELECT: self._on_select,
                    TX: self._on_tx, RESOLVE: self._on_resolve,
                    PERIOD_END: self._on_period_end}
        while len(self.q):
            slot, kind, payload = self.q.pop()
            handlers[kind](slot, payload)
        return self._finalize()

    def _on_arrival(self, slot, payload):
        ue_id, pid, gen_us = payload
        ue = self.ues[ue_id]
        ue.queue.append((pid, gen_us))
        self.generated += 1
        if ue.grant is None:
            self.q.push(slot, SELECT, ue_id)

    def _on_select(self, slot, ue_id):
        ue = self.ues[ue_id]
        if ue.grant is not None or not ue.queue:
            return
        ue.db.evict_before(slot - self.t0_slots)
        try:
            grant = trigger_selection(self.cfg.mac, self.pool, self.pattern,
                                      self.sensing_spec, self.cfg.pool.t2_policy,
                                      self.mu, ue.db, slot, ue.rng_selection,
                                      frozenset(ue.pending_slots),
                                      rng_slrrc=ue.rng_slrrc)
        except (NoCandidatesError, EmptyWindowError):
            self.selection_failures += 1
            return
        ue.grant = grant
        if not self._schedule_period(ue, 0):
            ue.grant = None

    def _schedule_period(self, ue, k) -> bool:
        resources = ue.grant.period_resources(k)
        last = max(r.slot for r in resources)
        if last >= self.horizon:
            return False    # period would straddle the end of the drop
        for copy_idx, r in enumerate(resources):
            chained = tuple(resources[copy_idx + 1:
                                      copy_idx + self.cfg.mac.n_max_reserve])
            self.q.push(r.slot, TX, (ue.info.ue_id, k, copy_idx, r, chained))
            ue.pending_slots.add(r.slot)
            if r.slot not in self._resolve_scheduled:
                self._resolve_scheduled.add(r.slot)
                self.q.push(r.slot, RESOLVE)
        self.q.push(last, PERIOD_END, (ue.info.ue_id, k))
        return True

    def _on_tx(self, slot, payload):
        ue_id, k, copy_idx, res, chained = payload
        ue = self.ues[ue_id]
        ue.pending_slots.discard(slot)
        if ue.grant is None:
            return
        if copy_idx == 0:
            ue.current_packet = ue.queue.popleft() if ue.queue else None
        if ue.current_packet is None:
            return    # reserved period with nothing to send
        pid, gen_us = ue.current_packet
        self.slot_txs.append((ue_id, res, pid, gen_us, chained))
        self.trace.record_pssch_tx(slot, ue_id, res)

    def _on_resolve(self, slot, _payload):
        txs, self.slot_txs = self.slot_txs, []
        self._resolve_scheduled.discard(slot)
        if not txs:
            return
        transmitting = {t[0] for t in txs}
        phy = self.cfg.phy
        p_rsvp = self.cfg.mac.p_rsvp_ms
        for listener in self.ues:
            if listener in transmitting:
                continue    # half duplex: a transmitting UE hears nothing
            is_sensor = listener in self.delivered_ids
            for tx_id, res, pid, gen_us, chained in txs:
                signal = self.rxp[tx_id][listener]
                interf = [self.rxp[o_id][listener]
                          for o_id, o_res, *_ in txs
                          if o_id != tx_id and o_res.overlaps(res)]
                sinr = sinr_db(signal, interf, self.noise_floor)
                if sinr < phy.pscch_sinr_threshold_db:
                    continue    # SCI lost: no sensing record, no data
                if is_sensor:
                    self.ues[listener].db.record(SciRecord(
                        tx_ue=tx_id, slot=slot, resource=res,
                        p_rsvp_ms=p_rsvp, rsrp_dbm=signal,
                        chained_resources=chained))
                if sinr >= phy.pssch_sinr_threshold_db:
                    self.delivered_ids[tx_id].add(pid)
                    if (tx_id, listener) in self.pair_set:
                        self.trace.record_app_rx(gen_us, tx_id, listener, pid)

    def _on_period_end(self, slot, payload):
        ue_id, k = payload
        ue = self.ues[ue_id]
        if ue.grant is None:
            return
        if ue.current_packet is not None:
            pid, _ = ue.current_packet
            if pid not in self.delivered_ids[ue_id]:
                self.lost += 1
            ue.current_packet = None
        decision = on_period_end(ue.grant, ue.rng_keep)
        if decision is PeriodDecision.RESELECT:
            ue.grant = None
            ue.pending_slots.clear()
            if ue.queue and slot + 1 < self.horizon:
                self.q.push(slot + 1, SELECT, ue_id)
        else:
            if not self._schedule_period(ue, ue.grant.periods_served):
                pass    # grant idles out at the horizon

    def _finalize(self) -> DropResult:
        samples, starved = self.trace.pir_samples(self.pairs)
        delivered = sum(len(s) for s in self.delivered_ids.values())
        in_flight = sum(len(u.queue) + (1 if u.current_packet else 0)
                        for u in self.ues.values())
        assert self.generated == delivered + self.lost + in_flight, \
            "packet conservation violated"
        return DropResult(
            drop_index=self.drop_index,
            drop_seed=self.drop_seed,
            pir_samples=sorted(samples, key=lambda s: (s.tx_ue, s.rx_ue)),
            starved_pairs=starved,
            simtx_slot_pct=self.trace.simultaneous_pct("slot"),
            simtx_resource_pct=self.trace.simultaneous_pct("resource"),
            tx_count=len(self.trace.tx_events),
            generated=self.generated,
            delivered=delivered,
            lost=self.lost,
            in_flight=in_flight,
            selection_failures=self.selection_failures,
        )


def run_drop(cfg: RunConfig, drop_index: int, drop_seed: int) -> DropResult:
    return _Drop(cfg, drop_index, drop_seed).run()


def _drop_star(args):
    return run_drop(*args)


def run_cell(cfg: RunConfig, parallel: int = 1) -> list[DropResult]:
    """All drops of one configuration, merged in drop order."""
    tasks = [(cfg, i, cfg.seed + i) for i in range(cfg.n_drops)]
    log.debug("running %d drops (mu=%d, mode=%s, parallel=%d)",
              len(tasks), cfg.mu, cfg.mac.mode, parallel)
    if parallel <= 1:
        return [run_drop(*t) for t in tasks]
    with ProcessPool(processes=parallel) as pool:
        return pool.map(_drop_star, tasks)


# -- cell aggregation and export ----------------------------------------------

def samples_csv_rows(drops: list[DropResult]) -> list[str]:
    rows = ["kind,drop,tx_ue,rx_ue,value"]
    for d in sorted(drops, key=lambda d: d.drop_index):
        for s in d.pir_samples:
            rows.append(f"pir,{d.drop_index},{s.tx_ue},{s.rx_ue},{s.value_ms:.6f}")
        rows.append(f"simtx,{d.drop_index},,,{d.simtx_slot_pct:.6f}")
        rows.append(f"simtx_resource,{d.drop_index},,,{d.simtx_resource_pct:.6f}")
    return rows


def aggregate_cell(cfg: RunConfig, drops: list[DropResult], labels: dict | None = None) -> dict:
    pir_values = [s.value_ms for d in drops for s in d.pir_samples]
    simtx = [d.simtx_slot_pct for d in drops]
    simtx_res = [d.simtx_resource_pct for d in drops]
    return {
        "labels": labels or {},
        "config": dataclasses.asdict(cfg),
        "kpis": {
            "pir": {
                "n_samples": len(pir_values),
                "median_ms": median(pir_values),
                "ideal_fraction": ideal_fraction(pir_values, cfg.scenario.inter_packet_ms),
                "starved_pairs": sum(d.starved_pairs for d in drops),
            },
            "simtx": {
                "n_drops": len(drops),
                "median_pct": median(simtx),
                "median_pct_resource": median(simtx_res),
            },
        },
        "counters": {
            "generated": sum(d.generated for d in drops),
            "delivered": sum(d.delivered for d in drops),
            "lost": sum(d.lost for d in drops),
            "in_flight": sum(d.in_flight for d in drops),
            "tx_events": sum(d.tx_count for d in drops),
            "selection_failures": sum(d.selection_failures for d in drops),
        },
    }


def write_cell_outputs(out_dir, cfg: RunConfig, drops: list[DropResult],
                       labels: dict | None = None) -> dict:
    """samples.csv + pir_cdf.csv + simtx_cdf.csv + summary.json for one cell."""
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "samples.csv").write_text("\n".join(samples_csv_rows(drops)) + "\n")
    pir_values = [s.value_ms for d in drops for s in d.pir_samples]
    export_cdf(pir_values, out_dir / "pir_cdf.csv")
    export_cdf([d.simtx_slot_pct for d in drops], out_dir / "simtx_cdf.csv")
    summary = aggregate_cell(cfg, drops, labels)
    write_summary(out_dir / "summary.json", summary)
    return summary
