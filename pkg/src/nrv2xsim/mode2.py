"""Mode 2 autonomous selection: SPS counters, grants, candidate sampling.

The semi-persistent pattern: pick N resources in the selection window, repeat
them every P_rsvp for SLRRC periods, then either keep (with the configured
probability, redrawing SLRRC) or release and reselect. cresel_remaining caps
the total periods served by one selection at 10x the initial SLRRC draw.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .pool import (PoolConfig, Resource, SelectionWindow, SensingWindowSpec,
                   T2Policy, enumerate_window_resources, resolve_t2, sensing_window)
from .sensing import SensingDatabase, build_exclusion
from .timeline import SidelinkPattern, ms_to_slots


class NoCandidatesError(Exception):
    """Selection produced an empty candidate set (window or filtering degenerate)."""


class PeriodDecision(Enum):
    CONTINUE = "continue"
    KEEP = "keep"
    RESELECT = "reselect"


SLRRC_LO, SLRRC_HI = 5, 15
CRESEL_FACTOR = 10
SLRRC_REF_PERIOD_MS = 100
SLRRC_MIN_PERIOD_MS = 20


def draw_slrrc(p_rsvp_ms: int, rng: np.random.Generator) -> int:
    """Uniform SLRRC draw; short periods scale the interval up by 100/max(20,P)."""
    if p_rsvp_ms <= 0:
        raise ValueError(f"p_rsvp_ms must be positive, got {p_rsvp_ms}")
    if p_rsvp_ms >= SLRRC_REF_PERIOD_MS:
        lo, hi = SLRRC_LO, SLRRC_HI
    else:
        scale = SLRRC_REF_PERIOD_MS / max(SLRRC_MIN_PERIOD_MS, p_rsvp_ms)
        lo = math.ceil(SLRRC_LO * scale)
        hi = math.ceil(SLRRC_HI * scale)
    return int(rng.integers(lo, hi + 1))


def select_resources(candidates: list[Resource], n_tx: int,
                     rng: np.random.Generator) -> list[Resource]:
    """Uniform sample without replacement, returned in (slot, subchannel) order."""
    if not candidates:
        raise NoCandidatesError("empty candidate set")
    k = min(n_tx, len(candidates))
    idx = rng.choice(len(candidates), size=k, replace=False)
    return sorted(candidates[i] for i in idx)


@dataclass
class SpsGrant:
    resources: tuple[Resource, ...]     # period-0 resources, ascending
    p_rsvp_ms: int
    period_slots: int
    slrrc: int
    initial_slrrc: int
    cresel_remaining: int
    keep_probability: float
    created_slot: int
    periods_served: int = 0

    def period_resources(self, k: int) -> list[Resource]:
        return [r.shifted(k * self.period_slots) for r in self.resources]


def on_period_end(grant: SpsGrant, rng: np.random.Generator) -> PeriodDecision:
    """Advance counters after a served period and decide the grant's fate."""
    grant.periods_served += 1
    grant.slrrc -= 1
    grant.cresel_remaining -= 1
    if grant.cresel_remaining <= 0:
        return PeriodDecision.RESELECT
    if grant.slrrc > 0:
        return PeriodDecision.CONTINUE
    if grant.keep_probability > 0 and rng.random() < grant.keep_probability:
        grant.slrrc = draw_slrrc(grant.p_rsvp_ms, rng)
        return PeriodDecision.KEEP
    return PeriodDecision.RESELECT


@dataclass(frozen=True)
class Mode2Config:
    mode: str = "sensing"               # sensing | no_sensing
    p_rsvp_ms: int = 100
    keep_probability: float = 0.0
    n_selected: int = 3
    n_pssch_max_tx: int = 5
    n_max_reserve: int = 3
    pdb_ms: int = 100
    t2_min_slots: int = 5
    t1_slots: int = 2
    x_percent: int = 20
    rsrp_threshold_dbm: float = -128.0
    exclusion_scope: str = "resource"
    exclude_own_tx_slots: bool = True

    def __post_init__(self):
        if self.mode not in ("sensing", "no_sensing"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 <= self.keep_probability <= 1:
            raise ValueError("keep_probability outside [0, 1]")
        if self.n_selected < 1:
            raise ValueError("n_selected must be >= 1")

    @property
    def n_per_period(self) -> int:
        # A period cannot carry more copies than the SCI can reserve or the
        # PHY allows transmissions of one TB.
        return min(self.n_selected, self.n_max_reserve, self.n_pssch_max_tx)


def trigger_selection(cfg: Mode2Config, pool: PoolConfig, pattern: SidelinkPattern,
                      sensing_spec: SensingWindowSpec, t2_policy: T2Policy, mu: int,
                      db: SensingDatabase, now_slot: int,
                      rng: np.random.Generator,
                      own_pending_slots: frozenset[int] = frozenset(),
                      rng_slrrc: np.random.Generator | None = None) -> SpsGrant:
    """Run one selection at now_slot and return a fresh grant."""
    t2 = resolve_t2(cfg.pdb_ms, cfg.t2_min_slots, mu, t2_policy, cfg.t1_slots)
    window = SelectionWindow(now_slot, cfg.t1_slots, t2)
    resources = enumerate_window_resources(window, pool, pattern)

    if cfg.mode == "sensing":
        interval = sensing_window(now_slot, sensing_spec, mu)
        exclusion = build_exclusion(db, interval, window, pool, pattern, mu,
                                    cfg.x_percent, cfg.rsrp_threshold_dbm,
                                    cfg.exclusion_scope)
        candidates = [r for r in resources if r not in exclusion.excluded]
    else:
        candidates = resources

    if cfg.exclude_own_tx_slots and own_pending_slots:
        filtered = [r for r in candidates if r.slot not in own_pending_slots]
        # Half-duplex hygiene must not empty the set outright.
        if filtered:
            candidates = filtered

    if not candidates:
        raise NoCandidatesError(f"no candidates at slot {now_slot}")

    chosen = select_resources(candidates, cfg.n_per_period, rng)
    slrrc = draw_slrrc(cfg.p_rsvp_ms, rng_slrrc if rng_slrrc is not None else rng)
    return SpsGrant(
        resources=tuple(chosen),
        p_rsvp_ms=cfg.p_rsvp_ms,
        period_slots=ms_to_slots(cfg.p_rsvp_ms, mu),
        slrrc=slrrc,
        initial_slrrc=slrrc,
        cresel_remaining=CRESEL_FACTOR * slrrc,
        keep_probability=cfg.keep_probability,
        created_slot=now_slot,
    )
