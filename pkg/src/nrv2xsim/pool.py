"""Resource pool geometry: subchannels, selection windows, sensing windows.

A resource is one (slot, subchannel) cell. The selection window triggered at
slot n spans [n+T1, n+T2] inclusive, so its length is T2-T1+1 slots.
"""

from dataclasses import dataclass, field

from .timeline import SidelinkPattern, ms_to_slots, slot_duration_us


class EmptyWindowError(Exception):
    """Selection window contains no sidelink slots."""


class InfeasibleWindowError(Exception):
    """Window bounds cannot satisfy the configured constraints."""


@dataclass(frozen=True)
class PoolConfig:
    bandwidth_rbs: int
    subchannel_size_rbs: int
    pscch_symbols: int = 1
    pssch_symbols: int = 12

    def __post_init__(self):
        if self.subchannel_size_rbs <= 0 or self.bandwidth_rbs < self.subchannel_size_rbs:
            raise InfeasibleWindowError(
                f"pool of {self.bandwidth_rbs} RBs cannot fit a "
                f"{self.subchannel_size_rbs}-RB subchannel"
            )
        if self.pscch_symbols + self.pssch_symbols > 14:
            raise InfeasibleWindowError("PSCCH+PSSCH symbols exceed one slot (14)")

    @property
    def num_subchannels(self) -> int:
        return self.bandwidth_rbs // self.subchannel_size_rbs


@dataclass(frozen=True, order=True)
class Resource:
    """One schedulable cell: a slot index and a subchannel index.

    num_subchannels is the allocation width; everything in this study uses 1.
    """

    slot: int
    subchannel: int
    num_subchannels: int = 1

    def shifted(self, slots: int) -> "Resource":
        return Resource(self.slot + slots, self.subchannel, self.num_subchannels)

    def overlaps(self, other: "Resource") -> bool:
        if self.slot != other.slot:
            return False
        a0, a1 = self.subchannel, self.subchannel + self.num_subchannels
        b0, b1 = other.subchannel, other.subchannel + other.num_subchannels
        return a0 < b1 and b0 < a1


@dataclass(frozen=True)
class SelectionWindow:
    trigger_slot: int
    t1_slots: int
    t2_slots: int

    def __post_init__(self):
        if self.t1_slots < 0 or self.t2_slots < self.t1_slots:
            raise InfeasibleWindowError(
                f"bad window bounds T1={self.t1_slots}, T2={self.t2_slots}"
            )

    @property
    def first_slot(self) -> int:
        return self.trigger_slot + self.t1_slots

    @property
    def last_slot(self) -> int:
        return self.trigger_slot + self.t2_slots

    @property
    def length_slots(self) -> int:
        return self.t2_slots - self.t1_slots + 1

    def duration_us(self, mu: int) -> int:
        return self.length_slots * slot_duration_us(mu)

    def contains_slot(self, slot: int) -> bool:
        return self.first_slot <= slot <= self.last_slot


@dataclass(frozen=True)
class SensingWindowSpec:
    t0_ms: int = 100
    t_proc0_slots: int = 2


@dataclass(frozen=True)
class T2Policy:
    """How T2 is chosen per numerology.

    mode "ms": value is the wanted window duration in ms; T2 scales with mu so
    the duration stays fixed. mode "slots": value is T2 directly, fixed slot
    count at every mu (window duration then halves per mu step).
    """

    mode: str = "slots"
    value: int = 33

    def __post_init__(self):
        if self.mode not in ("ms", "slots"):
            raise InfeasibleWindowError(f"unknown T2 policy mode {self.mode!r}")
        if self.value <= 0:
            raise InfeasibleWindowError(f"T2 policy value must be positive, got {self.value}")


def resolve_t2(pdb_ms: int, t2_min_slots: int, mu: int, policy: T2Policy,
               t1_slots: int = 2) -> int:
    """Pick T2 in slots from the delay budget, the T2min floor and the policy."""
    if pdb_ms <= 0:
        raise InfeasibleWindowError(f"delay budget must be positive, got {pdb_ms} ms")
    pdb_slots = ms_to_slots(pdb_ms, mu)
    if pdb_slots <= t2_min_slots:
        return pdb_slots
    if policy.mode == "ms":
        # Window of value ms -> T2 = T1 + slots(value) - 1 keeps length exact.
        t2 = t1_slots + ms_to_slots(policy.value, mu) - 1
    else:
        t2 = policy.value
    return max(t2_min_slots, min(t2, pdb_slots))


def sensing_window(trigger_slot: int, spec: SensingWindowSpec, mu: int) -> tuple[int, int]:
    """Half-open slot interval [n - T0, n - Tproc0) visible to a selection at n.

    Truncates at slot 0 during warm-up; can be empty near the start of a run.
    """
    start = max(0, trigger_slot - ms_to_slots(spec.t0_ms, mu))
    end = max(0, trigger_slot - spec.t_proc0_slots)
    if end < start:
        end = start
    return start, end


def enumerate_window_resources(window: SelectionWindow, pool: PoolConfig,
                               pattern: SidelinkPattern) -> list[Resource]:
    """All (slot, subchannel) cells of the window, slot-major order."""
    slots = pattern.sidelink_slots(window.first_slot, window.last_slot)
    if not slots:
        raise EmptyWindowError(
            f"no sidelink slots in [{window.first_slot}, {window.last_slot}]"
        )
    return [Resource(s, c) for s in slots for c in range(pool.num_subchannels)]
