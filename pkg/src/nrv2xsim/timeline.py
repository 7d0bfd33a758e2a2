"""Slot timing for NR numerologies and the TDD + sidelink-bitmap slot structure.

All durations are integer microseconds and all instants are integer slot
indices, so there is no floating-point time anywhere downstream.
"""

import math
from dataclasses import dataclass
from functools import cached_property

SUPPORTED_MUS = (0, 1, 2)


def scs_khz(mu: int) -> int:
    """Subcarrier spacing in kHz: 15 * 2^mu."""
    _check_mu(mu)
    return 15 * (1 << mu)


def slot_duration_us(mu: int) -> int:
    """Slot length in microseconds: 1 ms / 2^mu."""
    _check_mu(mu)
    return 1000 >> mu


def ms_to_slots(duration_ms: int, mu: int) -> int:
    """Convert a whole-millisecond duration to a slot count for numerology mu."""
    _check_mu(mu)
    if duration_ms < 0:
        raise ValueError(f"negative duration: {duration_ms} ms")
    return duration_ms * (1 << mu)


def slots_to_ms_ceil(slots: int, mu: int) -> int:
    """Slot count converted to ms, rounded up (used for T_scal)."""
    _check_mu(mu)
    return math.ceil(slots / (1 << mu))


def _check_mu(mu: int) -> None:
    if mu not in SUPPORTED_MUS:
        raise ValueError(f"unsupported numerology mu={mu}; supported: {SUPPORTED_MUS}")


@dataclass(frozen=True)
class Numerology:
    mu: int

    def __post_init__(self):
        _check_mu(self.mu)

    @property
    def scs_khz(self) -> int:
        return scs_khz(self.mu)

    @property
    def slot_duration_us(self) -> int:
        return slot_duration_us(self.mu)

    @property
    def slots_per_ms(self) -> int:
        return 1 << self.mu


@dataclass(frozen=True)
class SidelinkPattern:
    """Cyclic TDD pattern plus the sidelink bitmap over its UL slots.

    tdd_pattern is a string over {D, S, U} applied cyclically to absolute slot
    indices. The bitmap indexes the UL-slot subsequence: bit 0 belongs to the
    first UL slot at or after slot 0, bit k to the k-th UL slot, cyclically.
    S slots carry no sidelink data.
    """

    tdd_pattern: str
    sl_bitmap: str

    def __post_init__(self):
        if not self.tdd_pattern or set(self.tdd_pattern) - set("DSU"):
            raise ValueError(f"bad TDD pattern {self.tdd_pattern!r}: want chars from DSU")
        if not self.sl_bitmap or set(self.sl_bitmap) - set("01"):
            raise ValueError(f"bad sidelink bitmap {self.sl_bitmap!r}: want chars from 01")

    @property
    def uls_per_cycle(self) -> int:
        return self.tdd_pattern.count("U")

    @cached_property
    def composite_period(self) -> int:
        """Slots after which the combined TDD+bitmap pattern repeats exactly."""
        u, b = self.uls_per_cycle, len(self.sl_bitmap)
        if u == 0:
            return len(self.tdd_pattern)
        return len(self.tdd_pattern) * (b // math.gcd(u, b))

    @cached_property
    def _sl_cycle(self) -> tuple[bool, ...]:
        # One composite period of is-sidelink flags, indexable by slot % period.
        flags = []
        ul_seen = 0
        for s in range(self.composite_period):
            if self.tdd_pattern[s % len(self.tdd_pattern)] == "U":
                flags.append(self.sl_bitmap[ul_seen % len(self.sl_bitmap)] == "1")
                ul_seen += 1
            else:
                flags.append(False)
        return tuple(flags)

    def is_sidelink_slot(self, slot: int) -> bool:
        if slot < 0:
            raise ValueError(f"negative slot index {slot}")
        return self._sl_cycle[slot % self.composite_period]

    def sidelink_slots(self, start: int, end: int) -> list[int]:
        """Absolute sidelink slot indices in the inclusive range [start, end]."""
        if start < 0:
            raise ValueError(f"negative slot index {start}")
        cycle = self._sl_cycle
        period = self.composite_period
        return [s for s in range(start, end + 1) if cycle[s % period]]


def enumerate_sidelink_slots(pattern: SidelinkPattern, start: int, end: int) -> list[int]:
    return pattern.sidelink_slots(start, end)
