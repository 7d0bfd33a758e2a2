"""Highway platoon layout and periodic traffic generation."""

from dataclasses import dataclass


class InvalidLayoutError(Exception):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    lanes: int = 3
    ues_per_lane: int = 5
    inter_vehicle_m: float = 20.0
    inter_lane_m: float = 4.0
    antenna_height_m: float = 1.6
    speed_kmh: float = 140.0
    packet_bytes: int = 200
    inter_packet_ms: int = 100
    pir_pairing: str = "lane"
    # None picks the center vehicle of each lane as that lane's transmitter.
    tx_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.lanes < 1 or self.ues_per_lane < 1:
            raise InvalidLayoutError("need at least one lane and one UE per lane")
        if self.tx_indices is None and self.ues_per_lane % 2 == 0:
            raise InvalidLayoutError(
                "even ues_per_lane has no center vehicle; pass tx_indices explicitly"
            )
        if self.pir_pairing not in ("lane", "all"):
            raise InvalidLayoutError(f"unknown pir_pairing {self.pir_pairing!r}")
        if self.inter_packet_ms <= 0:
            raise InvalidLayoutError("inter_packet_ms must be positive")


@dataclass(frozen=True)
class UeInfo:
    ue_id: int
    lane: int
    slot_in_lane: int
    x0_m: float
    y_m: float
    z_m: float
    is_tx: bool


@dataclass(frozen=True)
class HighwayLayout:
    ues: tuple[UeInfo, ...]
    speed_mps: float

    @property
    def transmitters(self) -> tuple[UeInfo, ...]:
        return tuple(u for u in self.ues if u.is_tx)

    @property
    def slots_per_lane(self) -> int:
        return max(u.slot_in_lane for u in self.ues) + 1

    def position_at(self, ue: UeInfo, t_s: float) -> tuple[float, float, float]:
        # Same speed and heading for the whole platoon, so pairwise distances
        # are time-invariant; the engine exploits that.
        return (ue.x0_m + self.speed_mps * t_s, ue.y_m, ue.z_m)

    def distance_m(self, a: UeInfo, b: UeInfo) -> float:
        dx = a.x0_m - b.x0_m
        dy = a.y_m - b.y_m
        dz = a.z_m - b.z_m
        return (dx * dx + dy * dy + dz * dz) ** 0.5

    def pir_pairs(self, pairing: str) -> list[tuple[int, int]]:
        """(tx_ue, rx_ue) pairs whose reception gaps feed the PIR KPI.

        "all": every transmitter paired with every other UE. "lane": platoon
        semantics; only each lane's designated sender (the middle vehicle)
        defines pairs, with its own lane mates as receivers. Transmissions
        from any other UE still interfere and feed sensing, but do not carry
        a tracked flow.
        """
        pairs = []
        for tx in self.transmitters:
            if pairing == "lane" and tx.slot_in_lane != self.slots_per_lane // 2:
                continue
            for u in self.ues:
                if u.ue_id == tx.ue_id:
                    continue
                if pairing == "lane" and u.lane != tx.lane:
                    continue
                pairs.append((tx.ue_id, u.ue_id))
        return pairs


def build_layout(cfg: ScenarioConfig) -> HighwayLayout:
    """Lanes along y, vehicles along x centered on 0, lane center transmits."""
    if cfg.tx_indices is not None:
        tx_set = set(cfg.tx_indices)
        n_total = cfg.lanes * cfg.ues_per_lane
        bad = [i for i in tx_set if not 0 <= i < n_total]
        if bad:
            raise InvalidLayoutError(f"tx indices out of range: {bad}")
    else:
        center = cfg.ues_per_lane // 2
        tx_set = {lane * cfg.ues_per_lane + center for lane in range(cfg.lanes)}

    half_span = (cfg.ues_per_lane - 1) / 2.0
    ues = []
    for lane in range(cfg.lanes):
        for k in range(cfg.ues_per_lane):
            uid = lane * cfg.ues_per_lane + k
            ues.append(UeInfo(
                ue_id=uid,
                lane=lane,
                slot_in_lane=k,
                x0_m=(k - half_span) * cfg.inter_vehicle_m,
                y_m=lane * cfg.inter_lane_m,
                z_m=cfg.antenna_height_m,
                is_tx=uid in tx_set,
            ))
    return HighwayLayout(ues=tuple(ues), speed_mps=cfg.speed_kmh / 3.6)


def generate_arrivals(offset_us: int, duration_us: int, inter_packet_ms: int) -> list[int]:
    """Packet generation instants in microseconds: offset + k*interval < duration."""
    step = inter_packet_ms * 1000
    if offset_us < 0 or offset_us >= step:
        raise ValueError(f"offset {offset_us} us outside [0, {step})")
    return list(range(offset_us, duration_us, step))
