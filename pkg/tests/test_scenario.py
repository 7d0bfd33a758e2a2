"""Highway layout geometry, PIR pairing, and traffic arrivals."""

import math

import pytest

from nrv2xsim.scenario import (HighwayLayout, InvalidLayoutError, ScenarioConfig,
                               build_layout, generate_arrivals)


def layout(**kw):
    return build_layout(ScenarioConfig(**kw))


class TestLayout:
    def test_default_population(self):
        lay = layout()
        assert len(lay.ues) == 15
        assert [u.ue_id for u in lay.ues] == list(range(15))
        assert lay.slots_per_lane == 5

    def test_default_transmitters_are_lane_centers(self):
        lay = layout()
        assert tuple(u.ue_id for u in lay.transmitters) == (2, 7, 12)

    def test_explicit_tx_indices(self):
        lay = layout(tx_indices=tuple(range(15)))
        assert len(lay.transmitters) == 15
        lay = layout(tx_indices=(0, 14))
        assert tuple(u.ue_id for u in lay.transmitters) == (0, 14)

    def test_tx_indices_out_of_range_rejected(self):
        with pytest.raises(InvalidLayoutError):
            layout(tx_indices=(15,))

    def test_even_lane_needs_explicit_txs(self):
        with pytest.raises(InvalidLayoutError):
            ScenarioConfig(ues_per_lane=4)
        lay = layout(ues_per_lane=4, tx_indices=(1,))
        assert len(lay.ues) == 12

    def test_positions_centered_grid(self):
        lay = layout()
        u0, u2, u4 = lay.ues[0], lay.ues[2], lay.ues[4]
        assert (u0.x0_m, u2.x0_m, u4.x0_m) == (-40.0, 0.0, 40.0)
        assert {u.y_m for u in lay.ues} == {0.0, 4.0, 8.0}
        assert all(u.z_m == 1.6 for u in lay.ues)

    def test_distances(self):
        lay = layout()
        d = lay.distance_m
        assert d(lay.ues[0], lay.ues[1]) == pytest.approx(20.0)
        assert d(lay.ues[0], lay.ues[5]) == pytest.approx(4.0)
        # longest pair: 4 vehicle gaps and 2 lanes apart
        assert d(lay.ues[0], lay.ues[14]) == pytest.approx(math.hypot(80.0, 8.0))

    def test_platoon_moves_rigidly(self):
        lay = layout()
        a, b = lay.ues[0], lay.ues[14]
        x0, y0, z0 = lay.position_at(a, 0.0)
        x1, _, _ = lay.position_at(a, 1.0)
        assert x1 - x0 == pytest.approx(140.0 / 3.6)
        # pairwise distance unchanged by motion
        pa, pb = lay.position_at(a, 7.3), lay.position_at(b, 7.3)
        moved = math.dist(pa, pb)
        assert moved == pytest.approx(lay.distance_m(a, b))


class TestPirPairs:
    def test_lane_pairing_default_txs(self):
        pairs = layout().pir_pairs("lane")
        assert len(pairs) == 12
        assert set(pairs) == {(2, r) for r in (0, 1, 3, 4)} \
            | {(7, r) for r in (5, 6, 8, 9)} \
            | {(12, r) for r in (10, 11, 13, 14)}

    def test_lane_pairing_all_txs_keeps_designated_senders(self):
        # Every UE transmits, but only each lane's middle vehicle anchors pairs.
        pairs = layout(tx_indices=tuple(range(15))).pir_pairs("lane")
        assert len(pairs) == 12
        assert {tx for tx, _ in pairs} == {2, 7, 12}

    def test_all_pairing(self):
        pairs = layout().pir_pairs("all")
        assert len(pairs) == 3 * 14
        assert (2, 12) in pairs and (2, 2) not in pairs

    def test_pairing_validation(self):
        with pytest.raises(InvalidLayoutError):
            ScenarioConfig(pir_pairing="mesh")


class TestArrivals:
    def test_periodic_from_offset(self):
        assert generate_arrivals(0, 500_000, 100) == [0, 100_000, 200_000, 300_000, 400_000]
        assert generate_arrivals(37_000, 300_000, 100) == [37_000, 137_000, 237_000]

    def test_end_exclusive(self):
        assert generate_arrivals(0, 100_000, 100) == [0]

    def test_offset_must_fit_one_interval(self):
        with pytest.raises(ValueError):
            generate_arrivals(100_000, 500_000, 100)
        with pytest.raises(ValueError):
            generate_arrivals(-1, 500_000, 100)

    def test_config_validation(self):
        with pytest.raises(InvalidLayoutError):
            ScenarioConfig(lanes=0)
        with pytest.raises(InvalidLayoutError):
            ScenarioConfig(inter_packet_ms=0)
