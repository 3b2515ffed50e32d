"""Composition-model contraction and depot cut data."""

import dataclasses

import pytest

from rollstock.composition import contract, cut_data
from rollstock.errors import VariantMismatch
from rollstock.hypergraph import build
from rollstock.instance import Composition, Connection, Depot, Instance, Trip, UnitType


class TestContract:
    def test_two_trip_contraction(self, two_trip):
        cg = contract(build(two_trip, "HD"))
        # one node per trip event and composition
        per_trip = {}
        for n in cg.nodes:
            per_trip.setdefault(n.trip, set()).add((n.side, n.comp))
        assert len(per_trip["t1"]) == 6  # 3 compositions x dep/arr
        conn = cg.connection_arcs["c1"]
        assert sorted(conn) == ["chg.c1.b1.b1", "chg.c1.r1.r1", "chg.c1.r1.rr",
                                "chg.c1.rr.r1", "chg.c1.rr.rr"]
        for aid in conn:
            assert len(cg.by_id[aid].arcs) == 1  # plain arcs for 1-to-1

    def test_contract_requires_hd(self, two_trip):
        with pytest.raises(VariantMismatch):
            contract(build(two_trip, "hD"))

    def test_backrefs_share_hyperarc_ids(self, two_trip):
        g = build(two_trip, "HD")
        cg = contract(g)
        hd_ids = {h.id for h in g.hyperarcs
                  if h.kind in ("TripService", "ConnectionChange")}
        assert {a.id for a in cg.arcs} == hd_ids

    def test_join_becomes_two_arc_hyperarc(self):
        inst = Instance(
            name="join",
            unit_types=(UnitType("r", 2, 100),),
            compositions=(Composition("r1", ("r",)), Composition("rr", ("r", "r"))),
            trips=(
                Trip("t1", "A", "B", 480, 540, 10.0, 0, ("r1",)),
                Trip("t2", "C", "B", 485, 545, 10.0, 0, ("r1",)),
                Trip("t3", "B", "A", 600, 660, 10.0, 0, ("rr",)),
            ),
            connections=(Connection("c1", "TwoToOne", ("t1", "t2"), ("t3",)),),
            depots=(Depot("A", "r", 1, 0), Depot("C", "r", 1, 0)),
            n_max=2)
        cg = contract(build(inst, "HD"))
        joins = cg.connection_arcs["c1"]
        assert len(joins) == 1
        arcs = cg.by_id[joins[0]].arcs
        assert len(arcs) == 2
        heads = {h for _, h in arcs}
        assert len(heads) == 1  # two arcs meeting in the common successor node

    def test_empty_instance_has_no_composition_nodes(self):
        inst = Instance(
            name="empty", unit_types=(UnitType("r", 2, 100),),
            compositions=(Composition("r1", ("r",)),), trips=(), connections=(),
            depots=(Depot("A", "r", 1, 1),), n_max=1)
        cg = contract(build(inst, "HD"))
        assert cg.nodes == []
        assert cg.arcs == []


class TestCutData:
    def test_two_trip_red_cut_at_departure(self, two_trip):
        cg = contract(build(two_trip, "HD"))
        cut = next(c for c in cut_data(cg)
                   if c.station == "B" and c.unit_type == "r" and c.time == 600)
        assert dict(cut.outs) == {"chg.c1.r1.rr": 1}
        assert dict(cut.ins) == {"chg.c1.rr.r1": 1}

    def test_untouched_depot_contributes_vacuous_cut(self, two_trip):
        # station C sees no trips, so its depot has no events at all
        inst = dataclasses.replace(two_trip, depots=two_trip.depots
                                    + (Depot("C", "r", 3, 3),))
        cg = contract(build(inst, "HD"))
        cut = next(c for c in cg.cuts if c.station == "C" and c.unit_type == "r")
        assert cut.outs == () and cut.ins == ()
        assert cut.start == 3

    def test_cut_sets_grow_monotonically(self, situation2):
        cg = contract(build(situation2, "HD"))
        by_depot = {}
        for cut in cg.cuts:
            by_depot.setdefault((cut.station, cut.unit_type), []).append(cut)
        for cuts in by_depot.values():
            cuts.sort(key=lambda c: c.time)
            for earlier, later in zip(cuts, cuts[1:]):
                assert set(dict(earlier.outs)) <= set(dict(later.outs))
                assert set(dict(earlier.ins)) <= set(dict(later.ins))

    def test_staging_counts_on_trip_arcs(self, two_trip):
        cg = contract(build(two_trip, "HD"))
        end = next(e for e in cg.end_inventories
                   if e.station == "A" and e.unit_type == "r")
        outs = dict(end.outs)
        assert outs["trip.t1.rr"] == 2  # both reds staged out for the double
        assert outs["trip.t1.r1"] == 1
