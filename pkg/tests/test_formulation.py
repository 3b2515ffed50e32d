"""MILP assembly and LP file format round-trips."""

import pathlib

import pytest

from rollstock.composition import contract
from rollstock.errors import InvalidOptions
from rollstock.formulation import (
    ModelOptions,
    assemble,
    models_equal,
    parse_lp,
    write_lp,
)
from rollstock.hypergraph import build

GOLDEN = pathlib.Path(__file__).parent / "golden"


class TestAssembleHypergraph:
    def test_two_trip_trip_partitions(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        rows = {r.id: r for r in m.rows}
        t1, t2 = rows["trip.t1"], rows["trip.t2"]
        assert len(t1.coeffs) == len(t2.coeffs) == 3
        assert len(t1.coeffs) + len(t2.coeffs) == 6
        for r in (t1, t2):
            assert r.sense == "=" and r.rhs == 1.0
            assert all(c == 1.0 for _, c in r.coeffs)

    def test_relaxation_differs_only_in_integrality(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        r = m.relaxed()
        assert m.rows == r.rows
        assert [(v.id, v.lower, v.upper, v.cost) for v in m.variables] == \
               [(v.id, v.lower, v.upper, v.cost) for v in r.variables]
        assert all(v.integer for v in m.variables)
        assert not any(v.integer for v in r.variables)

    def test_parking_and_deviation_unbounded(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        for v in m.variables:
            if m.kinds[v.id] in ("Parking", "InventoryDeviation"):
                assert v.upper is None
            else:
                assert v.upper == 1.0

    def test_connection_constraints_toggle(self, two_trip):
        g = build(two_trip, "HD")
        with_iii = assemble(g, ModelOptions(connection_constraints=True))
        without = assemble(g, ModelOptions(connection_constraints=False))
        on_ids = {r.id for r in with_iii.rows}
        off_ids = {r.id for r in without.rows}
        assert on_ids - off_ids == {"conn.c1"}

    def test_variable_order(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        kinds = [m.kinds[v.id] for v in m.variables]
        first_dev = kinds.index("InventoryDeviation")
        assert all(k == "InventoryDeviation" for k in kinds[first_dev:])
        assert kinds[:6] == ["TripService"] * 6

    def test_conservation_rows_close_per_type(self, situation2):
        m = assemble(build(situation2, "HD"))
        flow_rows = [r for r in m.rows if r.id.startswith("flow.")]
        assert abs(sum(r.rhs for r in flow_rows)) < 1e-9


class TestAssembleComposition:
    def test_composition_model_rows(self, two_trip):
        m = assemble(contract(build(two_trip, "HD")))
        ids = {r.id for r in m.rows}
        assert "trip.t1" in ids and "conn.c1" in ids
        assert any(i.startswith("cut.") for i in ids)
        assert any(i.startswith("end.") for i in ids)
        cut = next(r for r in m.rows if r.id == "cut.B.r.600")
        coeffs = dict(cut.coeffs)
        assert coeffs["chg.c1.r1.rr"] == -1.0
        assert coeffs["chg.c1.rr.r1"] == 1.0
        assert cut.sense == ">=" and cut.rhs == 0.0

    def test_composition_requires_connection_constraints(self, two_trip):
        cg = contract(build(two_trip, "HD"))
        with pytest.raises(InvalidOptions):
            assemble(cg, ModelOptions(connection_constraints=False))

    def test_untouched_depot_constant_row(self, two_trip):
        import dataclasses
        from rollstock.instance import Depot
        inst = dataclasses.replace(
            two_trip, depots=two_trip.depots + (Depot("C", "r", 3, 3),))
        m = assemble(contract(build(inst, "HD")))
        row = next(r for r in m.rows if r.id == "cut.C.r.0")
        assert row.coeffs == () and row.rhs == -3.0 and row.sense == ">="


class TestLpFormat:
    @pytest.mark.parametrize("variant", ["hD", "HD", "hAbar", "HAbar"])
    def test_round_trip_hypergraph_models(self, two_trip, variant):
        m = assemble(build(two_trip, variant))
        again = parse_lp(write_lp(m))
        assert models_equal(m, again)

    def test_round_trip_composition_model(self, situation2):
        m = assemble(contract(build(situation2, "HD")))
        assert models_equal(m, parse_lp(write_lp(m)))

    def test_round_trip_relaxed(self, two_trip):
        m = assemble(build(two_trip, "hD")).relaxed()
        again = parse_lp(write_lp(m))
        assert models_equal(m, again)
        assert not any(v.integer for v in again.variables)

    def test_unbounded_variable_bound_line(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        text = write_lp(m)
        park = next(v.id for v in m.variables if m.kinds[v.id] == "Parking")
        assert f"0 <= {park}\n" in text or text.endswith(f"0 <= {park}")
        assert f"0 <= {park} <=" not in text

    def test_golden_two_trip_hd(self, two_trip):
        m = assemble(build(two_trip, "hD"))
        golden = (GOLDEN / "twotrip_hD.lp").read_text()
        assert write_lp(m) == golden

    def test_golden_dump_two_trip_hd(self, two_trip):
        golden = (GOLDEN / "twotrip_hD.dump").read_text()
        assert build(two_trip, "hD").dump() == golden

    def test_empty_model_round_trip(self):
        from rollstock.formulation import MilpModel
        m = MilpModel("empty", [], [])
        assert models_equal(m, parse_lp(write_lp(m)))
