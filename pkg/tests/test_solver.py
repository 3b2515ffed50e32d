"""LP/IP solver correctness against scipy and the enumeration oracle."""

from fractions import Fraction

import numpy as np
import pytest

from rollstock.composition import contract
from rollstock.errors import LimitExceeded
from rollstock.formulation import MilpModel, Row, Variable, assemble
from rollstock.genbench import GenConfig, generate
from rollstock.hypergraph import build
from rollstock.instance import canonical_instances
from rollstock.solver import (
    dual_residual,
    enumerate_oracle,
    feasibility_residual,
    model_arrays,
    solve_ip,
    solve_lp,
)

scipy_opt = pytest.importorskip("scipy.optimize")

VARIANTS7 = ("hD", "hA", "HD", "HA", "hAbar", "HAbar", "C")


def _model(inst, variant):
    if variant == "C":
        return assemble(contract(build(inst, "HD")))
    return assemble(build(inst, variant))


def _scipy_lp_value(model):
    form = model_arrays(model)
    ub = np.where(np.isinf(form.ub), None, form.ub)
    bounds = [(form.lb[i], ub[i]) for i in range(len(form.lb))]
    res = scipy_opt.linprog(form.c, A_eq=form.A, b_eq=form.b, bounds=bounds,
                            method="highs")
    return res


class TestLp:
    @pytest.mark.parametrize("name", sorted(canonical_instances()))
    @pytest.mark.parametrize("variant", ["hD", "HD", "hAbar", "C"])
    def test_matches_scipy_on_canonicals(self, name, variant):
        inst = canonical_instances()[name]
        m = _model(inst, variant).relaxed()
        mine = solve_lp(m)
        ref = _scipy_lp_value(m)
        assert mine.status == "Optimal" and ref.status == 0
        assert mine.objective == pytest.approx(ref.fun, rel=1e-6, abs=1e-6)

    def test_matches_scipy_on_generated(self):
        for seed in range(1, 6):
            inst = generate(GenConfig(seed=seed, trips_per_line=3))
            for variant in ("hD", "HAbar", "C"):
                m = _model(inst, variant).relaxed()
                mine = solve_lp(m)
                ref = _scipy_lp_value(m)
                assert mine.objective == pytest.approx(ref.fun, rel=1e-6,
                                                       abs=1e-6), (seed, variant)

    def test_residuals_within_tolerance(self, two_trip):
        m = _model(two_trip, "HD").relaxed()
        sol = solve_lp(m)
        assert feasibility_residual(m, sol.values) <= 1e-7
        assert dual_residual(m, sol) <= 1e-6

    def test_infeasible_partition(self):
        m = MilpModel("bad", [Variable("x", 0.0, 0.0, False, 1.0)],
                      [Row("r", (("x", 1.0),), "=", 1.0)])
        assert solve_lp(m).status == "Infeasible"

    def test_unbounded_negative_cost_parking(self):
        m = MilpModel("ray", [Variable("p", 0.0, None, False, -1.0)],
                      [Row("r", (("p", 1.0),), ">=", 0.0)])
        assert solve_lp(m).status == "Unbounded"

    def test_exact_mode_returns_fractions(self, situation2):
        m = _model(situation2, "hD").relaxed()
        sol = solve_lp(m, exact=True)
        assert isinstance(sol.objective, Fraction)
        assert float(sol.objective) == pytest.approx(12.0)

    def test_determinism(self, situation2):
        m = _model(situation2, "HD").relaxed()
        a, b = solve_lp(m), solve_lp(m)
        assert a.objective == b.objective and a.values == b.values


class TestIp:
    @pytest.mark.parametrize("name", sorted(canonical_instances()))
    @pytest.mark.parametrize("variant", VARIANTS7)
    def test_matches_oracle_on_canonicals(self, name, variant):
        inst = canonical_instances()[name]
        ip = solve_ip(_model(inst, variant))
        orc = enumerate_oracle(inst, variant)
        assert ip.status == orc.status == "Optimal"
        assert ip.objective == pytest.approx(orc.objective, abs=1e-6)

    def test_lp_below_ip_everywhere(self):
        for name, inst in canonical_instances().items():
            for variant in VARIANTS7:
                m = _model(inst, variant)
                lp = solve_lp(m.relaxed())
                ip = solve_ip(m)
                assert lp.objective <= ip.objective + 1e-7, (name, variant)

    def test_integral_lp_needs_one_node(self, two_trip):
        m = _model(two_trip, "C")
        lp = solve_lp(m.relaxed())
        ip = solve_ip(m)
        assert lp.objective == pytest.approx(ip.objective)
        assert ip.nodes == 1

    def test_optimal_bound_matches_objective(self, situation2):
        ip = solve_ip(_model(situation2, "HD"))
        assert ip.status == "Optimal"
        assert ip.bound == pytest.approx(ip.objective)

    def test_node_limit_reports_bound(self, situation2):
        ip = solve_ip(_model(situation2, "hD"), node_limit=1, presolve=False)
        assert ip.status in ("NodeLimit", "Optimal")
        if ip.status == "NodeLimit":
            assert ip.bound is not None

    def test_exact_ip(self, situation2):
        ip = solve_ip(_model(situation2, "HD"), exact=True)
        assert isinstance(ip.objective, Fraction)
        assert float(ip.objective) == pytest.approx(32.0)

    def test_matches_scipy_milp_on_generated(self):
        for seed in (3, 7):
            inst = generate(GenConfig(seed=seed, trips_per_line=3))
            for variant in ("hD", "C"):
                m = _model(inst, variant)
                form = model_arrays(m)
                n = len(form.var_ids)
                integrality = np.zeros(form.A.shape[1])
                integrality[:n] = form.integer.astype(float)
                res = scipy_opt.milp(
                    c=form.c,
                    constraints=scipy_opt.LinearConstraint(form.A, form.b, form.b),
                    bounds=scipy_opt.Bounds(form.lb, form.ub),
                    integrality=integrality)
                ip = solve_ip(m)
                assert ip.objective == pytest.approx(res.fun, rel=1e-6), (seed, variant)


class TestOracle:
    def test_trip_limit(self):
        inst = generate(GenConfig(seed=1, lines=3, trips_per_line=4))
        with pytest.raises(LimitExceeded):
            enumerate_oracle(inst, "HD", trip_limit=4)

    def test_oracle_matches_bb_on_random_instances(self):
        for seed in range(1, 11):
            cfg = GenConfig(seed=seed, lines=1 + seed % 2,
                            trips_per_line=2 + seed % 2,
                            unit_types=1 + seed % 2)
            inst = generate(cfg)
            for variant in ("hD", "HD", "C"):
                ip = solve_ip(_model(inst, variant))
                orc = enumerate_oracle(inst, variant)
                assert ip.status == orc.status
                if ip.status == "Optimal":
                    assert ip.objective == pytest.approx(orc.objective,
                                                         abs=1e-6), (seed, variant)

    def test_infeasible_instance_both_paths(self, two_trip):
        import dataclasses
        conn = dataclasses.replace(two_trip.connections[0],
                                   allowed_changes=(("rr", "b1"),))
        inst = dataclasses.replace(two_trip, connections=(conn,))
        orc = enumerate_oracle(inst, "HD")
        ip = solve_ip(_model(inst, "HD"))
        assert orc.status == ip.status == "Infeasible"
