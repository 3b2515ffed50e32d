"""Cross-model analysis: solution maps, value relations, cost breakdowns.

The five models are provably related: with the closure of direct arcs the
direct-arc variants match the depot variants, the composition model always
matches the full depot variant, and the small variants are relaxations of
the full ones. This module implements the constructive maps behind those
relations (re-routing direct arcs over depot paths, aggregating composition
copies, completing composition flows with depot arcs), verifies the value
relations on actual solves, replays small-variant solutions against the
full model to certify illegal couplings, recomputes solution costs by
component, and bundles everything into comparison reports.
"""

from __future__ import annotations

import itertools
import json
import time as _time
from dataclasses import dataclass, field
from fractions import Fraction

from .composition import CompositionGraph, contract, depot_moves_from_tags
from .errors import CutViolated, IllegalFlow, LimitExceeded, MissingPathBackref
from .formulation import ModelOptions, assemble
from .hypergraph import (
    DepotNode,
    Hypergraph,
    build,
    enumerate_changes,
    variant_parts,
)
from .instance import Instance, closure_arcs
from .solver import IpSolution, LpSolution, enumerate_oracle, solve_ip, solve_lp
from .solver.oracle import _match_units

INFEASIBLE = float("inf")


@dataclass(frozen=True)
class CostBreakdown:
    composition_cost: object
    coupling_cost: object
    deviation_cost: object

    @property
    def total(self):
        return self.composition_cost + self.coupling_cost + self.deviation_cost


@dataclass(frozen=True)
class TheoremVerdict:
    relation: str   # a | b | c | d | e
    mp: str         # LP | IP
    lhs_name: str
    rhs_name: str
    lhs: object
    rhs: object
    verdict: str    # EqualityHolds | InequalityHolds | StrictGap | VIOLATION


@dataclass
class VariantResult:
    variant: str
    n_vars: int = 0
    n_rows: int = 0
    lp_value: object = None
    ip_value: object = None
    lp_status: str = ""
    ip_status: str = ""
    breakdown: CostBreakdown | None = None
    replay_ok: bool | None = None
    replay_reason: str = ""
    replace_changes: int = 0
    seconds: float = 0.0
    error: str = ""


@dataclass
class ComparisonReport:
    instance: str
    rows: list[VariantResult]
    verdicts: list[TheoremVerdict]
    closure: bool
    connection_constraints: bool


# ---------------------------------------------------------------------------
# solution maps (Theorem-1 proof constructions)
# ---------------------------------------------------------------------------

def _timeline_segments(g_hd: Hypergraph, station: str, unit_type: str):
    """Parking arcs of one depot timeline in time order, with node spans."""
    segs = []
    for h in g_hd.hyperarcs:
        if h.kind == "Parking" and h.tags.get("station") == station and \
                h.tags.get("unit_type") == unit_type:
            segs.append(h)
    def pos(node: DepotNode):
        order = {"initial": 0, "mid": 1, "terminal": 2}
        return (order[node.role], node.time)
    segs.sort(key=lambda h: pos(h.base_arcs[0][0]))
    return segs


def _node_pos(node: DepotNode) -> float:
    if node.role == "initial":
        return float("-inf")
    if node.role == "terminal":
        return float("inf")
    return float(node.time)


def _add_parking_span(x: dict, g_hd: Hypergraph, station: str, unit_type: str,
                      t_from: int | None, t_to: int | None, value) -> None:
    """Add ``value`` along the timeline from t_from (None = initial) to
    t_to (None = terminal)."""
    lo = float("-inf") if t_from is None else float(t_from)
    hi = float("inf") if t_to is None else float(t_to)
    for h in _timeline_segments(g_hd, station, unit_type):
        tail, head = h.base_arcs[0]
        if _node_pos(tail) >= lo and _node_pos(head) <= hi:
            x[h.id] = x.get(h.id, 0) + value


def map_HA_to_HD(g_ha: Hypergraph, values: dict, g_hd: Hypergraph) -> dict:
    """Re-route direct-arc flow along pull-in, parking, pull-out paths."""
    if variant_parts(g_ha.variant)[1] != "A" or g_hd.variant != "HD":
        raise ValueError("expects an HA-variant flow and the HD graph")
    pin_at = {h.base_arcs[0][0]: h.id for h in g_hd.hyperarcs if h.kind == "PullIn"}
    pout_at = {h.base_arcs[0][1]: h.id for h in g_hd.hyperarcs if h.kind == "PullOut"}
    x: dict = {}
    for h in g_ha.hyperarcs:
        v = values.get(h.id, 0)
        if not v:
            continue
        tags = h.tags
        if h.kind in ("TripService", "ConnectionChange", "InventoryDeviation"):
            x[h.id] = x.get(h.id, 0) + v
        elif h.kind == "PullIn":
            node = h.base_arcs[0][0]
            x[pin_at[node]] = x.get(pin_at[node], 0) + v
            _add_parking_span(x, g_hd, tags["station"], node.unit_type,
                              tags["time"], None, v)
        elif h.kind == "PullOut":
            node = h.base_arcs[0][1]
            x[pout_at[node]] = x.get(pout_at[node], 0) + v
            _add_parking_span(x, g_hd, tags["station"], node.unit_type,
                              None, tags["time"], v)
        elif h.kind == "Parking":
            _add_parking_span(x, g_hd, tags["station"], tags["unit_type"],
                              None, None, v)
        elif h.kind == "DirectConnection":
            if "pull_in_time" not in tags:
                raise MissingPathBackref(f"direct arc {h.id} lacks its depot path")
            src, dst = h.base_arcs[0]
            x[pin_at[src]] = x.get(pin_at[src], 0) + v
            x[pout_at[dst]] = x.get(pout_at[dst], 0) + v
            _add_parking_span(x, g_hd, tags["station"], tags["unit_type"],
                              tags["pull_in_time"], tags["pull_out_time"], v)
    return x


def map_H_to_h(g_full: Hypergraph, values: dict, g_small: Hypergraph) -> dict:
    """Aggregate flow over all composition-labeled copies."""
    comps = g_full.instance.composition_by_id
    small_chg_by_arcs = {}
    for cid, hids in g_small.connection_arcs.items():
        for hid in hids:
            h = g_small.by_id[hid]
            small_chg_by_arcs[(cid, frozenset(h.base_arcs))] = hid

    def strip(node):
        if isinstance(node, DepotNode):
            return node
        return type(node)(node.trip, node.side, node.position, node.unit_type, "")

    x: dict = {}
    for h in g_full.hyperarcs:
        v = values.get(h.id, 0)
        if not v:
            continue
        if h.kind == "TripService":
            seq = comps[h.tags["comp"]].units
            target = f"trip.{h.tags['trip']}." + "_".join(seq)
        elif h.kind == "ConnectionChange":
            arcs = frozenset((strip(a), strip(b)) for a, b in h.base_arcs)
            target = small_chg_by_arcs[(h.tags["connection"], arcs)]
        elif h.kind == "PullIn":
            node = h.base_arcs[0][0]
            target = f"pin.{node.trip}.{node.position}.{node.unit_type}"
        elif h.kind == "PullOut":
            node = h.base_arcs[0][1]
            target = f"pout.{node.trip}.{node.position}.{node.unit_type}"
        elif h.kind == "DirectConnection":
            src, dst = h.base_arcs[0]
            target = (f"dca.{src.unit_type}.{src.trip}.{src.position}"
                      f".{dst.trip}.{dst.position}")
        else:
            target = h.id  # parking and deviation arcs coincide
        x[target] = x.get(target, 0) + v
    return x


def extend_C_to_HD(cg: CompositionGraph, values: dict, g_hd: Hypergraph) -> dict:
    """Complete a composition-model solution with depot arcs.

    The depot completion exists exactly when the cut constraints hold; the
    per-position pull arcs are forced by the selected changes and the
    parking flows are the running inventory levels.
    """
    instance = cg.instance
    x: dict = {}
    pulls: dict[tuple[str, str], list] = {}
    conn_of = {c.id: c for c in instance.connections}
    for a in cg.arcs:
        v = values.get(a.id, 0)
        if not v:
            continue
        x[a.id] = v
        tags = a.tags
        if a.kind == "TripArc":
            for (station, r, time, direction, count) in depot_moves_from_tags(tags, instance):
                comp = tags["comp"]
                trip = tags["trip"]
                for n, rr in enumerate(instance.composition_by_id[comp].units, 1):
                    if rr != r:
                        continue
                    arc = (f"pout.{trip}.{comp}.{n}" if direction == "out"
                           else f"pin.{trip}.{comp}.{n}")
                    x[arc] = x.get(arc, 0) + v
                pulls.setdefault((station, r), []).append((time, direction, count * v))
        else:
            conn = conn_of[tags["connection"]]
            pre_of = dict(zip(conn.predecessors, tags["pre"]))
            post_of = dict(zip(conn.successors, tags["post"]))
            for (t, n, r) in tags.get("uncoupled", ()):
                arc = f"pin.{t}.{pre_of[t]}.{n}"
                x[arc] = x.get(arc, 0) + v
                tr = instance.trip_by_id[t]
                pulls.setdefault((tr.arr_station, r), []).append(
                    (tr.arr_time, "in", v))
            for (t, n, r) in tags.get("coupled", ()):
                arc = f"pout.{t}.{post_of[t]}.{n}"
                x[arc] = x.get(arc, 0) + v
                tr = instance.trip_by_id[t]
                pulls.setdefault((tr.dep_station, r), []).append(
                    (tr.dep_time, "out", v))
    for vid, v in values.items():
        if vid.startswith("dev.") and v:
            x[vid] = v

    for depot in instance.all_depots():
        key = (depot.station, depot.unit_type)
        events = sorted(pulls.get(key, []), key=lambda e: (e[0], e[1] == "out"))
        segments = _timeline_segments(g_hd, depot.station, depot.unit_type)
        level = depot.start_inventory
        idx = 0
        for seg in segments:
            tail = seg.base_arcs[0][0]
            t_tail = _node_pos(tail)
            while idx < len(events) and events[idx][0] <= t_tail:
                _, direction, v = events[idx]
                level = level + v if direction == "in" else level - v
                idx += 1
            if level < -1e-9:
                raise CutViolated(f"depot {key} inventory drops to {level}")
            if level:
                x[seg.id] = x.get(seg.id, 0) + level
    return x


# ---------------------------------------------------------------------------
# feasibility replay of small-variant solutions
# ---------------------------------------------------------------------------

def replay_in_full(instance: Instance, g_small: Hypergraph, values: dict,
                   tol: float = 1e-6) -> tuple[bool, str]:
    """Check whether a small-variant integer solution lifts to the full model.

    The lift assigns a composition to every trip and requires every selected
    merged connection hyperarc to come from a legal composition change
    between the assigned compositions with exactly the same continuing
    movements. Failure certifies an illegal coupling.
    """
    comps = instance.composition_by_id
    seq_choice: dict[str, tuple[str, ...]] = {}
    for t, hids in g_small.trip_arcs.items():
        for hid in hids:
            if values.get(hid, 0) > 1 - tol:
                seq_choice[t] = g_small.by_id[hid].tags["seq"]
    if len(seq_choice) != len(instance.trips):
        return False, "not every trip runs exactly one composition"

    chosen_arc: dict[str, object] = {}
    for c, hids in g_small.connection_arcs.items():
        for hid in hids:
            if values.get(hid, 0) > 1 - tol:
                chosen_arc[c] = g_small.by_id[hid]

    candidates = {t: sorted(p for p in instance.trip_by_id[t].allowed_compositions
                            if comps[p].units == seq_choice[t])
                  for t in seq_choice}
    trip_ids = sorted(candidates)
    for combo in itertools.product(*(candidates[t] for t in trip_ids)):
        assign = dict(zip(trip_ids, combo))
        ok = True
        for conn in instance.connections:
            arc = chosen_arc.get(conn.id)
            if arc is None:
                continue  # no change selected (connection constraints off)
            want = frozenset(((a.trip, a.position, a.unit_type),
                              (b.trip, b.position, b.unit_type))
                             for a, b in arc.base_arcs)
            found = False
            for ch in enumerate_changes(instance, conn):
                if tuple(assign[t] for t in conn.predecessors) != ch.pre:
                    continue
                if tuple(assign[t] for t in conn.successors) != ch.post:
                    continue
                have = frozenset(((tp, a, r), (ts, b, r))
                                 for (tp, a, ts, b, r) in ch.continuing)
                if have == want:
                    found = True
                    break
            if not found:
                ok = False
                break
        if ok:
            return True, ""
    return False, ("no composition labeling admits the selected changes; "
                   "the aggregated solution uses an illegal coupling")


# ---------------------------------------------------------------------------
# cost breakdown
# ---------------------------------------------------------------------------

def cost_breakdown(instance: Instance, graph, values: dict,
                   exact: bool = False) -> CostBreakdown:
    """Recompute cost components from the selected movements.

    Composition cost is mileage plus seat shortage of the operated trips;
    coupling cost counts shunt actions (block moves in the full variants,
    the additive per-arc attribution in the small ones); deviation cost
    prices the ending-inventory slack. The total equals the model objective.
    """
    from .solver.simplex import to_fraction

    def num(v):
        return to_fraction(v) if exact else v

    zero = Fraction(0) if exact else 0.0
    comp_cost = zero
    coup_cost = zero
    dev_cost = zero
    rate = num(instance.costs.shunting_per_action)
    dev_rate = num(instance.costs.ending_deviation_per_unit)
    comps = instance.composition_by_id

    if isinstance(graph, CompositionGraph):
        items = [(a.id, a.kind, a.tags) for a in graph.arcs]
        items += [(f"dev.{e.station}.{e.unit_type}.{side}", "InventoryDeviation", {})
                  for e in graph.end_inventories for side in ("surplus", "deficit")]
    else:
        items = [(h.id, h.kind, h.tags) for h in graph.hyperarcs]

    small = isinstance(graph, Hypergraph) and graph.level == "h"
    for hid, kind, tags in items:
        v = values.get(hid, 0)
        if not v:
            continue
        if kind in ("TripService", "TripArc"):
            trip = instance.trip_by_id[tags["trip"]]
            if "comp" in tags:
                comp = comps[tags["comp"]]
            else:
                comp = next(comps[p] for p in trip.allowed_compositions
                            if comps[p].units == tags["seq"])
            comp_cost += v * num(instance.trip_cost(trip, comp))
        elif kind in ("ConnectionChange", "CompositionArc"):
            if "actions" in tags:
                coup_cost += v * tags["actions"] * rate
            else:
                conn = next(c for c in instance.connections
                            if c.id == tags["connection"])
                coup_cost += v * (zero if conn.kind == "OneToOne" else rate)
        elif kind in ("PullIn", "PullOut", "DirectConnection"):
            if small:
                coup_cost += v * num(graph.by_id[hid].cost)
        elif kind == "InventoryDeviation":
            dev_cost += v * dev_rate
    return CostBreakdown(comp_cost, coup_cost, dev_cost)


# ---------------------------------------------------------------------------
# solving helpers
# ---------------------------------------------------------------------------

def build_variant(instance: Instance, variant: str, closure: bool = True):
    """Graph of a variant; 'C' goes through the HD contraction."""
    if variant == "C":
        return contract(build(instance, "HD"))
    name = variant
    if variant in ("hA", "HA") and closure:
        name = variant + "bar"
    return build(instance, name)


def solve_variant(instance: Instance, variant: str, mp: str,
                  closure: bool = True, connection_constraints: bool = True,
                  exact: bool = False, tol: float = 1e-7,
                  node_limit: int = 200000):
    """(value, solution, model, graph) of one variant and mode."""
    graph = build_variant(instance, variant, closure)
    opts = ModelOptions(connection_constraints=connection_constraints)
    if variant == "C":
        opts = ModelOptions(connection_constraints=True)
    model = assemble(graph, opts)
    if mp == "LP":
        sol = solve_lp(model.relaxed(), tol=tol, exact=exact)
        value = sol.objective if sol.status == "Optimal" else (
            INFEASIBLE if sol.status == "Infeasible" else -INFEASIBLE)
    else:
        sol = solve_ip(model, tol=tol, exact=exact, node_limit=node_limit)
        value = sol.objective if sol.status == "Optimal" else (
            INFEASIBLE if sol.status == "Infeasible" else sol.objective)
    return value, sol, model, graph


def _verdict(relation: str, expect: str, lhs, rhs, tol) -> str:
    if lhs == INFEASIBLE and rhs == INFEASIBLE:
        return "EqualityHolds"
    if lhs == INFEASIBLE:
        return "InequalityHolds" if expect in ("ge", "eq-if-closure") else "VIOLATION"
    if rhs == INFEASIBLE:
        return "VIOLATION" if expect in ("ge", "eq", "eq-if-closure") else "StrictGap"
    diff = lhs - rhs
    scale = 1 + abs(lhs) + abs(rhs)
    equal = abs(diff) <= tol * scale if tol else diff == 0
    if expect == "eq":
        return "EqualityHolds" if equal else "VIOLATION"
    if expect == "eq-if-closure":
        return "EqualityHolds" if equal else "VIOLATION"
    if expect == "ge":  # lhs >= rhs
        if equal:
            return "EqualityHolds"
        return "InequalityHolds" if diff > 0 else "VIOLATION"
    if expect == "le":  # lhs <= rhs
        if equal:
            return "InequalityHolds"
        return "StrictGap" if diff < 0 else "VIOLATION"
    raise ValueError(expect)


def verify_theorem1(instance: Instance, mp: str = "IP", closure: bool = True,
                    exact: bool = False, tol: float = 1e-6,
                    values: dict | None = None) -> list[TheoremVerdict]:
    """Check the five value relations between the models on actual solves.

    Relations: a) HA >= HD, b) hA >= hD (both with equality under the
    closure), c) hA <= HA, d) hD <= HD, e) HD = C.
    """
    if values is None:
        values = {}
        for variant in ("hA", "HA", "hD", "HD", "C"):
            values[variant], _, _, _ = solve_variant(
                instance, variant, mp, closure=closure, exact=exact)
    v = values
    cmp_tol = 0 if exact else tol
    spec = [
        ("a", "HA", "HD", "eq-if-closure" if closure else "ge"),
        ("b", "hA", "hD", "eq-if-closure" if closure else "ge"),
        ("c", "hA", "HA", "le"),
        ("d", "hD", "HD", "le"),
        ("e", "HD", "C", "eq"),
    ]
    out = []
    for rel, lhs_name, rhs_name, expect in spec:
        out.append(TheoremVerdict(
            rel, mp, lhs_name, rhs_name, v[lhs_name], v[rhs_name],
            _verdict(rel, expect, v[lhs_name], v[rhs_name], cmp_tol)))
    return out


# ---------------------------------------------------------------------------
# Corollary: solution-set projection equality
# ---------------------------------------------------------------------------

def _integer_solution_sets(instance: Instance, trip_limit: int = 8,
                           connection_constraints: bool = True):
    """All integer solutions of HAbar / HD / C projected onto the shared
    trip and change coordinates, as three sets of frozensets of arc ids."""
    if len(instance.trips) > trip_limit:
        raise LimitExceeded(f"{len(instance.trips)} trips exceeds projection limit")
    comps = instance.composition_by_id
    trips = list(instance.trips)
    conn_changes = {c.id: enumerate_changes(instance, c)
                    for c in instance.connections}
    depots = {(d.station, d.unit_type): d for d in instance.all_depots()}

    cg = contract(build(instance, "HD"))
    cut_rows = cg.cuts

    sets = {"HAbar": set(), "HD": set(), "C": set()}
    trip_ids = [t.id for t in trips]
    options = [sorted(t.allowed_compositions) for t in trips]
    for combo in itertools.product(*options):
        chosen = dict(zip(trip_ids, combo))
        pick_lists = []
        feasible = True
        for conn in instance.connections:
            opts = [ch for ch in conn_changes[conn.id]
                    if tuple(chosen[t] for t in conn.predecessors) == ch.pre
                    and tuple(chosen[t] for t in conn.successors) == ch.post]
            if not connection_constraints:
                opts = opts + [None]
            if not opts:
                feasible = False
                break
            pick_lists.append(opts)
        if not feasible:
            continue
        for pick in itertools.product(*pick_lists):
            ids = [f"trip.{t}.{chosen[t]}" for t in trip_ids]
            moves: dict[tuple[str, str], list] = {}
            for conn, ch in zip(instance.connections, pick):
                if ch is None:
                    for t in conn.predecessors:
                        tr = instance.trip_by_id[t]
                        for r in comps[chosen[t]].units:
                            moves.setdefault((tr.arr_station, r), []).append(
                                (tr.arr_time, "in", t))
                    for t in conn.successors:
                        tr = instance.trip_by_id[t]
                        for r in comps[chosen[t]].units:
                            moves.setdefault((tr.dep_station, r), []).append(
                                (tr.dep_time, "out", t))
                    continue
                ids.append(ch.key)
                for (t, _n, r) in ch.uncoupled:
                    tr = instance.trip_by_id[t]
                    moves.setdefault((tr.arr_station, r), []).append(
                        (tr.arr_time, "in", t))
                for (t, _n, r) in ch.coupled:
                    tr = instance.trip_by_id[t]
                    moves.setdefault((tr.dep_station, r), []).append(
                        (tr.dep_time, "out", t))
            for t in trips:
                if instance.predecessor_connection(t.id) is None:
                    for r in comps[chosen[t.id]].units:
                        moves.setdefault((t.dep_station, r), []).append(
                            (t.dep_time, "out", t.id))
                if instance.successor_connection(t.id) is None:
                    for r in comps[chosen[t.id]].units:
                        moves.setdefault((t.arr_station, r), []).append(
                            (t.arr_time, "in", t.id))
            key = frozenset(ids)

            # HD: running inventory must stay nonnegative
            hd_ok = True
            for (station, r), evs in moves.items():
                depot = depots.get((station, r))
                level = depot.start_inventory if depot else 0
                for (tau, direction, _t) in sorted(
                        evs, key=lambda e: (e[0], e[1] == "out")):
                    level += 1 if direction == "in" else -1
                    if level < 0:
                        hd_ok = False
                        break
                if not hd_ok:
                    break
            if hd_ok:
                sets["HD"].add(key)

            # HAbar: explicit unit matching over the closure
            ha_ok = True
            for (station, r), evs in moves.items():
                depot = depots.get((station, r))
                start = depot.start_inventory if depot else 0
                supply = [(tau, tau) for (tau, d, _t) in evs if d == "in"]
                demand = [(tau, tau) for (tau, d, _t) in evs if d == "out"]
                if not _match_units(supply, demand, start,
                                    lambda s, d: s <= d):
                    ha_ok = False
                    break
            if ha_ok:
                sets["HAbar"].add(key)

            # C: evaluate the cut rows of the assembled composition model
            if connection_constraints:
                selected = set(ids)
                c_ok = True
                for cut in cut_rows:
                    level = cut.start
                    level -= sum(n for aid, n in cut.outs if aid in selected)
                    level += sum(n for aid, n in cut.ins if aid in selected)
                    if level < 0:
                        c_ok = False
                        break
                if c_ok:
                    sets["C"].add(key)
    return sets


def verify_corollary_projection(instance: Instance, trip_limit: int = 8,
                                connection_constraints: bool = True) -> dict:
    """Compare the projected integer solution sets of HAbar, HD, and C."""
    sets = _integer_solution_sets(instance, trip_limit, connection_constraints)
    report = {
        "n_HAbar": len(sets["HAbar"]),
        "n_HD": len(sets["HD"]),
        "n_C": len(sets["C"]) if connection_constraints else None,
        "HAbar_eq_HD": sets["HAbar"] == sets["HD"],
    }
    if connection_constraints:
        report["HD_eq_C"] = sets["HD"] == sets["C"]
        report["equal"] = report["HAbar_eq_HD"] and report["HD_eq_C"]
    else:
        report["equal"] = report["HAbar_eq_HD"]
    return report


# ---------------------------------------------------------------------------
# comparison reports
# ---------------------------------------------------------------------------

ALL_VARIANTS = ("hD", "hA", "HD", "HA", "C")
SEVEN_VARIANTS = ("hD", "hA", "hAbar", "HD", "HA", "HAbar", "C")


def compare(instance: Instance, variants=ALL_VARIANTS, closure: bool = True,
            connection_constraints: bool = True, exact: bool = False,
            tol: float = 1e-7, node_limit: int = 200000,
            with_timings: bool = True) -> ComparisonReport:
    """Solve the requested variants (LP and IP) and tabulate the outcome.

    Plain ``hA``/``HA`` rows follow the ``closure`` flag; explicit
    ``hAbar``/``HAbar`` rows always use the closure.
    """
    rows = []
    values_lp: dict[str, object] = {}
    values_ip: dict[str, object] = {}
    for variant in variants:
        row = VariantResult(variant=variant)
        started = _time.perf_counter()
        use_closure = closure or variant.endswith("bar")
        try:
            lp_val, lp_sol, model, graph = solve_variant(
                instance, variant, "LP", use_closure, connection_constraints,
                exact, tol, node_limit)
            ip_val, ip_sol, _, _ = solve_variant(
                instance, variant, "IP", use_closure, connection_constraints,
                exact, tol, node_limit)
            row.n_vars, row.n_rows = model.stats()
            row.lp_value, row.ip_value = lp_val, ip_val
            row.lp_status, row.ip_status = lp_sol.status, ip_sol.status
            values_lp[variant], values_ip[variant] = lp_val, ip_val
            if ip_sol.status == "Optimal":
                row.breakdown = cost_breakdown(instance, graph, ip_sol.values,
                                               exact=exact)
                if isinstance(graph, Hypergraph):
                    row.replace_changes = sum(
                        1 for h in graph.hyperarcs
                        if h.kind == "ConnectionChange" and h.tags.get("replace")
                        and ip_sol.values.get(h.id, 0) > 0.5)
                if isinstance(graph, Hypergraph) and graph.level == "h":
                    ok, reason = replay_in_full(instance, graph, ip_sol.values)
                    row.replay_ok, row.replay_reason = ok, reason
        except Exception as e:  # report per-variant failures, keep going
            row.error = f"{type(e).__name__}: {e}"
        row.seconds = _time.perf_counter() - started if with_timings else 0.0
        rows.append(row)

    verdicts: list[TheoremVerdict] = []
    needed = {"hA", "HA", "hD", "HD", "C"}
    if needed <= set(values_ip):
        verdicts += verify_theorem1(instance, "LP", closure, exact,
                                    values=values_lp)
        verdicts += verify_theorem1(instance, "IP", closure, exact,
                                    values=values_ip)
    return ComparisonReport(instance.name, rows, verdicts, closure,
                            connection_constraints)


def _fmt_val(v) -> str:
    if v is None:
        return "-"
    if v == INFEASIBLE:
        return "infeasible"
    if isinstance(v, Fraction):
        return f"{float(v):.4f}"
    return f"{v:.4f}"


def render_text(report: ComparisonReport, with_timings: bool = True) -> str:
    head = ["variant", "vars", "rows", "LP", "IP", "comp", "coup", "dev",
            "replay"]
    if with_timings:
        head.append("sec")
    lines = [f"instance {report.instance}  closure={report.closure}  "
             f"connection_constraints={report.connection_constraints}"]
    table = [head]
    for r in report.rows:
        if r.error:
            row = [r.variant, "-", "-", r.error, "", "", "", "", ""]
        else:
            bd = r.breakdown
            row = [r.variant, str(r.n_vars), str(r.n_rows),
                   _fmt_val(r.lp_value), _fmt_val(r.ip_value),
                   _fmt_val(bd.composition_cost) if bd else "-",
                   _fmt_val(bd.coupling_cost) if bd else "-",
                   _fmt_val(bd.deviation_cost) if bd else "-",
                   {None: "-", True: "ok", False: "ILLEGAL"}[r.replay_ok]]
        if with_timings:
            row.append(f"{r.seconds:.2f}")
        table.append(row)
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    if report.verdicts:
        lines.append("")
        lines.append("theorem relations:")
        for v in report.verdicts:
            lines.append(f"  {v.relation}/{v.mp}: {v.lhs_name}={_fmt_val(v.lhs)} "
                         f"{v.rhs_name}={_fmt_val(v.rhs)} -> {v.verdict}")
    return "\n".join(lines) + "\n"


def render_json(report: ComparisonReport, with_timings: bool = True) -> str:
    def num(v):
        if v is None:
            return None
        if v == INFEASIBLE:
            return "infeasible"
        return float(v)

    payload = {
        "instance": report.instance,
        "closure": report.closure,
        "connection_constraints": report.connection_constraints,
        "rows": [
            {
                "variant": r.variant,
                "vars": r.n_vars,
                "rows": r.n_rows,
                "lp": num(r.lp_value),
                "ip": num(r.ip_value),
                "lp_status": r.lp_status,
                "ip_status": r.ip_status,
                "breakdown": {
                    "composition": num(r.breakdown.composition_cost),
                    "coupling": num(r.breakdown.coupling_cost),
                    "deviation": num(r.breakdown.deviation_cost),
                    "total": num(r.breakdown.total),
                } if r.breakdown else None,
                "replay_ok": r.replay_ok,
                "replace_changes": r.replace_changes,
                "error": r.error or None,
                **({"seconds": round(r.seconds, 4)} if with_timings else {}),
            }
            for r in report.rows
        ],
        "verdicts": [
            {"relation": v.relation, "mp": v.mp, "lhs": v.lhs_name,
             "rhs": v.rhs_name, "lhs_value": num(v.lhs),
             "rhs_value": num(v.rhs), "verdict": v.verdict}
            for v in report.verdicts
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# rotation diagram
# ---------------------------------------------------------------------------

def rotation_svg(instance: Instance, graph: Hypergraph, values: dict) -> str:
    """Static time-space diagram of the decomposed unit rotations."""
    from .hypergraph import decompose_paths, EventNode

    int_values = {k: int(round(v)) for k, v in values.items()}
    paths = decompose_paths(graph, int_values)
    stations = instance.stations
    y_of = {s: 40 + 60 * i for i, s in enumerate(stations)}
    t_min = min((t.dep_time for t in instance.trips), default=0)
    t_max = max((t.arr_time for t in instance.trips), default=1)
    span = max(1, t_max - t_min)
    width, height = 900, 40 + 60 * len(stations) + 40

    def x_of(tau):
        return 60 + 780 * (tau - t_min) / span

    colors = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#f39c12", "#16a085"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">',
             '<rect width="100%" height="100%" fill="white"/>']
    for s, y in y_of.items():
        parts.append(f'<line x1="50" y1="{y}" x2="870" y2="{y}" '
                     'stroke="#ccc"/>')
        parts.append(f'<text x="8" y="{y + 4}" font-size="12">{s}</text>')
    for k, path in enumerate(paths):
        color = colors[k % len(colors)]
        points = []
        for node in path:
            if isinstance(node, EventNode):
                trip = instance.trip_by_id[node.trip]
                if node.side == "dep":
                    points.append((x_of(trip.dep_time), y_of[trip.dep_station]))
                else:
                    points.append((x_of(trip.arr_time), y_of[trip.arr_station]))
            elif node.role == "mid":
                points.append((x_of(node.time), y_of[node.station]))
        if len(points) >= 2:
            pts = " ".join(f"{x:.1f},{y + 3 * (k % 5) - 6:.1f}" for x, y in points)
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
