"""Exhaustive ground-truth oracle for tiny instances.

Enumerates every composition choice per trip and every composition change
per connection (merged arcs for the small variants, the option of using no
change when the connection constraints are dropped), derives the forced
depot moves, and checks depot feasibility directly: prefix inventory counts
for the depot variants, an explicit unit matching for the direct-arc
variants. The cheapest feasible assignment is the integer optimum of the
corresponding model; branch and bound must reproduce it exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import LimitExceeded
from ..hypergraph import (
    Change,
    _small_pull_costs,
    enumerate_changes,
    variant_parts,
)
from ..instance import INITIAL, TERMINAL, Instance, closure_arcs


@dataclass
class OracleResult:
    status: str              # Optimal | Infeasible
    objective: float | None = None
    trip_choices: dict[str, object] | None = None
    change_choices: dict[str, object] | None = None


@dataclass(frozen=True)
class _SmallArc:
    """Merged small-variant connection hyperarc."""

    connection: str
    kind: str
    tails: frozenset  # (trip, pos, type)
    heads: frozenset
    cost: float
    sources: tuple[Change, ...]


def _small_groups(instance: Instance, conn) -> list[_SmallArc]:
    groups: dict[tuple, list[Change]] = {}
    for ch in enumerate_changes(instance, conn):
        pairs = tuple(sorted(((tp, a, r), (ts, b, r))
                             for (tp, a, ts, b, r) in ch.continuing))
        groups.setdefault(pairs, []).append(ch)
    rate = instance.costs.shunting_per_action
    out = []
    for pairs in sorted(groups):
        chs = groups[pairs]
        out.append(_SmallArc(
            connection=conn.id, kind=conn.kind,
            tails=frozenset(t for t, _ in pairs),
            heads=frozenset(h for _, h in pairs),
            cost=0.0 if conn.kind == "OneToOne" else rate,
            sources=tuple(chs)))
    return out


def _slots(units: tuple[str, ...]) -> frozenset:
    return frozenset((n, r) for n, r in enumerate(units, start=1))


def _match_units(supply: list[tuple[int, str]], demand: list[tuple[int, str]],
                 init: int, allowed) -> bool:
    """Bipartite check: can every pull-out be served by the start inventory
    or an allowed earlier pull-in? ``supply``/``demand`` carry opaque keys."""
    match: dict[int, int] = {}

    def augment(d: int, seen: set[int]) -> bool:
        for s in range(len(supply)):
            if s in seen or not allowed(supply[s][1], demand[d][1]):
                continue
            seen.add(s)
            if s not in match or augment(match[s], seen):
                match[s] = d
                return True
        return False

    served_by_init = 0
    order = sorted(range(len(demand)), key=lambda i: demand[i][0])
    unmatched = []
    for d in order:
        if not augment(d, set()):
            unmatched.append(d)
    return len(unmatched) <= init


def enumerate_oracle(instance: Instance, variant: str = "HD",
                     connection_constraints: bool = True,
                     trip_limit: int = 8,
                     combo_limit: int = 2_000_000) -> OracleResult:
    """Exhaustive integer optimum of one model variant.

    ``variant`` is a hypergraph variant name or ``"C"`` (which shares the
    full-depot solution space). Raises :class:`LimitExceeded` on instances
    beyond the enumeration budget.
    """
    if variant == "C":
        level, transfer, closure = "H", "D", False
    else:
        level, transfer, closure = variant_parts(variant)
    small = level == "h"
    if len(instance.trips) > trip_limit:
        raise LimitExceeded(f"{len(instance.trips)} trips exceeds oracle limit "
                            f"{trip_limit}")
    comps = instance.composition_by_id
    trips = list(instance.trips)

    if small:
        trip_options = {
            t.id: sorted({comps[p].units for p in t.allowed_compositions})
            for t in trips}
    else:
        trip_options = {t.id: sorted(t.allowed_compositions) for t in trips}

    combos = 1
    for opts in trip_options.values():
        combos *= len(opts)
    if combos > combo_limit:
        raise LimitExceeded(f"{combos} trip combinations exceed oracle budget")

    # cheapest-first per-trip options make the first DFS leaf a good incumbent
    def option_cost(t, opt):
        if small:
            pid = next(p for p in t.allowed_compositions if comps[p].units == opt)
        else:
            pid = opt
        return instance.trip_cost(t, comps[pid])

    for t in trips:
        trip_options[t.id].sort(key=lambda o, _t=t: (option_cost(_t, o), o))

    conn_changes = {c.id: enumerate_changes(instance, c) for c in instance.connections}
    conn_small = {c.id: _small_groups(instance, c) for c in instance.connections}
    pin_cost, pout_cost = _small_pull_costs(instance)

    if transfer == "A":
        if closure:
            pair_ok = None  # any time-feasible pair
        else:
            declared = {spec.key for spec in closure_arcs(instance, "declared")}
            pair_ok = declared
    else:
        pair_ok = None

    depots = {(d.station, d.unit_type): d for d in instance.all_depots()}
    dev_rate = instance.costs.ending_deviation_per_unit
    shunt_rate = instance.costs.shunting_per_action

    best_obj = None
    best_detail = None

    # depth-first over trips in timetable order: a connection's options are
    # checked the moment its last trip is assigned, and branches whose trip
    # cost already exceeds the incumbent are cut
    order = sorted(trips, key=lambda t: (t.dep_time, t.id))
    pos_of = {t.id: i for i, t in enumerate(order)}
    conns_at: dict[int, list] = {}
    for conn in instance.connections:
        done = max(pos_of[t] for t in (*conn.predecessors, *conn.successors))
        conns_at.setdefault(done, []).append(conn)

    chosen: dict[str, object] = {}
    conn_opts: dict[str, list] = {}

    def units_for(tid: str):
        return chosen[tid] if small else comps[chosen[tid]].units

    def conn_options_for(conn) -> list:
        opts: list = []
        if small:
            slot_sets = {t: _slots(units_for(t))
                         for t in (*conn.predecessors, *conn.successors)}
            for arc in conn_small[conn.id]:
                if all((pos, r) in slot_sets[t] for (t, pos, r) in arc.tails) and \
                   all((pos, r) in slot_sets[t] for (t, pos, r) in arc.heads):
                    opts.append(arc)
        else:
            for ch in conn_changes[conn.id]:
                if tuple(chosen[t] for t in conn.predecessors) == ch.pre and \
                        tuple(chosen[t] for t in conn.successors) == ch.post:
                    opts.append(ch)
        if not connection_constraints:
            opts.append(None)
        return opts

    def descend(idx: int, partial_cost: float):
        nonlocal best_obj, best_detail
        if best_obj is not None and partial_cost >= best_obj - 1e-12:
            return
        if idx == len(order):
            _evaluate_leaf(partial_cost)
            return
        t = order[idx]
        for opt in trip_options[t.id]:
            chosen[t.id] = opt
            saved = []
            ok = True
            for conn in conns_at.get(idx, []):
                opts = conn_options_for(conn)
                if not opts:
                    ok = False
                    break
                conn_opts[conn.id] = opts
                saved.append(conn.id)
            if ok:
                descend(idx + 1, partial_cost + option_cost(t, opt))
            for cid in saved:
                del conn_opts[cid]
            del chosen[t.id]

    def _evaluate_leaf(trip_cost: float):
        nonlocal best_obj, best_detail
        units_of = {t.id: units_for(t.id) for t in trips}
        option_lists = [conn_opts[c.id] for c in instance.connections]
        option_combos = 1
        for o in option_lists:
            option_combos *= len(o)
        if option_combos > combo_limit:
            raise LimitExceeded("connection option space exceeds oracle budget")

        for pick in itertools.product(*option_lists):
            obj = trip_cost
            moves: dict[tuple[str, str], list] = {}

            def add_move(station, r, time, direction, trip_key):
                moves.setdefault((station, r), []).append(
                    (time, direction, trip_key))

            ok = True
            for (conn, option) in zip(instance.connections, pick):
                pred_units = {t: units_of[t] for t in conn.predecessors}
                succ_units = {t: units_of[t] for t in conn.successors}
                if option is None:
                    # no composition change: everything through the depot
                    for t, units in pred_units.items():
                        tr = instance.trip_by_id[t]
                        for n, r in enumerate(units, 1):
                            add_move(tr.arr_station, r, tr.arr_time, "in", t)
                            obj += pin_cost.get((t, n, r), 0.0) if small else 0.0
                    for t, units in succ_units.items():
                        tr = instance.trip_by_id[t]
                        for n, r in enumerate(units, 1):
                            add_move(tr.dep_station, r, tr.dep_time, "out", t)
                            obj += pout_cost.get((t, n, r), 0.0) if small else 0.0
                elif isinstance(option, _SmallArc):
                    obj += option.cost
                    covered_t = {(t, n, r) for (t, n, r) in option.tails}
                    covered_h = {(t, n, r) for (t, n, r) in option.heads}
                    for t, units in pred_units.items():
                        tr = instance.trip_by_id[t]
                        for n, r in enumerate(units, 1):
                            if (t, n, r) not in covered_t:
                                add_move(tr.arr_station, r, tr.arr_time, "in", t)
                                obj += pin_cost.get((t, n, r), 0.0)
                    for t, units in succ_units.items():
                        tr = instance.trip_by_id[t]
                        for n, r in enumerate(units, 1):
                            if (t, n, r) not in covered_h:
                                add_move(tr.dep_station, r, tr.dep_time, "out", t)
                                obj += pout_cost.get((t, n, r), 0.0)
                else:
                    obj += option.actions * shunt_rate
                    for (t, n, r) in option.uncoupled:
                        tr = instance.trip_by_id[t]
                        add_move(tr.arr_station, r, tr.arr_time, "in", t)
                    for (t, n, r) in option.coupled:
                        tr = instance.trip_by_id[t]
                        add_move(tr.dep_station, r, tr.dep_time, "out", t)

            # staging of first and last trips
            for t in trips:
                units = units_of[t.id]
                if instance.predecessor_connection(t.id) is None:
                    for r in units:
                        add_move(t.dep_station, r, t.dep_time, "out", t.id)
                if instance.successor_connection(t.id) is None:
                    for r in units:
                        add_move(t.arr_station, r, t.arr_time, "in", t.id)

            # depot feasibility and ending deviations
            if best_obj is not None and obj >= best_obj:
                continue
            for (station, r), evs in moves.items():
                depot = depots.get((station, r))
                start = depot.start_inventory if depot else 0
                if transfer == "D":
                    level_now = start
                    for (time, direction, _t) in sorted(
                            evs, key=lambda e: (e[0], e[1] == "out")):
                        level_now += 1 if direction == "in" else -1
                        if level_now < 0:
                            ok = False
                            break
                else:
                    supply = [(time, (t, time)) for (time, d, t) in evs if d == "in"]
                    demand = [(time, (t, time)) for (time, d, t) in evs if d == "out"]

                    def allowed(s_key, d_key, _r=r):
                        (s_trip, s_time) = s_key
                        (d_trip, d_time) = d_key
                        if s_time > d_time:
                            return False
                        if pair_ok is None:
                            return True
                        return (_r, s_trip, d_trip) in pair_ok
                    if not _match_units(supply, demand, start, allowed):
                        ok = False
                if not ok:
                    break
            if not ok:
                continue

            for (station, r), d in depots.items():
                evs = moves.get((station, r), [])
                end = d.start_inventory + sum(1 if e[1] == "in" else -1 for e in evs)
                obj += abs(end - d.target_end_inventory) * dev_rate

            if best_obj is None or obj < best_obj - 1e-12:
                best_obj = obj
                best_detail = (dict(chosen), {c.id: p for c, p in
                                              zip(instance.connections, pick)})

    descend(0, 0.0)
    if best_obj is None:
        return OracleResult("Infeasible")
    return OracleResult("Optimal", best_obj, best_detail[0], best_detail[1])
