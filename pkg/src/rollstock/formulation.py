"""Solver-agnostic MILP assembly and LP-format export.

``assemble`` turns a built hypergraph or composition graph into a
:class:`MilpModel`: flow conservation at every node, one composition per
trip, one composition change per connection (omittable for the hypergraph
variants only), unit bounds except on parking and deviation arcs, and
integrality unless relaxed. The composition model replaces depot flow
conservation by cumulative inventory cuts plus a soft end-inventory row
with a surplus/deficit deviation pair per depot.

Models export to the CPLEX-style LP text format and re-parse from it
coefficient-for-coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .composition import CompositionGraph
from .errors import InvalidOptions
from .hypergraph import Hypergraph, node_key

_FMT = "%.17g"


@dataclass(frozen=True)
class Variable:
    id: str
    lower: float = 0.0
    upper: float | None = None   # None = unbounded above
    integer: bool = False
    cost: float = 0.0


@dataclass(frozen=True)
class Row:
    id: str
    coeffs: tuple[tuple[str, float], ...]  # (var id, nonzero coefficient)
    sense: str                             # "=", "<=", ">="
    rhs: float


@dataclass(frozen=True)
class ModelOptions:
    relax: bool = False
    connection_constraints: bool = True
    variant: str = ""


@dataclass
class MilpModel:
    name: str
    variables: list[Variable]
    rows: list[Row]
    options: ModelOptions = field(default_factory=ModelOptions)
    kinds: dict[str, str] = field(default_factory=dict)  # var id -> hyperarc kind

    @property
    def var_ids(self) -> list[str]:
        return [v.id for v in self.variables]

    def stats(self) -> tuple[int, int]:
        return len(self.variables), len(self.rows)

    def relaxed(self) -> MilpModel:
        return MilpModel(
            name=self.name,
            variables=[replace(v, integer=False) for v in self.variables],
            rows=list(self.rows),
            options=replace(self.options, relax=True),
            kinds=dict(self.kinds),
        )


def _coeff_tuple(d: dict[str, float]) -> tuple[tuple[str, float], ...]:
    return tuple((k, v) for k, v in d.items() if v != 0)


def _ordered_hyperarcs(g: Hypergraph) -> list:
    """Deterministic variable order: trips by departure time then id, then
    connection changes, then depot arcs, then deviations."""
    trips = sorted(g.instance.trips, key=lambda t: (t.dep_time, t.id))
    order: list = []
    for t in trips:
        order.extend(sorted(g.trip_arcs[t.id]))
    for c in g.instance.connections:
        order.extend(sorted(g.connection_arcs[c.id]))
    named = set(order)
    depot_like = [h.id for h in g.hyperarcs
                  if h.id not in named and h.kind != "InventoryDeviation"]
    order.extend(sorted(depot_like))
    order.extend(sorted(h.id for h in g.hyperarcs if h.kind == "InventoryDeviation"))
    return [g.by_id[i] for i in order]


def assemble(graph: Hypergraph | CompositionGraph,
             options: ModelOptions | None = None) -> MilpModel:
    """Build the MILP of one model variant."""
    if isinstance(graph, CompositionGraph):
        return _assemble_composition(graph, options or ModelOptions(variant="C"))
    return _assemble_hypergraph(graph, options or ModelOptions(variant=graph.variant))


def _assemble_hypergraph(g: Hypergraph, options: ModelOptions) -> MilpModel:
    options = replace(options, variant=g.variant)
    integer = not options.relax
    variables: list[Variable] = []
    kinds: dict[str, str] = {}
    for h in _ordered_hyperarcs(g):
        unbounded = h.kind in ("Parking", "InventoryDeviation")
        variables.append(Variable(h.id, 0.0, None if unbounded else float(h.upper),
                                  integer=integer, cost=float(h.cost)))
        kinds[h.id] = h.kind

    rows: list[Row] = []
    outgoing, incoming = g.incident()
    balance_check: dict[str, float] = {}
    for node in g.nodes:
        coeffs: dict[str, float] = {}
        for hid in outgoing[node]:
            coeffs[hid] = coeffs.get(hid, 0.0) + 1.0
        for hid in incoming[node]:
            coeffs[hid] = coeffs.get(hid, 0.0) - 1.0
        b = float(g.balances.get(node, 0))
        rows.append(Row(f"flow.{node_key(node)}", _coeff_tuple(coeffs), "=", b))
        balance_check[node.unit_type] = balance_check.get(node.unit_type, 0.0) + b
    for r, total in balance_check.items():
        if abs(total) > 1e-9:
            raise AssertionError(f"type {r}: node balances sum to {total}")

    for t in sorted(g.trip_arcs):
        coeffs = {hid: 1.0 for hid in g.trip_arcs[t]}
        rows.append(Row(f"trip.{t}", _coeff_tuple(coeffs), "=", 1.0))
    if options.connection_constraints:
        for c in sorted(g.connection_arcs):
            coeffs = {hid: 1.0 for hid in g.connection_arcs[c]}
            rows.append(Row(f"conn.{c}", _coeff_tuple(coeffs), "=", 1.0))

    return MilpModel(f"{g.instance.name}-{g.variant}", variables, rows, options, kinds)


def _assemble_composition(cg: CompositionGraph, options: ModelOptions) -> MilpModel:
    if not options.connection_constraints:
        raise InvalidOptions("the composition model cannot drop the connection "
                             "constraints")
    options = replace(options, variant="C")
    integer = not options.relax
    variables: list[Variable] = []
    kinds: dict[str, str] = {}

    trips = sorted(cg.instance.trips, key=lambda t: (t.dep_time, t.id))
    order: list[str] = []
    for t in trips:
        order.extend(sorted(cg.trip_arcs[t.id]))
    for c in cg.instance.connections:
        order.extend(sorted(cg.connection_arcs[c.id]))
    for aid in order:
        a = cg.by_id[aid]
        variables.append(Variable(aid, 0.0, 1.0, integer=integer, cost=float(a.cost)))
        kinds[aid] = a.kind
    dev_rate = float(cg.instance.costs.ending_deviation_per_unit)
    for e in cg.end_inventories:
        for side in ("surplus", "deficit"):
            vid = f"dev.{e.station}.{e.unit_type}.{side}"
            variables.append(Variable(vid, 0.0, None, integer=integer, cost=dev_rate))
            kinds[vid] = "InventoryDeviation"

    rows: list[Row] = []
    outgoing, incoming = cg.incident()
    for node in cg.nodes:
        ins = incoming[node]
        outs = outgoing[node]
        if not ins or not outs:
            continue  # no conservation at chain ends
        coeffs: dict[str, float] = {}
        for aid in ins:
            coeffs[aid] = coeffs.get(aid, 0.0) + 1.0
        for aid in outs:
            coeffs[aid] = coeffs.get(aid, 0.0) - 1.0
        rows.append(Row(f"flow.{node.trip}.{node.side}.{node.comp}",
                        _coeff_tuple(coeffs), "=", 0.0))

    for t in sorted(cg.trip_arcs):
        rows.append(Row(f"trip.{t}",
                        _coeff_tuple({aid: 1.0 for aid in cg.trip_arcs[t]}), "=", 1.0))
    for c in sorted(cg.connection_arcs):
        rows.append(Row(f"conn.{c}",
                        _coeff_tuple({aid: 1.0 for aid in cg.connection_arcs[c]}),
                        "=", 1.0))

    # depot availability: start - out(<=t) + in(<=t) >= 0
    for cut in cg.cuts:
        coeffs = {}
        for aid, count in cut.outs:
            coeffs[aid] = coeffs.get(aid, 0.0) - float(count)
        for aid, count in cut.ins:
            coeffs[aid] = coeffs.get(aid, 0.0) + float(count)
        rows.append(Row(f"cut.{cut.station}.{cut.unit_type}.{cut.time}",
                        _coeff_tuple(coeffs), ">=", -float(cut.start)))

    # soft end inventory: start - out_all + in_all - surplus + deficit = target
    for e in cg.end_inventories:
        coeffs = {}
        for aid, count in e.outs:
            coeffs[aid] = coeffs.get(aid, 0.0) - float(count)
        for aid, count in e.ins:
            coeffs[aid] = coeffs.get(aid, 0.0) + float(count)
        coeffs[f"dev.{e.station}.{e.unit_type}.surplus"] = -1.0
        coeffs[f"dev.{e.station}.{e.unit_type}.deficit"] = 1.0
        rows.append(Row(f"end.{e.station}.{e.unit_type}", _coeff_tuple(coeffs),
                        "=", float(e.target - e.start)))

    return MilpModel(f"{cg.instance.name}-C", variables, rows, options, kinds)


# ---------------------------------------------------------------------------
# LP text format
# ---------------------------------------------------------------------------

def write_lp(model: MilpModel) -> str:
    """Render the model in CPLEX LP text format."""
    out = [f"\\ rollstock model {model.name}", "Minimize"]
    terms = [f"{_FMT % v.cost} {v.id}" for v in model.variables if v.cost != 0]
    out.append(" obj: " + (" + ".join(terms) if terms else "0 " + model.variables[0].id
                           if model.variables else "0 zero"))
    out.append("Subject To")
    for row in model.rows:
        if row.coeffs:
            body = " + ".join(f"{_FMT % c} {v}" for v, c in row.coeffs)
        else:
            anchor = model.variables[0].id if model.variables else "zero"
            body = f"0 {anchor}"
        out.append(f" {row.id}: {body} {row.sense} {_FMT % row.rhs}")
    out.append("Bounds")
    for v in model.variables:
        if v.upper is None:
            out.append(f" {_FMT % v.lower} <= {v.id}")
        else:
            out.append(f" {_FMT % v.lower} <= {v.id} <= {_FMT % v.upper}")
    generals = [v.id for v in model.variables if v.integer]
    if generals:
        out.append("Generals")
        for vid in generals:
            out.append(f" {vid}")
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp_file(model: MilpModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_lp(model))


def _parse_terms(text: str) -> dict[str, float]:
    """Parse `coef var + coef var + ...` as emitted by :func:`write_lp`.

    Coefficients always precede their variable and carry their own sign, so
    scientific notation survives; the only separator is ` + `.
    """
    coeffs: dict[str, float] = {}
    for term in text.split(" + "):
        parts = term.split()
        if not parts:
            continue
        if len(parts) == 1:
            coeffs[parts[0]] = coeffs.get(parts[0], 0.0) + 1.0
        else:
            value = float(parts[0])
            if value != 0:
                coeffs[parts[1]] = coeffs.get(parts[1], 0.0) + value
    return coeffs


def parse_lp(text: str) -> MilpModel:
    """Parse the subset of the LP format produced by :func:`write_lp`."""
    section = None
    objective: dict[str, float] = {}
    rows: list[Row] = []
    bounds: dict[str, tuple[float, float | None]] = {}
    generals: set[str] = set()
    var_order: list[str] = []
    seen: set[str] = set()

    def note_vars(ids):
        for vid in ids:
            if vid not in seen:
                seen.add(vid)
                var_order.append(vid)

    for raw in text.splitlines():
        line = raw.split("\\")[0].rstrip()
        if not line.strip():
            continue
        word = line.strip().lower()
        if word in ("minimize", "maximize", "subject to", "st", "bounds",
                    "generals", "binaries", "end"):
            section = word
            continue
        body = line.strip()
        if section == "minimize":
            if ":" in body:
                body = body.split(":", 1)[1]
            objective.update(_parse_terms(body))
            note_vars(objective)
        elif section in ("subject to", "st"):
            name, rest = body.split(":", 1)
            for sense in ("<=", ">=", "="):
                if f" {sense} " in rest:
                    lhs, rhs = rest.rsplit(f" {sense} ", 1)
                    coeffs = _parse_terms(lhs)
                    note_vars(coeffs)
                    rows.append(Row(name.strip(), _coeff_tuple(coeffs),
                                    sense, float(rhs)))
                    break
        elif section == "bounds":
            parts = body.split("<=")
            if len(parts) == 3:
                vid = parts[1].strip()
                bounds[vid] = (float(parts[0]), float(parts[2]))
            elif len(parts) == 2:
                vid = parts[1].strip()
                bounds[vid] = (float(parts[0]), None)
            else:
                continue
            note_vars([vid])
        elif section in ("generals", "binaries"):
            generals.add(body)
            note_vars([body])

    variables = []
    for vid in var_order:
        lo, up = bounds.get(vid, (0.0, None))
        variables.append(Variable(vid, lo, up, vid in generals,
                                  objective.get(vid, 0.0)))
    return MilpModel("parsed", variables, rows)


def parse_lp_file(path) -> MilpModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lp(fh.read())


def models_equal(a: MilpModel, b: MilpModel) -> bool:
    """Coefficient-level equality, ignoring names and metadata."""
    va = {(v.id, v.lower, v.upper, v.integer, v.cost) for v in a.variables}
    vb = {(v.id, v.lower, v.upper, v.integer, v.cost) for v in b.variables}
    if va != vb:
        return False
    ra = {(r.id, frozenset(r.coeffs), r.sense, r.rhs) for r in a.rows}
    rb = {(r.id, frozenset(r.coeffs), r.sense, r.rhs) for r in b.rows}
    return ra == rb
