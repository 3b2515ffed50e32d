"""Composition model graph, derived from the full depot hypergraph.

The contraction merges all event nodes of a trip side that differ only in
(position, unit type) into one node per (trip event, composition). Trip
hyperarcs and 1-to-1 changes become single arcs, split/join changes become
two-arc hyperarcs meeting in a common node, and all depot arcs are dropped.
What remains of the depots is cut data: per depot node, which surviving
arcs pull how many units out of or into the inventory up to that point in
time. The surviving arcs keep the ids of the hyperarcs they came from, so
solutions transfer between the two models by name.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import VariantMismatch
from .hypergraph import Hyperarc, Hypergraph
from .instance import Instance


@dataclass(frozen=True, order=True)
class CompNode:
    """One (trip event, composition) point of the contracted graph."""

    trip: str
    side: str  # dep | arr
    comp: str

    def short(self) -> str:
        sign = "+" if self.side == "dep" else "-"
        return f"{self.trip}{sign}:{self.comp}"


@dataclass(frozen=True)
class CompArc:
    """Surviving arc (or two-arc hyperarc for splits/joins)."""

    id: str
    kind: str  # TripArc | CompositionArc
    arcs: tuple[tuple[CompNode, CompNode], ...]
    cost: float
    tags: dict = field(default_factory=dict, compare=False, hash=False)

    def incident_tails(self) -> set[CompNode]:
        return {t for t, _ in self.arcs}

    def incident_heads(self) -> set[CompNode]:
        return {h for _, h in self.arcs}


@dataclass(frozen=True)
class DepotCut:
    """Inventory prefix data at one depot node: arcs that pull units out of
    or into the depot at or before this time, with unit counts."""

    station: str
    unit_type: str
    time: int
    start: int
    outs: tuple[tuple[str, int], ...]  # (arc id, units) cumulative
    ins: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class EndInventory:
    """Whole-horizon pull totals of one depot, for the soft end constraint."""

    station: str
    unit_type: str
    start: int
    target: int
    outs: tuple[tuple[str, int], ...]
    ins: tuple[tuple[str, int], ...]


@dataclass
class CompositionGraph:
    instance: Instance
    nodes: list[CompNode]
    arcs: list[CompArc]
    trip_arcs: dict[str, list[str]]
    connection_arcs: dict[str, list[str]]
    cuts: list[DepotCut]
    end_inventories: list[EndInventory]
    by_id: dict[str, CompArc] = field(default_factory=dict)

    def __post_init__(self):
        self.by_id = {a.id: a for a in self.arcs}

    def incident(self) -> tuple[dict[CompNode, list[str]], dict[CompNode, list[str]]]:
        """(outgoing, incoming) arc ids per node, each arc counted once."""
        outgoing: dict[CompNode, list[str]] = {v: [] for v in self.nodes}
        incoming: dict[CompNode, list[str]] = {v: [] for v in self.nodes}
        for a in self.arcs:
            for v in sorted(a.incident_tails()):
                outgoing[v].append(a.id)
            for v in sorted(a.incident_heads()):
                incoming[v].append(a.id)
        return outgoing, incoming

    def dump(self) -> str:
        lines = []
        for a in sorted(self.arcs, key=lambda x: x.id):
            arcs = ",".join(f"{t.short()}>{u.short()}" for t, u in a.arcs)
            kind = "CompositionArc" if a.kind != "TripArc" else "TripArc"
            lines.append(f"{a.id} {kind} {a.cost:g} 1 {arcs}")
        return "\n".join(lines) + "\n"


def depot_moves_from_tags(tags: dict, instance: Instance) -> list[tuple[str, str, int, str, int]]:
    """Depot moves implied by selecting a trip or change (hyper)arc.

    Returns (station, unit_type, time, direction, count) tuples, where
    direction 'in' adds units to the depot and 'out' removes them. Change
    hyperarcs move their uncoupled/coupled units; trip hyperarcs of first
    and last trips stage their whole composition out of / into the depot.
    """
    trips = instance.trip_by_id
    moves: dict[tuple[str, str, int, str], int] = {}

    def bump(station: str, r: str, time: int, direction: str, n: int = 1):
        key = (station, r, time, direction)
        moves[key] = moves.get(key, 0) + n

    for (t, _pos, r) in tags.get("uncoupled", ()):
        bump(trips[t].arr_station, r, trips[t].arr_time, "in")
    for (t, _pos, r) in tags.get("coupled", ()):
        bump(trips[t].dep_station, r, trips[t].dep_time, "out")
    for (station, r, time) in tags.get("stage_out", ()):
        bump(station, r, time, "out")
    for (station, r, time) in tags.get("stage_in", ()):
        bump(station, r, time, "in")
    return [(s, r, tau, d, n) for (s, r, tau, d), n in sorted(moves.items())]


def hyperarc_depot_moves(h: Hyperarc, instance: Instance):
    return depot_moves_from_tags(h.tags, instance)


def contract(g_hd: Hypergraph) -> CompositionGraph:
    """Contract the full depot hypergraph into the composition model graph."""
    if g_hd.variant != "HD":
        raise VariantMismatch(f"contract expects variant HD, got {g_hd.variant}")
    instance = g_hd.instance
    arcs: list[CompArc] = []
    trip_index: dict[str, list[str]] = {t.id: [] for t in instance.trips}
    conn_index: dict[str, list[str]] = {c.id: [] for c in instance.connections}

    for h in g_hd.hyperarcs:
        if h.kind == "TripService":
            t, p = h.tags["trip"], h.tags["comp"]
            arcs.append(CompArc(h.id, "TripArc",
                                ((CompNode(t, "dep", p), CompNode(t, "arr", p)),),
                                h.cost, dict(h.tags)))
            trip_index[t].append(h.id)
        elif h.kind == "ConnectionChange":
            conn = next(c for c in instance.connections if c.id == h.tags["connection"])
            pre_of = dict(zip(conn.predecessors, h.tags["pre"]))
            post_of = dict(zip(conn.successors, h.tags["post"]))
            pairs: dict[tuple[CompNode, CompNode], None] = {}
            for tail, head in h.base_arcs:
                pairs.setdefault((CompNode(tail.trip, "arr", pre_of[tail.trip]),
                                  CompNode(head.trip, "dep", post_of[head.trip])))
            arcs.append(CompArc(h.id, "CompositionArc", tuple(sorted(pairs)),
                                h.cost, dict(h.tags)))
            conn_index[conn.id].append(h.id)
        # depot arcs (Parking, PullIn, PullOut, InventoryDeviation) are dropped

    # parallel contracted arcs must agree on cost (they never arise from the
    # canonical change enumeration, but the contraction relies on it)
    by_span: dict[tuple, str] = {}
    for a in arcs:
        span = tuple(sorted(a.arcs))
        if span in by_span:
            other = next(x for x in arcs if x.id == by_span[span])
            if abs(other.cost - a.cost) > 1e-12:
                raise AssertionError(
                    f"parallel arcs {a.id} / {other.id} with different costs")
        by_span.setdefault(span, a.id)

    nodes: dict[CompNode, None] = {}
    for a in arcs:
        for tail, head in a.arcs:
            nodes.setdefault(tail)
            nodes.setdefault(head)

    cuts, ends = _build_cut_data(instance, arcs)
    return CompositionGraph(
        instance=instance,
        nodes=sorted(nodes),
        arcs=arcs,
        trip_arcs=trip_index,
        connection_arcs=conn_index,
        cuts=cuts,
        end_inventories=ends,
    )


def _build_cut_data(instance: Instance,
                    arcs: list[CompArc]) -> tuple[list[DepotCut], list[EndInventory]]:
    moves_by_depot: dict[tuple[str, str], list[tuple[int, str, str, int]]] = {}
    for a in arcs:
        for (station, r, time, direction, n) in depot_moves_from_tags(a.tags, instance):
            moves_by_depot.setdefault((station, r), []).append((time, direction, a.id, n))

    cuts: list[DepotCut] = []
    ends: list[EndInventory] = []
    for depot in instance.all_depots():
        key = (depot.station, depot.unit_type)
        events = sorted(moves_by_depot.get(key, []))
        times = sorted({tau for (tau, _, _, _) in events})
        outs_all: dict[str, int] = {}
        ins_all: dict[str, int] = {}
        for (tau, direction, arc_id, n) in events:
            target = outs_all if direction == "out" else ins_all
            target[arc_id] = target.get(arc_id, 0) + n
        for tau in times:
            outs: dict[str, int] = {}
            ins: dict[str, int] = {}
            for (t2, direction, arc_id, n) in events:
                if t2 <= tau:
                    target = outs if direction == "out" else ins
                    target[arc_id] = target.get(arc_id, 0) + n
            cuts.append(DepotCut(depot.station, depot.unit_type, tau,
                                 depot.start_inventory,
                                 tuple(sorted(outs.items())),
                                 tuple(sorted(ins.items()))))
        if not times:
            # untouched depot still contributes its vacuous availability cut
            cuts.append(DepotCut(depot.station, depot.unit_type, 0,
                                 depot.start_inventory, (), ()))
        ends.append(EndInventory(depot.station, depot.unit_type,
                                 depot.start_inventory, depot.target_end_inventory,
                                 tuple(sorted(outs_all.items())),
                                 tuple(sorted(ins_all.items()))))
    return cuts, ends


def cut_data(cg: CompositionGraph) -> list[DepotCut]:
    """Depot cut rows of the composition model (already built at contract)."""
    return list(cg.cuts)
