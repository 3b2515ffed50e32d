"""Synthetic timetable generator for property tests and benchmarks.

Instances mimic the daily-planning shape the models are built for: a few
lines ping-ponging between two stations, chained by 1-to-1 connections,
with peak demand at the ends of the day forcing double compositions and a
quiet middle that rewards uncoupling. Two unit types, all compositions up
to the length cap allowed on every trip, generous start inventories, and
costs only on trips and composition changes, so the closure-variant value
equalities must hold on every sample. Deterministic per seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import ConfigError
from .instance import (
    Composition,
    Connection,
    CostParams,
    Depot,
    Instance,
    Trip,
    UnitType,
)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    lines: int = 2
    trips_per_line: int = 4
    unit_types: int = 2
    n_max: int = 2
    stations: int = 3
    split_join_fraction: float = 0.0
    peak_demand: int = 180
    offpeak_demand: int = 60

    def check(self) -> None:
        if self.lines < 1 or self.trips_per_line < 1:
            raise ConfigError("need at least one line with one trip")
        if not 1 <= self.unit_types <= 2:
            raise ConfigError("unit_types must be 1 or 2")
        if self.n_max < 1 or self.stations < 2:
            raise ConfigError("n_max >= 1 and stations >= 2 required")
        if not 0 <= self.split_join_fraction <= 1:
            raise ConfigError("split_join_fraction must be in [0, 1]")


def _compositions(types: list[UnitType], n_max: int) -> list[Composition]:
    out = []
    ids = [t.id for t in types]
    for length in range(1, n_max + 1):
        for combo in itertools.product(ids, repeat=length):
            out.append(Composition("".join(combo), combo))
    return out


def generate(cfg: GenConfig) -> Instance:
    """Deterministic NS-like instance for the given config."""
    cfg.check()
    rng = random.Random(cfg.seed)
    type_specs = [UnitType("a", 2, 100), UnitType("b", 3, 150)][:cfg.unit_types]
    comps = _compositions(type_specs, cfg.n_max)
    comp_ids = tuple(p.id for p in comps)
    station_names = [f"s{i}" for i in range(cfg.stations)]

    trips: list[Trip] = []
    conns: list[Connection] = []
    demand_profile = []
    for i in range(cfg.trips_per_line):
        third = cfg.trips_per_line / 3
        peak = i < third or i >= 2 * third
        demand_profile.append(cfg.peak_demand if peak else cfg.offpeak_demand)

    branch_serial = 0
    for line in range(cfg.lines):
        a, b = rng.sample(station_names, 2)
        start = 300 + 30 * line
        distance = float(rng.randint(20, 80))
        prev_trip = None
        prev_was_split = False
        for i in range(cfg.trips_per_line):
            frm, to = (a, b) if i % 2 == 0 else (b, a)
            dep = start + i * 70
            tid = f"l{line}t{i}"
            trips.append(Trip(tid, frm, to, dep, dep + 50, distance,
                              demand_profile[i] + rng.randint(-10, 10),
                              comp_ids))
            if prev_trip is not None:
                cid = f"l{line}c{i - 1}"
                # a trip fresh out of a split runs short; never split twice in a row
                may_split = (cfg.split_join_fraction > 0 and cfg.n_max >= 2
                             and not prev_was_split)
                if may_split and rng.random() < cfg.split_join_fraction:
                    # branch off a short terminal trip; the connection splits
                    branch_serial += 1
                    other = rng.choice([s for s in station_names if s != to])
                    btid = f"br{branch_serial}"
                    trips.append(Trip(btid, frm, other, dep + 5, dep + 45,
                                      distance / 2, cfg.offpeak_demand, comp_ids))
                    conns.append(Connection(cid, "OneToTwo", (prev_trip,),
                                            (tid, btid)))
                    prev_was_split = True
                else:
                    conns.append(Connection(cid, "OneToOne", (prev_trip,), (tid,)))
                    prev_was_split = False
            prev_trip = tid

    # generous inventories at every first departure station; symmetric targets
    inventory: dict[tuple[str, str], int] = {}
    for t in trips:
        starts_line = not any(t.id in c.successors for c in conns)
        if starts_line:
            for u in type_specs:
                key = (t.dep_station, u.id)
                inventory[key] = inventory.get(key, 0) + cfg.n_max
    depots = []
    for st in station_names:
        for u in type_specs:
            have = inventory.get((st, u.id), 0)
            depots.append(Depot(st, u.id, have, have))

    return Instance(
        name=f"gen{cfg.seed}",
        unit_types=tuple(type_specs),
        compositions=tuple(comps),
        trips=tuple(trips),
        connections=tuple(conns),
        depots=tuple(depots),
        costs=CostParams(),
        n_max=cfg.n_max,
    )
