"""Command-line interface.

Commands: validate, build, solve, compare, project, reduce-3sat,
verify-reduction, gen, export-lp. Exit codes: 0 success, 1 infeasible or
violations found, 2 usage errors. Human-readable output on stdout, JSON
with --json; --deterministic suppresses timing fields.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, genbench, instance as inst_mod, reduction
from .composition import contract
from .errors import RollstockError
from .formulation import ModelOptions, assemble, export_lp_file
from .hypergraph import VARIANTS, build
from .solver import solve_ip, solve_lp

ALL = ("hD", "hA", "HD", "HA", "C")


def _load_instance(args) -> inst_mod.Instance:
    if getattr(args, "canonical", None):
        return inst_mod.canonical(args.canonical)
    if not args.instance:
        raise SystemExit("either --instance FILE or --canonical NAME is required")
    return inst_mod.load(args.instance)


def _graph(instance, variant, closure):
    if variant == "C":
        return contract(build(instance, "HD"))
    return analysis.build_variant(instance, variant, closure)


def cmd_validate(args) -> int:
    instance = _load_instance(args)
    violations = inst_mod.validate(instance)
    if args.json:
        print(json.dumps([{"code": v.code, "entity": v.entity,
                           "message": v.message} for v in violations], indent=2))
    else:
        for v in violations:
            print(v)
        if not violations:
            print(f"{instance.name}: valid "
                  f"({len(instance.trips)} trips, "
                  f"{len(instance.connections)} connections)")
    return 1 if violations else 0


def cmd_build(args) -> int:
    instance = _load_instance(args)
    graph = _graph(instance, args.variant, args.closure)
    sys.stdout.write(graph.dump())
    return 0


def cmd_solve(args) -> int:
    instance = _load_instance(args)
    graph = _graph(instance, args.variant, args.closure)
    opts = ModelOptions(connection_constraints=not args.no_connection_constraints)
    model = assemble(graph, opts)
    if args.export_lp:
        export_lp_file(model, args.export_lp)
    if args.lp:
        sol = solve_lp(model.relaxed(), tol=args.tol, exact=args.exact_rational)
    else:
        sol = solve_ip(model, tol=args.tol, node_limit=args.node_limit,
                       exact=args.exact_rational)
    out = {"instance": instance.name, "variant": args.variant,
           "mode": "LP" if args.lp else "IP", "status": sol.status}
    if sol.status == "Optimal":
        out["objective"] = float(sol.objective)
        bd = analysis.cost_breakdown(instance, graph, sol.values)
        out["breakdown"] = {
            "composition": float(bd.composition_cost),
            "coupling": float(bd.coupling_cost),
            "deviation": float(bd.deviation_cost),
            "total": float(bd.total),
        }
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"{out['instance']} {out['variant']} {out['mode']}: {sol.status}"
              + (f" objective={out['objective']:.4f}" if "objective" in out else ""))
        if "breakdown" in out:
            b = out["breakdown"]
            print(f"  composition={b['composition']:.4f} "
                  f"coupling={b['coupling']:.4f} deviation={b['deviation']:.4f}")
    if args.plot and sol.status == "Optimal" and args.variant != "C":
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(analysis.rotation_svg(instance, graph, sol.values))
    return 0 if sol.status == "Optimal" else 1


def cmd_compare(args) -> int:
    instance = _load_instance(args)
    variants = analysis.SEVEN_VARIANTS if args.all else tuple(args.variants or ALL)
    report = analysis.compare(
        instance, variants, closure=args.closure,
        connection_constraints=not args.no_connection_constraints,
        exact=args.exact_rational, tol=args.tol, node_limit=args.node_limit,
        with_timings=not args.deterministic)
    if args.json:
        sys.stdout.write(analysis.render_json(report,
                                              with_timings=not args.deterministic))
    else:
        sys.stdout.write(analysis.render_text(report,
                                              with_timings=not args.deterministic))
    bad = any(v.verdict == "VIOLATION" for v in report.verdicts) or \
        any(r.error for r in report.rows)
    return 1 if bad else 0


def cmd_project(args) -> int:
    instance = _load_instance(args)
    report = analysis.verify_corollary_projection(
        instance, trip_limit=args.trip_limit,
        connection_constraints=not args.no_connection_constraints)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if report["equal"] else 1


def cmd_reduce_3sat(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        formula = reduction.parse_dimacs(fh.read())
    instance, cert = reduction.reduce_3sat(formula)
    inst_mod.save(instance, args.out)
    if args.certificate:
        payload = {
            "clause_trips": {str(k): list(v) for k, v in cert.clause_trips.items()},
            "literal_trips": {str(k): v for k, v in cert.literal_trips.items()},
            "occurrences": {str(k): [list(o) for o in v]
                            for k, v in cert.occurrences.items()},
            "true_comp": cert.true_comp,
            "false_comp": cert.false_comp,
        }
        with open(args.certificate, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    print(f"wrote {args.out}: {len(instance.trips)} trips, "
          f"{len(instance.connections)} connections")
    return 0


def cmd_verify_reduction(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        formula = reduction.parse_dimacs(fh.read())
    verdict = reduction.verify_reduction(formula, node_limit=args.node_limit)
    out = {"sat": verdict.sat, "feasible": verdict.feasible,
           "agrees": verdict.agrees}
    if verdict.assignment is not None:
        out["assignment"] = {str(k): v for k, v in verdict.assignment.items()}
        out["assignment_ok"] = verdict.assignment_ok
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0 if verdict.agrees else 1


def cmd_gen(args) -> int:
    cfg = genbench.GenConfig(seed=args.seed, lines=args.lines,
                             trips_per_line=args.trips_per_line,
                             unit_types=args.unit_types, n_max=args.n_max,
                             stations=args.stations,
                             split_join_fraction=args.split_fraction)
    instance = genbench.generate(cfg)
    inst_mod.save(instance, args.out)
    print(f"wrote {args.out}: {len(instance.trips)} trips, "
          f"{len(instance.connections)} connections")
    return 0


def cmd_export_lp(args) -> int:
    instance = _load_instance(args)
    graph = _graph(instance, args.variant, args.closure)
    opts = ModelOptions(relax=args.lp,
                        connection_constraints=not args.no_connection_constraints)
    model = assemble(graph, opts)
    if args.lp:
        model = model.relaxed()
    export_lp_file(model, args.out)
    print(f"wrote {args.out}: {model.stats()[0]} variables, "
          f"{model.stats()[1]} rows")
    return 0


def _add_instance_args(p):
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--canonical", help="built-in instance name")


def _add_model_args(p):
    p.add_argument("--variant", default="C", choices=list(VARIANTS) + ["C"])
    p.add_argument("--closure", action="store_true",
                   help="use the closure of direct connection arcs")
    p.add_argument("--no-connection-constraints", action="store_true")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--node-limit", type=int, default=200000)
    p.add_argument("--exact-rational", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rollstock",
                                 description="rolling stock scheduling models")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check instance invariants")
    _add_instance_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("build", help="dump a model hypergraph")
    _add_instance_args(p)
    p.add_argument("--variant", default="hD", choices=list(VARIANTS) + ["C"])
    p.add_argument("--closure", action="store_true")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("solve", help="solve one model variant")
    _add_instance_args(p)
    _add_model_args(p)
    p.add_argument("--lp", action="store_true", help="LP relaxation only")
    p.add_argument("--json", action="store_true")
    p.add_argument("--export-lp", metavar="PATH")
    p.add_argument("--plot", metavar="PATH", help="write rotation SVG")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("compare", help="solve and relate all variants")
    _add_instance_args(p)
    _add_model_args(p)
    p.add_argument("--all", action="store_true")
    p.add_argument("--variants", nargs="*")
    p.add_argument("--json", action="store_true")
    p.add_argument("--deterministic", action="store_true",
                   help="suppress timing fields")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("project", help="integer solution-set projection check")
    _add_instance_args(p)
    p.add_argument("--trip-limit", type=int, default=8)
    p.add_argument("--no-connection-constraints", action="store_true")
    p.set_defaults(fn=cmd_project)

    p = sub.add_parser("reduce-3sat", help="encode a DIMACS CNF as an instance")
    p.add_argument("cnf")
    p.add_argument("--out", required=True)
    p.add_argument("--certificate")
    p.set_defaults(fn=cmd_reduce_3sat)

    p = sub.add_parser("verify-reduction",
                       help="check satisfiability against feasibility")
    p.add_argument("cnf")
    p.add_argument("--node-limit", type=int, default=400000)
    p.set_defaults(fn=cmd_verify_reduction)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--lines", type=int, default=2)
    p.add_argument("--trips-per-line", type=int, default=4)
    p.add_argument("--unit-types", type=int, default=2)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--stations", type=int, default=3)
    p.add_argument("--split-fraction", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("export-lp", help="write a model as an LP file")
    _add_instance_args(p)
    _add_model_args(p)
    p.add_argument("--lp", action="store_true", help="export the relaxation")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_export_lp)

    return ap


def run(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except RollstockError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
