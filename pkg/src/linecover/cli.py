"""Command-line interface: ``linecover solve|validate|oracle|gen|bench``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .approx import SolverConfig, solve
from .cost_model import EuclideanDistance, WindModel
from .errors import (
    Infeasible,
    InfeasibleFlow,
    LineCoverageError,
    SchemaError,
    TooLarge,
    UnsatisfiableProfile,
)
from .graph_core import validate_tour
from .io import dumps, export_geojson, parse_instance, read_tour, write_tour
from .oracle import brute_force_optimal, random_instance

EXIT_OK, EXIT_INVALID, EXIT_SCHEMA, EXIT_INFEASIBLE, EXIT_CAP = 0, 1, 2, 3, 4
THREADS_ENV = "LINECOVER_JOBS"


def _config(args) -> SolverConfig:
    return SolverConfig(
        atsp_mode=args.atsp,
        stitch_mode=args.stitch,
        short_circuit=not args.no_shortcircuit,
        two_opt=not args.no_2opt,
        seed=args.seed,
    )


def cmd_solve(args) -> int:
    inst = parse_instance(args.instance)
    cfg = _config(args)
    tour, rep = solve(inst, cfg)
    if args.out:
        write_tour(args.out, inst, tour, rep.components, cfg.to_dict(), cfg.seed)
    if args.geojson:
        export_geojson(inst, tour, args.geojson)
    print(f"cost {tour.total_cost!r}")
    print(f"lower_bound {rep.lower_bound!r}")
    print(f"ratio {rep.ratio:.6f}")
    print(f"case {rep.case} components {rep.components} steps {len(tour.steps)}")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = parse_instance(args.instance)
    tour = read_tour(inst, args.tour)
    report = validate_tour(inst, tour)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_oracle(args) -> int:
    inst = parse_instance(args.instance)
    tour, cost = brute_force_optimal(inst, args.max_required)
    if args.out:
        write_tour(args.out, inst, tour)
    print(f"cost {cost!r}")
    for a in tour.steps:
        print(f"  {a.mode.value:8s} edge {a.edge_id}: {inst.arc_tail(a)} -> {inst.arc_head(a)}")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.cost == "wind":
        spec = WindModel(args.service_speed, args.deadhead_speed, args.wind_speed, args.wind_direction)
        model = {"type": "wind", **vars(spec)}
    else:
        spec, model = EuclideanDistance(), {"type": "euclidean"}
    inst = random_instance(
        args.seed,
        args.vertices,
        args.required,
        args.extra,
        spec,
        profile=args.profile,
        components=args.components,
        extent=args.extent,
    )
    # costs are recomputed from the model on load, so the file stays small
    doc = {
        "vertices": [{"id": i, "x": x, "y": y} for i, (x, y) in enumerate(inst.coordinates)],
        "edges": [{"u": e.u, "v": e.v, "required": e.required} for e in inst.edges],
        "cost_model": model,
        "complete_nonrequired": args.complete,
    }
    text = dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _bench_one(path: str, repeat: int, cfg: SolverConfig) -> dict:
    inst = parse_instance(path)
    runs = [solve(inst, cfg) for _ in range(repeat)]
    tour, rep = runs[0]
    phases = sorted(rep.timings)
    timings = {k: statistics.median(r.timings[k] for _, r in runs) for k in phases}
    ok = validate_tour(inst, tour).ok
    return {
        "instance": Path(path).name,
        "required": len(inst.required_edge_ids),
        "cost": rep.cost,
        "lower_bound": rep.lower_bound,
        "ratio": rep.ratio,
        "C": rep.components,
        "valid": ok,
        "timings": timings,
    }


def cmd_bench(args) -> int:
    files = sorted(str(p) for p in Path(args.dir).glob("*.json"))
    if not files:
        raise SchemaError(f"no *.json instances in {args.dir}")
    cfg = _config(args)
    jobs = args.jobs or int(os.environ.get(THREADS_ENV, "1"))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_bench_one, files, [args.repeat] * len(files), [cfg] * len(files)))
    else:
        rows = [_bench_one(f, args.repeat, cfg) for f in files]
    if args.json:
        sys.stdout.write(dumps(rows))
    else:
        phases = ["lp", "resolve", "stitch", "euler", "improve", "total"]
        head = f"{'instance':24s} {'|Er|':>5s} {'cost':>12s} {'bound':>12s} {'ratio':>7s} {'C':>3s} "
        print(head + " ".join(f"{p:>8s}" for p in phases))
        for r in rows:
            line = (
                f"{r['instance'][:24]:24s} {r['required']:5d} {r['cost']:12.3f} "
                f"{r['lower_bound']:12.3f} {r['ratio']:7.4f} {r['C']:3d} "
            )
            print(line + " ".join(f"{r['timings'].get(p, math.nan):8.4f}" for p in phases))
    return EXIT_OK if all(r["valid"] for r in rows) else EXIT_INVALID


def _solver_flags(p):
    p.add_argument("--atsp", choices=["exact", "heuristic", "auto"], default="auto")
    p.add_argument("--stitch", choices=["atsp", "gtsp"], default="atsp")
    p.add_argument("--no-2opt", action="store_true")
    p.add_argument("--no-shortcircuit", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linecover", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a coverage tour")
    p.add_argument("instance")
    _solver_flags(p)
    p.add_argument("--out")
    p.add_argument("--geojson")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a tour file against an instance")
    p.add_argument("instance")
    p.add_argument("tour")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exact tour by enumeration (small instances)")
    p.add_argument("instance")
    p.add_argument("--max-required", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--profile", choices=["general", "connected", "eulerian"], default="general")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--required", type=int, required=True)
    p.add_argument("--extra", type=int, default=0)
    p.add_argument("--components", type=int, default=2)
    p.add_argument("--complete", action="store_true", help="add a non-required edge between every vertex pair")
    p.add_argument("--cost", choices=["wind", "euclidean"], default="wind")
    p.add_argument("--service-speed", type=float, default=7.0)
    p.add_argument("--deadhead-speed", type=float, default=10.0)
    p.add_argument("--wind-speed", type=float, default=2.0)
    p.add_argument("--wind-direction", type=float, default=math.pi / 4)
    p.add_argument("--extent", type=float, default=1000.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="solve every instance in a directory")
    p.add_argument("dir")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--jobs", type=int, default=0, help=f"worker processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--json", action="store_true")
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SchemaError, json.JSONDecodeError, OSError, UnsatisfiableProfile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (Infeasible, InfeasibleFlow) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TooLarge as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_CAP
    except LineCoverageError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
