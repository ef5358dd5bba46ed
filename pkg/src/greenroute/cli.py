"""Batch experiment front end: solve, sweep, bounds, and spanner commands.

Exit codes are a stable contract: 0 solved/written, 1 usage or I/O error,
2 infeasible, 3 search budget exceeded.  All randomness comes from --seeds,
so identical invocations produce identical output bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import evaluate_bounds
from .exact import BUDGET_EXCEEDED, OPTIMAL, exact_min_edges, export_merp_lp
from .graph import DemandSet, Network, generate_topology
from .heuristics import (
    HEURISTICS,
    find_lambda_threshold,
    sweep,
)
from .io_formats import (
    parse_graph_text,
    parse_sndlib,
    write_csv_report,
    write_graph_text,
)
from .metrics import (
    MetricsRow,
    avg_disjoint_paths,
    avg_route_length,
    energy_estimate,
    spared_and_of,
    stretch,
)
from .routing import INFEASIBLE_BY_HEURISTIC, route_demands
from .spanner import (
    SpannerParams,
    exact_spanner_small,
    export_spanner_lp,
    parse_spanner_solution,
    validate_spanner,
    write_spanner_solution,
)
from .spanner import BUDGET_EXCEEDED as SPANNER_BUDGET
from .spanner import INFEASIBLE as SPANNER_INFEASIBLE

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3

DATA_ENV = "GREENROUTE_DATA_DIR"


class CliError(Exception):
    pass


def _data_dirs():
    dirs = []
    env = os.environ.get(DATA_ENV)
    if env:
        dirs.append(Path(env))
    dirs.append(Path(__file__).parent / "data")
    return dirs


def load_bundled(name: str) -> Network:
    fname = name if name.endswith(".txt") else name + ".txt"
    for d in _data_dirs():
        path = d / fname
        if path.is_file():
            return parse_sndlib(path.read_text())
    raise CliError(
        f"topology {name!r} not found in "
        + ", ".join(str(d) for d in _data_dirs())
    )


def _parse_gen(spec: str):
    kind, _, arg = spec.partition(":")
    if kind not in ("complete", "grid", "star", "path"):
        raise CliError(f"unknown generator {kind!r}")
    try:
        size = int(arg)
    except ValueError:
        raise CliError(f"generator size {arg!r} is not an integer") from None
    return kind, size


def _parse_lambdas(text: str):
    """Either a comma list or a start..end..step range, inclusive."""
    if ".." in text:
        parts = text.split("..")
        if len(parts) != 3:
            raise CliError("range syntax is start..end..step")
        start, end, step = (int(p) for p in parts)
        if step <= 0 or end < start:
            raise CliError("bad range")
        return list(range(start, end + 1, step))
    return [int(tok) for tok in text.split(",") if tok]


def _load_network(args) -> tuple:
    """(network, label, grid_side) from --gen/--sndlib/--input."""
    sources = [s for s in (args.gen, args.sndlib, args.input) if s]
    if len(sources) != 1:
        raise CliError("give exactly one of --gen, --sndlib, --input")
    if args.gen:
        kind, size = _parse_gen(args.gen)
        net = generate_topology(kind, size)
        return net, args.gen.replace(":", "-"), size if kind == "grid" else None
    if args.sndlib:
        return load_bundled(args.sndlib), args.sndlib, None
    path = Path(args.input)
    if not path.is_file():
        raise CliError(f"no such file: {path}")
    net, _ = parse_graph_text(path.read_text())
    return net, path.stem, None


def _seeds(args):
    return [int(s) for s in args.seeds.split(",") if s]


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _lambda1_cached(net, label, kappa, seeds, retries, out: Path) -> int:
    """Feasibility threshold, cached per topology for reproducible tables."""
    cache_path = out / "lambda1_cache.json"
    cache = {}
    if cache_path.is_file():
        cache = json.loads(cache_path.read_text())
    key = f"{label}:kappa={kappa}"
    if key not in cache:
        cache[key] = find_lambda_threshold(
            net, kappa, target="feasible", seeds=seeds, retries=retries
        )
        cache_path.write_text(json.dumps(cache, indent=2, sort_keys=True))
    return cache[key]


def cmd_solve(args) -> int:
    net, label, _ = _load_network(args)
    kappa = Fraction(args.kappa)
    lam = Fraction(args.lam)
    capacitated = net.with_uniform_capacity(lam * kappa)
    demands = DemandSet.all_to_all(net.node_count, kappa)
    out = _out_dir(args)
    seeds = _seeds(args)

    if args.heuristic == "exact":
        result = exact_min_edges(capacitated, demands, budget=args.budget)
        if result.status == BUDGET_EXCEEDED:
            print("budget exceeded", file=sys.stderr)
            return EXIT_BUDGET
        if result.status != OPTIMAL:
            print("infeasible", file=sys.stderr)
            return EXIT_INFEASIBLE
        kept, witness = result.edge_ids, result.witness
    else:
        heuristic = HEURISTICS[args.heuristic]
        best = None
        for seed in seeds:
            sol = heuristic(capacitated, demands, seed=seed,
                            retries=args.retries)
            if sol is not INFEASIBLE_BY_HEURISTIC and (
                    best is None or sol.edge_count < best.edge_count):
                best = sol
        if best is None:
            print("infeasible (heuristic)", file=sys.stderr)
            return EXIT_INFEASIBLE
        kept, witness = best.kept_edges, best.witness

    solution_path = out / f"{label}_solution.txt"
    lines = [f"# kept edges: {len(kept)} of {net.edge_count}",
             f"EDGES_KEPT {len(kept)}"]
    for eid in sorted(kept):
        e = net.edges[eid]
        lines.append(f"{e.u} {e.v}")
    lines.append(f"PATHS {len(witness.paths)}")
    for i, p in enumerate(witness.paths):
        lines.append(" ".join(str(v) for v in p))
    solution_path.write_text("\n".join(lines) + "\n")

    baseline = route_demands(capacitated, demands, seeds[0], args.retries)
    stretch_val = None
    if baseline is not INFEASIBLE_BY_HEURISTIC:
        stretch_val = stretch(witness, baseline)
    spared = Fraction(100) * (net.edge_count - len(kept)) / net.edge_count
    row = MetricsRow(
        avg_route_length=avg_route_length(witness),
        stretch=stretch_val,
        avg_disjoint_paths=avg_disjoint_paths(
            capacitated.restricted_to(kept)),
        spared_pct=spared,
        overprovisioning=None,
        energy_mwh_per_year=energy_estimate(net.edge_count - len(kept)),
    )
    (out / f"{label}_metrics.csv").write_text(write_csv_report([row]))
    print(f"kept {len(kept)} edges; wrote {solution_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    net, label, grid_side = _load_network(args)
    kappa = Fraction(args.kappa)
    seeds = _seeds(args)
    out = _out_dir(args)
    if args.lam:
        lambdas = _parse_lambdas(args.lam)
    elif args.of:
        lam1 = _lambda1_cached(net, label, kappa, seeds, args.retries, out)
        lambdas = [int(Fraction(f) * lam1) for f in args.of.split(",") if f]
    else:
        lambdas = []
    report = sweep(net, kappa, lambdas, heuristic_id=args.heuristic,
                   seeds=seeds, retries=args.retries)
    csv_text = write_csv_report(report)
    path = out / f"{label}_sweep.csv"
    path.write_text(csv_text)
    if args.bounds:
        rows = evaluate_bounds(net, kappa, grid_side=grid_side)
        (out / f"{label}_bounds.csv").write_text(write_csv_report(rows))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    net, label, grid_side = _load_network(args)
    rows = evaluate_bounds(
        net, Fraction(args.kappa),
        lam=Fraction(args.lam) if args.lam else None,
        grid_side=grid_side,
    )
    out = _out_dir(args)
    path = out / f"{label}_bounds.csv"
    path.write_text(write_csv_report(rows))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spanner(args) -> int:
    net, label, _ = _load_network(args)
    params = SpannerParams(Fraction(args.alpha), Fraction(args.beta),
                           args.gamma)
    out = _out_dir(args)
    export = export_spanner_lp(net, params)
    lp_path = out / f"{label}_spanner.lp"
    lp_path.write_text(export.text)
    print(f"wrote {lp_path}")

    if args.validate:
        text = Path(args.validate).read_text()
        solution, file_params = parse_spanner_solution(net, text)
        violations = validate_spanner(net, solution, file_params,
                                      require_all_pairs=False)
        spared = Fraction(100) * (net.edge_count - len(solution.kept_edges)) \
            / net.edge_count
        if violations:
            for v in violations:
                print(f"violation: {v}")
            return EXIT_INFEASIBLE
        print(f"solution valid; spared {float(spared):.2f}%")
        return EXIT_OK

    if export.infeasible_pairs:
        s, t, have = export.infeasible_pairs[0]
        print(f"structurally infeasible: pair ({s},{t}) has only {have} "
              f"disjoint paths", file=sys.stderr)
        return EXIT_INFEASIBLE

    if net.edge_count <= args.spanner_limit:
        got = exact_spanner_small(net, params, budget=args.budget)
        if got is SPANNER_INFEASIBLE:
            print("infeasible", file=sys.stderr)
            return EXIT_INFEASIBLE
        if got is SPANNER_BUDGET:
            print("budget exceeded", file=sys.stderr)
            return EXIT_BUDGET
        sol_path = out / f"{label}_spanner_solution.txt"
        sol_path.write_text(write_spanner_solution(net, got, params))
        print(f"wrote {sol_path} ({len(got.kept_edges)} edges)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenroute",
        description="energy-efficient routings: minimize active links",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, lam_required=False):
        p.add_argument("--gen", help="generator spec, e.g. complete:5 grid:4")
        p.add_argument("--sndlib", help="bundled or $GREENROUTE_DATA_DIR "
                                        "topology name")
        p.add_argument("--input", help="native graph text file")
        p.add_argument("--kappa", default="1", help="uniform demand volume")
        p.add_argument("--seeds", default="0,1,2,3,4",
                       help="comma-separated seed list")
        p.add_argument("--retries", type=int, default=5,
                       help="demand orders tried per routing")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--budget", type=int, default=2_000_000,
                       help="search-node budget for exact solvers")

    p_solve = sub.add_parser("solve", help="one instance, one ratio")
    common(p_solve)
    p_solve.add_argument("--lambda", dest="lam", required=True,
                         help="capacity/demand ratio")
    p_solve.add_argument("--heuristic", default="lle",
                         choices=["lle", "random", "exact"])
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="ratio sweep, CSV output")
    common(p_sweep)
    p_sweep.add_argument("--lambda", dest="lam",
                         help="list 2,4,8 or range start..end..step")
    p_sweep.add_argument("--of", help="overprovisioning factors, e.g. 1,2,3")
    p_sweep.add_argument("--heuristic", default="lle",
                         choices=["lle", "random"])
    p_sweep.add_argument("--bounds", action="store_true",
                         help="also write a bounds CSV")
    p_sweep.set_defaults(func=cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="evaluate lower bounds")
    common(p_bounds)
    p_bounds.add_argument("--lambda", dest="lam",
                          help="ratio for edge-count bounds")
    p_bounds.set_defaults(func=cmd_bounds)

    p_spanner = sub.add_parser("spanner", help="fault-tolerant spanners")
    common(p_spanner)
    p_spanner.add_argument("--alpha", required=True)
    p_spanner.add_argument("--beta", required=True)
    p_spanner.add_argument("--gamma", type=int, required=True)
    p_spanner.add_argument("--validate",
                           help="check a solution file instead of solving")
    p_spanner.add_argument("--spanner-limit", type=int, default=12,
                           help="edge count up to which the exact search runs")
    p_spanner.set_defaults(func=cmd_spanner)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
