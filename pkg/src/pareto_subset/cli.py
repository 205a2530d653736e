"""Command-line interface.

Subcommands cover the whole pipeline: ``gen`` (synthetic instance), ``bounds``
(coefficient bounds), ``solve`` (frontier enumeration), ``classify``,
``select``, ``baseline`` (weighted-sum / goal-programming reductions),
``bench`` (multi-instance summary) and ``export-lp``.  Every report-style
command writes a rendered figure next to its delimited output unless
``--no-plot`` is given.  All randomness flows from ``--seed``.

Exit codes: 0 success, 1 unexpected error, 2 usage, 3 file parse error,
4 invalid input, 5 degenerate design, 6 resource limit, 7 guard violation,
8 I/O failure.  Failures print one machine-parsable line to stderr:
``error code=<n> kind=<ExceptionName>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import (Dataset, InstanceClass, generate_instance, load_dataset,
                   save_dataset, save_true_model)
from .errors import FrontierIncompleteError, ParetoSubsetError
from .formulation import (BoundsVector, build_bomilp, compute_bounds,
                          load_bounds, save_bounds)
from .frontier import (DEFAULT_NODE_LIMIT, Frontier, classify_points,
                       goal_programming_baseline, ideal_point, load_frontier,
                       point_to_dict, save_frontier, save_frontier_csv,
                       select_ideal, solve_frontier, weighted_sum_baseline)
from .lp_format import save_lp
from .plotting import render_frontier, render_frontier_overlay

logger = logging.getLogger(__name__)

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO,
               "debug": logging.DEBUG}


def _configure_logging() -> None:
    level = os.environ.get("PARETO_SUBSET_LOG", "quiet").lower()
    if level not in _LOG_LEVELS:
        level = "quiet"
    logging.basicConfig(level=_LOG_LEVELS[level],
                        format="%(levelname)s %(name)s: %(message)s")


def _bounds_for(dataset: Dataset, path: str | None) -> BoundsVector:
    if path:
        return load_bounds(path)
    logger.info("no bounds file given, computing bounds from the dataset")
    return compute_bounds(dataset)


def _sibling(path: str, suffix: str) -> Path:
    return Path(path).with_suffix(suffix)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    cls = InstanceClass(p=args.p, n=args.n, seed=args.seed)
    dataset, truth = generate_instance(cls)
    save_dataset(dataset, args.out)
    truth_path = args.truth or _sibling(args.out, ".truth.json")
    save_true_model(truth, truth_path)
    print(f"wrote {args.out} ({cls.label}, seed {args.seed}) and {truth_path}")
    return 0


def _cmd_bounds(args) -> int:
    dataset = load_dataset(args.input)
    bounds = compute_bounds(dataset)
    save_bounds(bounds, args.out)
    print(f"wrote {args.out} (p={dataset.p})")
    return 0


def _write_frontier_files(frontier: Frontier, out: str, plot: bool,
                          selected=None, title=None) -> None:
    save_frontier(frontier, out)
    save_frontier_csv(frontier, _sibling(out, ".csv"))
    if plot:
        render_frontier(frontier, _sibling(out, ".png"), selected=selected,
                        title=title)


def _cmd_solve(args) -> int:
    dataset = load_dataset(args.input)
    bounds = _bounds_for(dataset, args.bounds)
    try:
        frontier = solve_frontier(dataset, bounds, node_limit=args.node_limit,
                                  include_trivial=args.include_trivial)
    except FrontierIncompleteError as exc:
        if exc.partial is not None:
            _write_frontier_files(exc.partial, args.out, args.plot,
                                  title="incomplete frontier")
        raise
    _write_frontier_files(frontier, args.out, args.plot)
    print(f"#NDPs: {len(frontier.points)}  "
          f"Time(Sec.): {frontier.stats.wall_time:.2f}")
    return 0


def _cmd_classify(args) -> int:
    frontier = classify_points(load_frontier(args.input))
    _write_frontier_files(frontier, args.out, args.plot)
    counts = {}
    for pt in frontier.points:
        counts[pt.classification.value] = counts.get(pt.classification.value, 0) + 1
    print("classified " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())))
    return 0


def _cmd_select(args) -> int:
    frontier = load_frontier(args.input)
    point = select_ideal(frontier, normalized=args.normalized)
    i1, i2 = ideal_point(frontier)
    print(f"ideal: ({i1:.6g}, {i2:g})")
    print(f"selected: z1={point.z1:.6g} z2={point.z2}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(point_to_dict(point), fh, indent=1)
            fh.write("\n")
    return 0


def _cmd_baseline(args) -> int:
    if (args.weight is None) == (args.k is None):
        raise ParetoSubsetError("pass exactly one of --lambda or --k")
    dataset = load_dataset(args.input)
    bounds = _bounds_for(dataset, args.bounds)
    if args.weight is not None:
        point = weighted_sum_baseline(dataset, bounds, args.weight,
                                      node_limit=args.node_limit,
                                      exclude_trivial=not args.include_trivial)
        label = f"weighted-sum (lambda={args.weight:g})"
    else:
        point = goal_programming_baseline(dataset, bounds, args.k,
                                          lexicographic=args.lexicographic,
                                          node_limit=args.node_limit)
        label = f"goal-programming (k={args.k}" + (
            ", lexicographic)" if args.lexicographic else ")")
    used = [f"x{j + 1}" for j in np.nonzero(point.active)[0]]
    print(f"{label}: z1={point.z1:.6g} z2={point.z2} active=[{', '.join(used)}]")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(point_to_dict(point), fh, indent=1)
            fh.write("\n")
    return 0


def _cmd_bench(args) -> int:
    cls_label = f"C({args.p},{args.n})"
    rows = []
    frontiers = []
    for i in range(args.instances):
        seed = args.seed + i
        dataset, _ = generate_instance(InstanceClass(p=args.p, n=args.n, seed=seed))
        bounds = compute_bounds(dataset)
        t0 = time.perf_counter()
        frontier = solve_frontier(dataset, bounds, node_limit=args.node_limit)
        elapsed = time.perf_counter() - t0
        rows.append((i + 1, seed, elapsed, len(frontier.points)))
        frontiers.append(frontier)
        logger.info("%s instance %d: %.2fs, %d points", cls_label, i + 1,
                    elapsed, len(frontier.points))

    print(f"{'Class':<12}{'Instance':>9}{'Time(Sec.)':>12}{'#NDPs':>7}")
    for inst, _, elapsed, ndps in rows:
        print(f"{cls_label:<12}{inst:>9}{elapsed:>12.2f}{ndps:>7}")
    avg_time = sum(r[2] for r in rows) / len(rows)
    avg_ndps = sum(r[3] for r in rows) / len(rows)
    print(f"{'Average':<12}{'':>9}{avg_time:>12.2f}{avg_ndps:>7.1f}")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("class,instance,seed,time_sec,ndps\n")
            for inst, seed, elapsed, ndps in rows:
                fh.write(f"{cls_label},{inst},{seed},{elapsed!r},{ndps}\n")
            fh.write(f"{cls_label},average,,{avg_time!r},{avg_ndps!r}\n")
        if args.plot:
            render_frontier_overlay(
                frontiers, [f"instance {r[0]}" for r in rows],
                _sibling(args.out, ".png"), title=f"{cls_label} frontiers")
    return 0


def _cmd_export_lp(args) -> int:
    dataset = load_dataset(args.input)
    bounds = _bounds_for(dataset, args.bounds)
    model = build_bomilp(dataset, bounds,
                         exclude_trivial=not args.include_trivial)
    if args.objective == "bias":
        objective = model.z1
    elif args.objective == "cardinality":
        objective = model.z2
    else:
        if args.weight is None:
            raise ParetoSubsetError("--objective weighted needs --lambda")
        objective = model.z1 + args.weight * model.z2
    problem = model.subproblem(objective, cardinality_cap=args.k,
                               bias_cap=args.bias_cap)
    save_lp(problem, args.out)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-subset",
        description="Exact bi-objective best-subset selection for "
                    "least-absolute-deviations regression.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_in=True, needs_out=True):
        if needs_in:
            p.add_argument("--in", dest="input", required=True,
                           help="input file path")
        if needs_out:
            p.add_argument("--out", required=True, help="output file path")

    def add_node_limit(p):
        p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT,
                       help="branch-and-bound node cap per subproblem")

    def add_plot(p):
        p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                       default=True, help="render a figure beside the output")

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--p", type=int, required=True, help="predictor count incl. intercept")
    p.add_argument("--n", type=int, required=True, help="observation count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="dataset CSV path")
    p.add_argument("--truth", help="ground-truth JSON path (default: <out>.truth.json)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bounds", help="compute coefficient bounds")
    add_io(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("solve", help="enumerate the nondominated frontier")
    add_io(p)
    p.add_argument("--bounds", help="bounds JSON (computed when omitted)")
    p.add_argument("--include-trivial", action=argparse.BooleanOptionalAction,
                   default=True, help="report the zero-predictor point")
    add_node_limit(p)
    add_plot(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("classify", help="classify frontier points")
    add_io(p)
    add_plot(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("select", help="pick the point closest to the ideal point")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="write the selected point as JSON")
    p.add_argument("--normalized", action=argparse.BooleanOptionalAction,
                   default=False, help="scale objectives to comparable ranges")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("baseline", help="run a single-objective reduction")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--bounds")
    p.add_argument("--lambda", dest="weight", type=float,
                   help="weighted-sum weight on the predictor count")
    p.add_argument("--k", type=int, help="goal-programming cardinality cap")
    p.add_argument("--lexicographic", action=argparse.BooleanOptionalAction,
                   default=False, help="refine to a guaranteed nondominated point")
    p.add_argument("--include-trivial", action=argparse.BooleanOptionalAction,
                   default=False, help="allow the empty model (weighted sum only)")
    p.add_argument("--out", help="write the returned point as JSON")
    add_node_limit(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("bench", help="timing/#NDPs summary over one class")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="summary CSV path")
    add_node_limit(p)
    add_plot(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("export-lp", help="write a subproblem in LP format")
    add_io(p)
    p.add_argument("--bounds")
    p.add_argument("--objective", choices=("bias", "cardinality", "weighted"),
                   default="bias")
    p.add_argument("--lambda", dest="weight", type=float)
    p.add_argument("--k", type=int, help="optional cardinality cap row")
    p.add_argument("--bias-cap", type=float, help="optional bias cap row")
    p.add_argument("--include-trivial", action=argparse.BooleanOptionalAction,
                   default=False, help="drop the cut excluding the empty model")
    p.set_defaults(func=_cmd_export_lp)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParetoSubsetError as exc:
        kind = type(exc).__name__
        message = " ".join(str(exc).split())
        print(f"error code={exc.exit_code} kind={kind}: {message}",
              file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        message = " ".join(str(exc).split())
        print(f"error code=8 kind=OSError: {message}", file=sys.stderr)
        return 8


if __name__ == "__main__":
    sys.exit(main())
