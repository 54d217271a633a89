"""Command line entry point: ``adaptive-knn {run,sweep,bounds,gen}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .algorithm import RunConfig, run
from .bounds import GapProfile, complexity_report
from .core import ConfidenceSpec, Dataset, Query
from .datagen import SubspaceSpec, generate_coherent, generate_subspace, load_instance, read_matrix, write_instance
from .harness import ExperimentSpec, emit, run_sweep, to_csv, to_json
from .oracle import brute_force

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


MODES = {"with-replacement": "with-replacement", "without-replacement": "without-replacement"}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--h", type=int, default=10)
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--variant", choices=["theory", "experimental"], default="experimental")
    p.add_argument("--mode", choices=sorted(MODES), default="with-replacement")
    p.add_argument("--seed", type=int, default=0)


def _instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generator", choices=["subspace", "coherent"], default="subspace")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=12288)
    p.add_argument("--p", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adaptive-knn", description="Adaptive k-nearest-neighbour search.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="answer one query and print the run report as JSON")
    _common(p)
    _instance(p)
    p.add_argument("--c-alpha", type=float, default=1.0)
    p.add_argument("--data", help="instance CSV; the last row is the query unless --query is given")
    p.add_argument("--query", help="CSV holding a single query row")
    p.add_argument("--normalize", action="store_true", help="map CSV values affinely onto [-1/2, 1/2]")
    p.add_argument("--check", action="store_true", help="add the brute-force recall to the report")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (output no longer reproducible)")

    p = sub.add_parser("sweep", help="trials over a C_alpha grid; writes CSV or JSON")
    p.add_argument("--config", help="JSON experiment spec; flags given explicitly override it")
    p.add_argument("--generator", choices=["subspace", "coherent", "csv"])
    for flag, typ in (("--n", int), ("--m", int), ("--p", int), ("--k", int), ("--h", int),
                      ("--delta", float), ("--trials", int), ("--seed", int), ("--threads", int)):
        p.add_argument(flag, type=typ)
    p.add_argument("--c-alpha", type=float, nargs="+")
    p.add_argument("--variant", choices=["theory", "experimental"])
    p.add_argument("--mode", choices=sorted(MODES))
    p.add_argument("--data")
    p.add_argument("--normalize", action="store_true", default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("bounds", help="complexity scores for a distance profile")
    p.add_argument("--distances", help="file of distances, one per line or comma separated")
    p.add_argument("--data", help="instance CSV (last row is the query); distances are computed exactly")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--h", type=int, default=10)
    p.add_argument("--m", type=int, help="dimension cap; taken from --data when omitted")
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--variant", choices=["theory", "experimental"], default="theory")
    p.add_argument("--c-alpha", type=float, default=1.0)
    p.add_argument("--out")

    p = sub.add_parser("gen", help="write a generated instance (query as last row) to CSV")
    _instance(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    if args.data:
        data, query = load_instance(args.data, args.normalize)
        if args.query:
            q = read_matrix(args.query)
            data = Dataset(np.vstack([data.points, query.coords]), data.metadata)
            query = Query(q[0])
    elif args.generator == "coherent":
        data, query = generate_coherent(args.n, args.m, args.seed)
    else:
        data, query = generate_subspace(SubspaceSpec(args.n, args.m, args.p, args.seed))
    cfg = RunConfig(k=args.k, h=args.h, delta=args.delta, variant=args.variant, c_alpha=args.c_alpha,
                    sampling_mode=MODES[args.mode], seed=args.seed, max_iterations=args.max_iterations)
    report = run(data, query, cfg)
    doc = report.to_dict(timing=args.timing)
    if args.check:
        truth = brute_force(data, query, args.k)
        doc["recall"] = len(truth.k_set.intersection(report.result_set)) / args.k
    text = json.dumps(doc) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


_SWEEP_FLAGS = {
    "generator": "generator", "n": "n", "m": "m", "p": "p", "k": "k", "h": "h", "delta": "delta",
    "trials": "trials", "seed": "seed", "threads": "threads", "c_alpha": "c_alphas", "variant": "variant",
    "mode": "sampling_mode", "data": "data", "normalize": "normalize", "out": "out", "format": "format",
}


def cmd_sweep(args) -> int:
    spec = ExperimentSpec.from_json(args.config) if args.config else ExperimentSpec()
    overrides = {}
    for flag, name in _SWEEP_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[name] = MODES[value] if flag == "mode" else value
    if overrides.get("data") and "generator" not in overrides:
        overrides["generator"] = "csv"
    spec = replace(spec, **overrides)
    result = run_sweep(spec)
    if spec.out:
        emit(result, spec.out, spec.format, timing=args.timing)
    else:
        sys.stdout.write(to_csv(result, args.timing) if spec.format == "csv" else to_json(result, args.timing))
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.data:
        data, query = load_instance(args.data)
        distances = brute_force(data, query, 1).distances
        m = args.m or data.m
    elif args.distances:
        text = Path(args.distances).read_text(encoding="utf-8").replace(",", " ")
        distances = np.array([float(tok) for tok in text.split()])
        if args.m is None:
            raise ValueError("--m is required with --distances")
        m = args.m
    else:
        raise ValueError("give either --distances or --data")
    profile = GapProfile.from_distances(distances, args.k, args.h, m)
    spec = ConfidenceSpec(args.variant, args.delta, profile.n, args.c_alpha)
    report = complexity_report(profile, spec)
    _write_or_print(json.dumps(report.to_dict()) + "\n", args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.generator == "coherent":
        data, query = generate_coherent(args.n, args.m, args.seed)
    else:
        data, query = generate_subspace(SubspaceSpec(args.n, args.m, args.p, args.seed))
    write_instance(args.out, data, query)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "bounds": cmd_bounds, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"adaptive-knn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
