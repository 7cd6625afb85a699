"""Command-line interface: ``blindeep {generate,signals,extract,verify,benchmark}``.

Exit codes: 0 success, 1 usage or input error, 2 numeric failure,
3 the partition is not an EEP (``verify``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .filters import build_filter_matrix, filter_from_spec
from .graph_core import PlantedInstance, chain_design, generate_planted_eep, quotient
from .pipeline import (STRONG, WEAK, DegenerateGapWarning, ExperimentConfig, be_eeps,
                       run_benchmark, verify)
from .signals import sample_observations
from .solvers import SOLVER_NAMES
from .solvers.base import InfeasibleResultError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_NOT_EEP = 0, 1, 2, 3

FILTER_PRESETS = {"strong": STRONG, "weak": WEAK}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    # the subparser copies use SUPPRESS so they never clobber values given
    # before the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--config", type=Path, default=d(None), help="JSON file with option defaults")
    p.add_argument("--out", type=Path, default=d(Path(".")), help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default=d("csv"),
                   help="format of reports and tables")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blindeep", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = _Parser(add_help=False)
    _add_common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a planted EEP instance")
    g.add_argument("--sizes", type=_int_list, help="cell sizes, e.g. 20,20,20")
    g.add_argument("--cross", type=int, help="chain cross-degree between consecutive cells")
    g.add_argument("--b", help="cross-degree matrix as JSON, e.g. [[0,2],[1,0]]")
    g.add_argument("--p-intra", type=float, help="intra-cell edge probability")

    s = sub.add_parser("signals", parents=[common], help="sample filtered graph signals")
    s.add_argument("instance", type=Path, help="instance JSON or edge list")
    s.add_argument("-m", "--samples", type=int, help="number of signals")
    s.add_argument("--filter", help="'strong', 'weak' or a JSON filter spec")
    s.add_argument("--noise-var", type=float, help="observation noise variance")
    s.add_argument("--binary", action="store_true", help="write signals.bin instead of CSV")

    e = sub.add_parser("extract", parents=[common], help="recover a partition from signals")
    e.add_argument("signals", type=Path, help="signals CSV or .bin file")
    e.add_argument("-r", "--cells", type=int, help="number of cells")
    e.add_argument("--solver", choices=SOLVER_NAMES, help="solver (default kmeans)")
    e.add_argument("--truth", type=Path, help="instance JSON with planted cells, for scoring")

    v = sub.add_parser("verify", parents=[common], help="check whether a partition is an EEP")
    v.add_argument("instance", type=Path, help="instance JSON or edge list")
    v.add_argument("partition", type=Path, nargs="?",
                   help="partition JSON (default: the instance's own cells)")

    b = sub.add_parser("benchmark", parents=[common], help="run the synthetic benchmark")
    b.add_argument("--trials", type=int)
    b.add_argument("--m-list", type=_int_list, help="sample sizes, e.g. 100,300,1000")
    b.add_argument("--solvers", help="comma-separated subset of " + ",".join(SOLVER_NAMES))
    b.add_argument("--filter", help="'strong', 'weak' or a JSON filter spec")
    b.add_argument("--fixed-instance", action="store_true", default=None,
                   help="reuse one planted graph for every trial")
    b.add_argument("--workers", type=int, default=1)
    return parser


def _pick(args, cfg: dict, attr: str, key: str, default=None):
    val = getattr(args, attr, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _filter_spec(value):
    if value is None:
        return None
    if isinstance(value, dict):
        return value
    if value in FILTER_PRESETS:
        return dict(FILTER_PRESETS[value])
    try:
        spec = json.loads(value)
    except json.JSONDecodeError:
        raise UsageError(f"--filter: expected 'strong', 'weak' or JSON, got {value!r}") from None
    if not isinstance(spec, dict):
        raise UsageError("--filter JSON must be an object")
    return spec


def _read_graph(path: Path):
    if path.suffix == ".json":
        return io.read_instance(path)
    return io.read_edge_list(path), None


def _emit(obj, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        rows = obj if isinstance(obj, list) else [obj]
        cols = list(rows[0]) if rows else []
        print(",".join(cols))
        for row in rows:
            print(",".join(str(row[c]) for c in cols))


def cmd_generate(args, cfg) -> int:
    sizes = _pick(args, cfg, "sizes", "sizes")
    if not sizes:
        raise UsageError("generate needs --sizes (or 'sizes' in --config)")
    b = _pick(args, cfg, "b", "b")
    if isinstance(b, str):
        try:
            b = json.loads(b)
        except json.JSONDecodeError:
            raise UsageError(f"--b is not valid JSON: {b!r}") from None
    if b is None:
        b = chain_design(sizes, _pick(args, cfg, "cross", "cross", 1))
    p_intra = _pick(args, cfg, "p_intra", "p_intra", 0.5)
    inst = generate_planted_eep(sizes, b, p_intra, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_instance(inst.graph, inst.truth, args.out / "instance.json")
    io.write_edge_list(inst.graph, args.out / "graph.edges")
    io.write_partition(inst.truth, args.out / "partition.json")
    _emit({"n": inst.graph.n, "edges": len(inst.graph.edges), "cells": inst.truth.r,
           "instance": str(args.out / "instance.json")}, args.format)
    return EXIT_OK


def cmd_signals(args, cfg) -> int:
    g, _ = _read_graph(args.instance)
    spec = _filter_spec(_pick(args, cfg, "filter", "filter", "strong"))
    m = _pick(args, cfg, "samples", "m", 1000)
    noise = _pick(args, cfg, "noise_var", "noise_var", 0.01)
    fm = build_filter_matrix(filter_from_spec(spec, g), g)
    batch = sample_observations(fm, m, noise, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / ("signals.bin" if args.binary else "signals.csv")
    io.write_signals(batch, path)
    _emit({"n": batch.n, "m": batch.m, "noise_var": noise, "signals": str(path)}, args.format)
    return EXIT_OK


def cmd_extract(args, cfg) -> int:
    batch = io.read_signals(args.signals)
    r = _pick(args, cfg, "cells", "r")
    if r is None:
        raise UsageError("extract needs -r/--cells (or 'r' in --config)")
    solver = dict(cfg.get("solver_options", {}))
    solver["solver"] = _pick(args, cfg, "solver", "solver", "kmeans")
    solver.setdefault("seed", args.seed)
    truth = None
    if args.truth is not None:
        g, cells = io.read_instance(args.truth)
        if cells is None:
            raise UsageError(f"{args.truth} has no 'cells' to score against")
        truth = PlantedInstance(g, cells, quotient(g, cells))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateGapWarning)
        ex = be_eeps(batch, r, solver, truth)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_partition(ex.partition, args.out / "partition.json")
    row = {"solver": solver["solver"], "m": batch.m, "r": r,
           "objective": ex.solver.objective, "iters": ex.solver.iterations,
           "sizes": "/".join(str(s) for s in ex.partition.sizes)}
    if ex.report is not None:
        row.update(F_c=ex.report.cost_fc, gamma=ex.report.group_accuracy,
                   matched_acc=ex.report.matched_accuracy)
    _emit(row, args.format)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    g, own = _read_graph(args.instance)
    if args.partition is not None:
        p = io.read_partition(args.partition, n=g.n)
    elif own is not None:
        p = own
    else:
        raise UsageError("verify needs a partition file when the instance has no cells")
    rep = verify(g, p)
    if args.format == "json":
        print(json.dumps({"is_eep": rep.is_eep, "quotient_laplacian": rep.quotient_laplacian,
                          "witness": rep.witness}, indent=2))
    else:
        print(rep.text())
    return EXIT_OK if rep.is_eep else EXIT_NOT_EEP


def cmd_benchmark(args, cfg) -> int:
    d = dict(cfg)
    if args.seed_given or "seed" not in d:
        d["seed"] = args.seed
    if args.trials is not None:
        d["trials"] = args.trials
    if args.m_list is not None:
        d["m_list"] = args.m_list
    if args.solvers is not None:
        d["solvers"] = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if args.filter is not None:
        d.pop("filter", None)
        d["filters"] = [_filter_spec(args.filter)]
    if args.fixed_instance is not None:
        d["fixed_instance"] = True
    if "filters" in d:
        d["filters"] = [_filter_spec(f) for f in d["filters"]]
    if "filter" in d:
        d["filter"] = _filter_spec(d["filter"])
    try:
        exp = ExperimentConfig.from_dict(d)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid benchmark config: {e}") from None
    res = run_benchmark(exp, out_dir=args.out, workers=args.workers)
    if args.format == "json":
        (args.out / "table.json").write_text(json.dumps(res.table, indent=2) + "\n")
        print(json.dumps(res.table, indent=2))
    else:
        sys.stdout.write(res.table_csv())
    if res.failures:
        print(f"{len(res.failures)} of {exp.trials} trials failed", file=sys.stderr)
        if len(res.failures) == exp.trials:
            return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "signals": cmd_signals, "extract": cmd_extract,
            "verify": cmd_verify, "benchmark": cmd_benchmark}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = io.load_config(args.config) if args.config is not None else {}
        return COMMANDS[args.command](args, cfg)
    except UsageError as e:
        print(f"blindeep: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (io.FormatError, FileNotFoundError, IsADirectoryError) as e:
        print(f"blindeep: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (np.linalg.LinAlgError, InfeasibleResultError, AssertionError,
            FloatingPointError) as e:
        print(f"blindeep: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"blindeep: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
