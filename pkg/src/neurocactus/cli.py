"""Command-line entry point: ``neurocactus <subcommand> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .control import rank_report, structural_controllability_test
from .dynamics import NetworkParams
from .errors import GraphError, NumericalFailure, SchemaError, DanglingReference, NeurocactusError
from .graph import (
    dumps_canonical,
    find_decomposition,
    generate_generalized,
    load_decomposition,
    load_graph,
    max_out_degree,
    save_decomposition,
    save_graph,
    validate_generalized,
)
from .scenario import (
    load_scenario,
    parse_target,
    run_scenario,
    shipped_path,
    write_outputs,
)

log = logging.getLogger("neurocactus")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = shipped_path(p.name)
    if bundled.exists():
        return bundled
    raise UsageError(f"file not found: {path}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)) and not any(isinstance(v, (dict, list)) for v in obj):
        yield prefix.rstrip("."), ";".join(str(v) for v in obj)
    elif isinstance(obj, (list, tuple)):
        for k, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{k}.")
    else:
        yield prefix.rstrip("."), obj


def _csv_line(summary: dict) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(f"{k}={v}" for k, v in _flatten(summary))
    return buf.getvalue()


def _write_report(out, report: dict, fmt: str) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            w.writerows(_flatten(report))
    else:
        (out / "report.json").write_text(dumps_canonical(report))


def _emit(args, summary: dict, report: dict | None = None) -> None:
    """Print the one-line summary; write ``report`` into ``--out`` in the chosen format."""
    if args.format == "csv":
        print(_csv_line(summary))
    else:
        print(json.dumps(summary, sort_keys=True, separators=(",", ":")))
    if report is not None and args.out:
        _write_report(args.out, report, args.format)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    s = load_scenario(args.scenario)
    result = run_scenario(s)
    result.report["seed"] = args.seed
    if args.out:
        write_outputs(result, args.out, plot=args.plot)
        if args.format == "csv":
            _write_report(args.out, result.report, "csv")
    summary = {
        "command": "simulate",
        "scenario": s.name,
        "passed": result.passed,
        "failed": [c.check for c in result.checks if not c.passed],
        "max_abs_state": result.report["max_abs_state"],
        "x_max": result.report["x_max"],
    }
    _emit(args, summary)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_validate(args) -> int:
    g = load_graph(_resolve(args.graph))
    if args.decomposition:
        gd = load_decomposition(_resolve(args.decomposition))
        verdict = validate_generalized(g, gd)
        found = None
    else:
        if g.n > 12:
            raise UsageError("decomposition search is limited to 12 nodes; pass --decomposition")
        found = find_decomposition(g)
        verdict = validate_generalized(g, found) if found is not None else None
    accepted = bool(verdict)
    summary = {"command": "validate", "accepted": accepted}
    if verdict is not None:
        summary.update(verdict.to_dict())
    else:
        summary.update(reason="NoDecompositionFound", detail="exhaustive search found none")
    report = dict(summary)
    if found is not None:
        report["decomposition"] = found.to_dict()
    _emit(args, summary, report)
    return EXIT_OK if accepted else EXIT_FAIL


def cmd_controllability(args) -> int:
    g = load_graph(_resolve(args.graph))
    p = NetworkParams(c_n=args.c_n)
    B = g.input_matrix()
    at_w0 = rank_report(g.weight_matrix(), B, p.c_n)
    structural = structural_controllability_test(
        g, p, samples=args.samples, rng_seed=args.seed, workers=args.workers
    )
    summary = {
        "command": "controllability",
        "controllable": structural.controllable,
        "rank": structural.rank,
        "n": g.n,
        "sample_fraction": structural.sample_fraction_full_rank,
        "rank_at_initial_weights": at_w0.rank,
    }
    report = {"structural": structural.to_dict(), "initial_weights": at_w0.to_dict(),
              "samples": args.samples, "seed": args.seed}
    _emit(args, summary, report)
    return EXIT_OK if structural.controllable else EXIT_FAIL


def _read_target(path: str, n: int) -> np.ndarray:
    try:
        data = json.loads(_resolve(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"target file is not JSON: {exc}") from exc
    if isinstance(data, dict) and "target" in data:
        data = data["target"]
    return parse_target(data, n)


def cmd_lqr(args) -> int:
    s = load_scenario(args.scenario)
    if args.target:
        target = _read_target(args.target, s.graph.n)
    elif s.target is not None:
        target = s.target
    else:
        raise UsageError("scenario declares no target; pass --target")
    if s.target is None:
        s.expectations.append({"check": "target"})
    result = run_scenario(s, target=target, recompute_each_slot=not args.fixed_gain)
    result.report["seed"] = args.seed
    if args.out:
        write_outputs(result, args.out, plot=args.plot)
        if args.format == "csv":
            _write_report(args.out, result.report, "csv")
    lqr = result.report["lqr"]
    gap = next((c.measured["steady_state_gap"] for c in result.checks if c.check == "target"), None)
    summary = {
        "command": "lqr",
        "scenario": s.name,
        "passed": result.passed,
        "care_residual": lqr["care_residual"],
        "target_residual": lqr["target_residual"],
        "steady_state_gap": gap,
        "recompute_each_slot": lqr["recompute_each_slot"],
    }
    _emit(args, summary)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_generate(args) -> int:
    try:
        roots = [int(r) for r in args.roots.split(",") if r.strip()]
    except ValueError as exc:
        raise UsageError(f"--roots must be a comma-separated list of node ids: {exc}") from exc
    g, gd = generate_generalized(
        args.nodes,
        roots,
        args.seed,
        sign_ratio=args.sign_ratio,
        extra_edges=args.extra_edges,
        max_degree=args.max_degree,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(g, out / "graph.json")
    save_decomposition(gd, out / "decomposition.json")
    summary = {
        "command": "generate",
        "n": g.n,
        "edges": len(g.edges),
        "d_max": max_out_degree(g),
        "roots": roots,
        "seed": args.seed,
        "accepted": bool(validate_generalized(g, gd)),
    }
    _emit(args, summary)
    return EXIT_OK


def cmd_version(args) -> int:
    _emit(args, {"command": "version", "version": __version__, "backend": BACKEND})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurocactus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="artifact directory")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("simulate", parents=[common], help="run a scenario file")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("validate", parents=[common], help="check a generalized sym-cactus certificate")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--decomposition", default=None)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("controllability", parents=[common], help="sampled rank test")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--c-n", type=float, default=4.1, dest="c_n")
    sp.set_defaults(func=cmd_controllability)

    sp = sub.add_parser("lqr", parents=[common], help="LQR regulation of a scenario to a target")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--target", default=None)
    sp.add_argument("--fixed-gain", action="store_true")
    sp.add_argument("--plot", action="store_true")
    sp.set_defaults(func=cmd_lqr)

    sp = sub.add_parser("generate", parents=[common], help="random generalized sym-cactus")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--roots", required=True)
    sp.add_argument("--extra-edges", type=int, default=0)
    sp.add_argument("--max-degree", type=int, default=None)
    sp.add_argument("--sign-ratio", type=float, default=0.8)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("version", parents=[common], help="print version and kernel backend")
    sp.set_defaults(func=cmd_version)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("NEUROCACTUS_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "generate" and not args.out:
        print("neurocactus generate: --out is required", file=sys.stderr)
        return EXIT_USAGE
    log.debug("arguments: %s", vars(args))
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, SchemaError, DanglingReference, GraphError) as exc:
        print(f"neurocactus {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"neurocactus {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (NeurocactusError, ValueError) as exc:
        print(f"neurocactus {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
