"""Command line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 solver failure in a
stabilised run, 4 memory-ceiling refusal.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .exceptions import InvalidParameterError, MemoryCeilingError
from .harness import (
    DEFAULT_MEMORY_CEILING,
    FORMATS,
    StudyConfig,
    run_cfl_demo,
    run_study,
    to_csv,
    to_markdown,
)
from .linsystem import SOLVERS
from .polybasis import NODE_PLACEMENTS
from .solutions import SOLUTIONS

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_MEMORY = 0, 2, 3, 4


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stwave",
        description="Convergence studies for stabilised space-time Galerkin discretisations of the 1D wave equation.",
    )
    ap.add_argument("--degree", type=int, default=1, help="polynomial degree p in [1, 8]")
    ap.add_argument("--solution", choices=sorted(SOLUTIONS), default="u1")
    ap.add_argument("--levels", type=int, default=8, help="number of refinement levels, starting at the coarse mesh")
    ap.add_argument("--stabilised", type=_bool, default=True, metavar="{true,false}")
    ap.add_argument("--nodes", choices=NODE_PLACEMENTS, default="gauss_lobatto")
    ap.add_argument("--quad-boost", type=int, default=0, help="extra quadrature points per direction")
    ap.add_argument("--format", choices=FORMATS, default="csv")
    ap.add_argument("--out", default=None, help="output file (default: stdout)")
    ap.add_argument("--T", type=float, default=10.0, help="terminal time")
    ap.add_argument("--solver", choices=SOLVERS, default="march")
    ap.add_argument("--max-memory-gb", type=float, default=DEFAULT_MEMORY_CEILING / 1024**3)
    ap.add_argument("--demo-cfl", action="store_true", help="compare stabilised and unstabilised runs of u1")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.demo_cfl:
        try:
            demo = run_cfl_demo(args.degree, args.levels, args.T, args.solver)
        except InvalidParameterError as exc:
            print(f"invalid configuration: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        _emit(demo.to_markdown(), args.out)
        return EXIT_SOLVER if demo.stabilised.failed else EXIT_OK

    config = StudyConfig(
        degree=args.degree,
        solution=args.solution,
        levels=args.levels,
        stabilised=args.stabilised,
        node_placement=args.nodes,
        quad_boost=args.quad_boost,
        output=args.format,
        T=args.T,
        out_path=args.out,
        solver=args.solver,
        memory_ceiling=int(args.max_memory_gb * 1024**3),
    )
    try:
        report = run_study(config)
    except InvalidParameterError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryCeilingError as exc:
        print(f"refusing to run: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    if not args.out:
        _emit(to_csv(report) if args.format == "csv" else to_markdown(report), None)
    if report.failed:
        print(f"solver failure: {report.failure}", file=sys.stderr)
        if config.stabilised:
            return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
