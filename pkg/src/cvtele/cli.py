"""Command line entry point.

Exit codes: 0 success, 1 reference check failed, 2 parse error,
3 unphysical parameters, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InconsistentMeasurement, InvalidArgument, UnphysicalParameter
from .experiments import (
    anchors_table,
    measured_fidelities,
    reproduce_anchors,
    run_scenario,
    sweep_csv,
    write_sweep_plot,
)
from .fidelity import classical_fidelity_sweep
from .scenario import ScenarioError, bundled_scenarios, load_scenario

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_UNPHYSICAL, EXIT_IO = 0, 1, 2, 3, 4


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _resolve_scenario(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    bundled = bundled_scenarios()
    if name in bundled:
        return bundled[name]
    raise FileNotFoundError(name)


def cmd_run(args) -> int:
    try:
        path = _resolve_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: no such scenario file or bundled scenario: {args.scenario}", file=sys.stderr)
        return EXIT_IO
    try:
        scenario = load_scenario(path)
    except ScenarioError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UnphysicalParameter, InconsistentMeasurement) as exc:
        print(f"unphysical scenario: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = run_scenario(scenario, seed=args.seed, workers=args.workers)
    print(report.to_text(), end="")
    if args.csv:
        try:
            _write(args.csv, report.to_csv())
        except OSError as exc:
            print(f"error: cannot write {args.csv}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_reproduce(args) -> int:
    rows = reproduce_anchors(mc_shots=args.shots, seed=args.seed)
    print(anchors_table(rows), end="")
    return EXIT_OK if all(a.passed for a in rows) else EXIT_FAIL


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def cmd_sweep(args) -> int:
    axis = {"tau": "tau_db", "antisqueeze": "antisqueeze_db"}[args.axis]
    try:
        points = classical_fidelity_sweep(axis, args.fixed_db, args.range, args.steps)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.plot:
        try:
            import matplotlib  # noqa: F401
        except ImportError:
            print("error: --plot needs matplotlib (pip install 'artifact[plot]')", file=sys.stderr)
            return EXIT_IO
    try:
        _write(args.out, sweep_csv(points))
        if args.plot:
            write_sweep_plot(points, axis, args.fixed_db, args.plot)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(points)} points to {args.out}")
    return EXIT_OK


def cmd_fidelity(args) -> int:
    try:
        rows = measured_fidelities(args.in_x_db, args.in_p_db, args.out_x_db, args.out_p_db)
    except (UnphysicalParameter, InvalidArgument) as exc:
        print(f"unphysical input: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    for method, value in rows:
        print(f"{method:<24}{value:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvtele", description="Gaussian-state teleportation simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file or a bundled scenario by name")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--csv", help="also write the report as CSV")
    p.add_argument("--workers", type=int, default=None, help="threads for Monte-Carlo runs")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce-paper", help="check every published reference value")
    p.add_argument("--seed", type=int, default=2005)
    p.add_argument("--shots", type=int, default=100_000)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sweep-fig4", help="classical-limit fidelity sweep")
    p.add_argument("--axis", choices=("tau", "antisqueeze"), required=True)
    p.add_argument("--fixed-db", type=float, required=True)
    p.add_argument("--range", type=_parse_range, default=(0.0, 20.0), metavar="LO:HI")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="optional vector plot (svg or pdf)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fidelity", help="fidelities from input and output variances in dB")
    for name in ("in-x-db", "in-p-db", "out-x-db", "out-p-db"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.set_defaults(func=cmd_fidelity)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
