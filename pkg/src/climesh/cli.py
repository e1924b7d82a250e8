"""Command-line entry point.

Subcommands: validate, simulate, analyze, envelope, export-csv. All
randomness flows from the scenario seed (or --seed override), outputs
carry virtual timestamps only, and identical invocations produce
byte-identical files.

Exit codes: 0 success, 1 configuration/usage error, 2 I/O or storage
error, 3 unmet analysis precondition (e.g. no closed day yet).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, engine, scenario, store
from .errors import (ClimeshError, ConfigError, DomainError, FormatError,
                     NoDataError, NotReadyError, RoutingError, StorageError)
from .heterogeneity import ParameterKind
from .station import WindCalibration

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_PRECONDITION = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as config errors (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="climesh",
                     description="greenhouse climate-sensing network simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[], help="check a scenario file")
    p.add_argument("scenario", help="scenario file path or bundled name "
                                    f"({', '.join(scenario.BUNDLED)})")

    p = sub.add_parser("simulate", help="run a scenario into an output directory")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory for data/ and summary")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    p = sub.add_parser("analyze", help="heterogeneity report from a simulated store")
    p.add_argument("store", help="run directory or its data/ subdirectory")
    p.add_argument("--params", default="air_temp,mean_radiant_temp",
                   help="comma-separated parameter kinds")
    p.add_argument("--out", required=True, help="directory for report files")
    p.add_argument("--debounce", type=float, default=0.0,
                   help="bridge homogeneous gaps up to this many seconds")

    p = sub.add_parser("envelope", help="radiant-temperature envelope for one station-day")
    p.add_argument("store")
    p.add_argument("--station", type=int, required=True)
    p.add_argument("--date", required=True, help="UTC date YYYY-MM-DD")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")

    p = sub.add_parser("export-csv", help="per-height CSV export of every closed day")
    p.add_argument("store")
    p.add_argument("--out", default=None,
                   help="directory for <date>.csv files (default: inside each day)")
    return parser


def _parse_params(text: str) -> list[ParameterKind]:
    kinds = []
    for token in text.split(","):
        token = token.strip()
        try:
            kinds.append(ParameterKind(token))
        except ValueError:
            valid = ", ".join(k.value for k in ParameterKind)
            raise ConfigError(f"unknown parameter {token!r}; valid: {valid}") from None
    return kinds


def _cmd_validate(args) -> int:
    sc = scenario.load_scenario(args.scenario)
    print(f"scenario '{sc.name}' OK: {sc.n_days} day(s), seed {sc.seed}, "
          f"{sc.rounds_per_day} rounds/day, start {sc.start_date}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sc = scenario.load_scenario(args.scenario, seed_override=args.seed)
    out_root = Path(args.out)
    data_dir = out_root / "data"
    if data_dir.exists() and any(data_dir.iterdir()):
        raise StorageError(f"{data_dir} already contains data; pick a fresh directory")
    summary = engine.run_scenario(sc, out_root)
    print(f"simulated '{sc.name}': {summary.totals['delivered']} delivered, "
          f"{summary.totals['missing']} missing, "
          f"{summary.totals['reconfigurations']} reconfiguration(s)")
    print(f"store: {data_dir}")
    print(f"summary: {out_root / 'run_summary.json'}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    kinds = _parse_params(args.params)
    report = analysis.analyze(args.store, kinds=kinds, debounce_s=args.debounce,
                              out_dir=args.out)
    n_spans = sum(len(v) for v in report.intervals.values())
    print(f"analyzed {len(report.days)} day(s), {len(report.rows)} verdicts, "
          f"{n_spans} heterogeneous interval(s)")
    print(f"report: {Path(args.out) / 'report.csv'}")
    return EXIT_OK


def _cmd_envelope(args) -> int:
    rows = analysis.radiant_envelope(args.store, args.station, args.date)
    if args.out is None:
        print(",".join(analysis.ENVELOPE_HEADER))
        for row in rows:
            print(",".join(str(v) for v in row))
    else:
        analysis.write_envelope_csv(rows, args.out)
        print(f"envelope: {args.out} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_export_csv(args) -> int:
    root = analysis.resolve_store_root(args.store)
    days = store.closed_days(root)
    if not days:
        raise NotReadyError(f"no closed days under {root}")
    wind = WindCalibration()
    for date in days:
        day_dir = root / date
        out_path = (Path(args.out) / f"{date}.csv") if args.out \
            else day_dir / "export.csv"
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        store.export_day_csv(day_dir, out_path, wind)
        print(f"exported {date} -> {out_path}")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "envelope": _cmd_envelope,
    "export-csv": _cmd_export_csv,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, FormatError, DomainError, RoutingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotReadyError, NoDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (StorageError, FileNotFoundError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ClimeshError as exc:  # pragma: no cover - catch-all for new subtypes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
