"""Command line entry point: ``superlich-verify``.

Exit status is 0 when every case passes, 1 when any case fails or errors and
2 for configuration errors.  Reports go to ``--report``, else to
``$SUPERLICH_REPORT_DIR/report.jsonl`` when that variable is set, else to
standard output.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .geometry import CATALOG, DEFAULT_CATALOG
from .suite import FAMILIES, IDENTITIES, ConfigError, load_config, report_lines, run_suite

REPORT_DIR_ENV = "SUPERLICH_REPORT_DIR"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="superlich-verify",
        description="Verify Clifford superconnection identities on a catalog of charts.")
    p.add_argument("--config", help="INI file with [suite] and [tolerance] sections")
    p.add_argument("--geometry", action="append",
                   help="geometry id (repeatable; default: the default catalog)")
    p.add_argument("--identity", action="append", help="identity id (repeatable; default: all)")
    p.add_argument("--family", action="append", help="superconnection family (repeatable)")
    p.add_argument("--seed", type=int, help="first seed (default 0)")
    p.add_argument("--seeds", type=int, help="number of consecutive seeds per case")
    p.add_argument("--sections", type=int, help="test sections per case")
    p.add_argument("--points", type=int, help="sample points per case")
    p.add_argument("--tolerance", type=float, help="override every case tolerance")
    p.add_argument("--report", help="path of the JSON-lines report")
    p.add_argument("--list", action="store_true", help="list geometries, families and identities")
    p.add_argument("--quiet", action="store_true", help="no per-case progress on stderr")
    return p


def _list() -> str:
    lines = ["geometries:"]
    for name, geom in CATALOG.items():
        mark = "*" if name in DEFAULT_CATALOG else " "
        lines.append(f" {mark} {name:<14} n={geom.n}  {geom.description}")
    lines.append("families:")
    for name, degrees in FAMILIES.items():
        lines.append(f"   {name:<14} degrees {list(degrees)}")
    lines.append("identities:")
    for ident in IDENTITIES.values():
        lines.append(f"   {ident.id:<19} tol {ident.tolerance:.0e}  "
                     f"[{', '.join(ident.families)}]  {ident.summary}")
    lines.append("(* = default catalog)")
    return "\n".join(lines)


def _report_path(arg: str | None) -> Path | None:
    if arg:
        return Path(arg)
    env = os.environ.get(REPORT_DIR_ENV)
    return Path(env) / "report.jsonl" if env else None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        print(_list())
        return 0
    try:
        config = load_config(
            args.config, geometries=args.geometry, identities=args.identity,
            families=args.family, seed=args.seed, seeds=args.seeds,
            sections=args.sections, points=args.points, tolerance=args.tolerance)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    def progress(report):
        if not args.quiet:
            shown = "-" if report.residual is None else f"{report.residual:.2e}"
            print(f"{report.status.upper():5} {report.case.case_id:<40} {shown}",
                  file=sys.stderr)

    reports = run_suite(config, on_report=progress)
    if not reports:
        print("config error: no cases selected", file=sys.stderr)
        return 2
    text = "\n".join(report_lines(reports)) + "\n"
    path = _report_path(args.report)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
