"""Command-line entry point: ``modface <command> [options]``.

Exit status is 0 when every check passes, 1 when some check fails and 2 on a
usage error.  ``--json`` prints the structured report; ``--out DIR`` writes it
to ``DIR/report.json`` together with the figures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .harness import RunConfig, UsageError, run

SEED_ENV = "MODFACE_SEED"


def _default_seed():
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=("R", "C", "H", "O"), default=None, help="division algebra (default R; O for verify-albert)")
    common.add_argument("--n", type=int, default=3, help="matrix size")
    common.add_argument("--trials", type=int, default=100, help="random trials per check")
    common.add_argument("--seed", type=int, default=None, help=f"root seed (default ${SEED_ENV} or 0)")
    common.add_argument("--tol", type=float, default=None, help="override the residual tolerance where one applies")
    common.add_argument("--workers", type=int, default=1, help="threads for independent trials")
    common.add_argument("--json", action="store_true", help="print the structured report instead of text")
    common.add_argument("--out", metavar="DIR", default=None, help="write report.json and figures here")

    parser = argparse.ArgumentParser(prog="modface", description="Seeded checks of face lattices of PSD cones and related constructions.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-cone", parents=[common], help="join/meet, modular law, radial decomposition and extension")
    lat = sub.add_parser("verify-lattice", parents=[common], help="face lattices of the named polytopes")
    lat.add_argument("--shape", default="all", help="corpus polytope name or 'all'")
    sub.add_parser("verify-albert", parents=[common], help="points and lines of the octonionic plane")
    r5p = sub.add_parser("r5", parents=[common], help="the five-dimensional body and its seven-point configuration")
    r5p.add_argument("action", nargs="?", choices=("report",), default="report")
    secp = sub.add_parser("sections", parents=[common], help="unbounded sections and their parallel classes")
    secp.add_argument("action", nargs="?", choices=("demo",), default="demo")
    allp = sub.add_parser("all", parents=[common], help="every suite")
    allp.add_argument("--shape", default="all", help=argparse.SUPPRESS)
    return parser


def config_from_args(args) -> RunConfig:
    field = args.field or ("O" if args.command == "verify-albert" else "R")
    seed = args.seed if args.seed is not None else _default_seed()
    return RunConfig(
        command=args.command,
        field=field,
        n=args.n,
        trials=args.trials,
        seed=seed,
        tol=args.tol,
        shape=getattr(args, "shape", "all"),
        workers=max(1, args.workers),
    ).validate()


def render_text(result):
    lines = []
    for r in result.reports:
        lines.append(r.line())
        if r.witness is not None:
            lines.append(f"      witness: {json.dumps(r.witness)}")
    doc = result.to_dict()
    if "fidelity" in doc:
        lines.append("")
        lines.append("combined matrix, entrywise (derived vs displayed):")
        for row in doc["fidelity"]:
            mark = "ok" if row["match"] else f"DIFF {row['difference']}"
            lines.append(f"  {row['entry']}: {row['derived']}  [{mark}]")
    if "reverse_branch" in doc:
        rb = doc["reverse_branch"]
        lines.append(
            f"linear-branch planes: {rb['planes']} sampled, {rb['meet_all_base_spans']} meet all base spans, "
            f"{rb['fail_sampled_spans']} fail the sampled span check"
        )
    if "axioms" in doc:
        ax = doc["axioms"]
        lines.append("")
        lines.append(f"recession rays sampled: {len(doc['recession_rays'])}")
        lines.append(
            f"axioms: {ax['pairs_on_common_line']}/{ax['pairs']} point pairs on a line, "
            f"{ax['unique_parallels']}/{ax['parallels']} unique parallels, {ax['same_direction']} sharing the ray"
        )
    failed = sum(not r.passed for r in result.reports)
    lines.append("")
    lines.append(f"{len(result.reports) - failed}/{len(result.reports)} checks passed")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
    except UsageError as err:
        print(f"modface: error: {err}", file=sys.stderr)
        return 2
    result = run(cfg)
    print(result.to_json() if args.json else render_text(result))
    if args.out:
        from .plotting import write_figures

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(result.to_json() + "\n")
        for path in write_figures(result, out):
            print(f"wrote {path}", file=sys.stderr)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
