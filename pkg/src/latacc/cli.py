"""Command-line interface: ``latacc crosstab|elicit|fit|oracle|report``.

Errors are reported as one JSON line on stderr,
``{"error": "<kind>", "message": "..."}``, with exit status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import diagnose
from .errors import ConfigError, LataccError
from .io import crosstab, load_config, read_chains_csv, seed_from_env, write_chains_csv
from .model import CrossTab, PREVALENCE_NAMES, RATE_NAMES
from .oracle import grid_posterior_means
from .posterior import METRIC_NAMES, summarize
from .priors import elicit_beta


def _emit_error(kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": " ".join(str(message).split())}), file=sys.stderr)
    return 1


def cmd_crosstab(args) -> int:
    tab = crosstab(args.file_a, args.file_b)
    if args.json:
        print(json.dumps({"y1": tab.y1, "y2": tab.y2, "y3": tab.y3, "y4": tab.y4, "n": tab.n}))
    else:
        print(f"{tab.y1} {tab.y2} {tab.y3} {tab.y4}")
    return 0


def cmd_elicit(args) -> int:
    params = elicit_beta(args.mode, args.threshold, args.tail_mass)
    print(f"a={params.a:.6g} b={params.b:.6g}")
    return 0


def _tabs_from_args(args) -> list[CrossTab]:
    tabs = [CrossTab(*t) for t in args.tab or []]
    for file_a, file_b in args.predictions or []:
        tabs.append(crosstab(file_a, file_b))
    return tabs


def _resolve_config(args):
    config = load_config(args.config)
    seed = args.seed if args.seed is not None else seed_from_env()
    if seed is not None:
        config = config.with_seed(seed)
    return config


def cmd_fit(args) -> int:
    from .fitting import fit

    config = _resolve_config(args)
    result = fit(config, _tabs_from_args(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_chains_csv(result.chains, out / "chains.csv")
    (out / "report.json").write_text(json.dumps(result.report, indent=2) + "\n", encoding="utf-8")
    print(result.parameter_summary.table())
    print()
    print(result.metric_summary.table())
    for w in result.report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    config = _resolve_config(args)
    tabs = _tabs_from_args(args) or config.tabs
    if not tabs:
        raise ConfigError("no data: give cross-tabs or prediction files")
    means = grid_posterior_means(config.variant, tabs, config.priors, args.points,
                                 constrained=not args.unconstrained)
    print(json.dumps(means, indent=2))
    return 0


def cmd_report(args) -> int:
    chains = read_chains_csv(args.chains)
    params = [n for n in (*RATE_NAMES, *PREVALENCE_NAMES) if n in chains.names]
    metrics = [n for n in METRIC_NAMES if n in chains.names]
    param_summary = summarize(chains, params)
    metric_summary = summarize(chains, metrics) if metrics else None
    diag = diagnose(chains, params)
    if args.format == "json":
        payload = {
            "parameter_summary": param_summary.to_dict(),
            "metric_summary": metric_summary.to_dict() if metric_summary else {},
            "diagnostics": diag.to_dict(),
        }
        print(json.dumps(payload, indent=2))
    elif args.format == "csv":
        print(param_summary.to_csv(), end="")
        if metric_summary:
            print(metric_summary.to_csv().split("\n", 1)[1], end="")
    else:
        print(param_summary.table())
        if metric_summary:
            print()
            print(metric_summary.table())
    for w in diag.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _add_data_args(p):
    p.add_argument("config", help="JSON fit configuration")
    p.add_argument("--seed", type=int, help="overrides the config and $LATACC_SEED")
    p.add_argument("--tab", nargs=4, type=int, action="append", metavar=("Y1", "Y2", "Y3", "Y4"),
                   help="cross-tab counts (repeat once per dataset)")
    p.add_argument("--predictions", nargs=2, action="append", metavar=("FILE_A", "FILE_B"),
                   help="prediction files for classifiers A and B (repeat once per dataset)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latacc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crosstab", help="cross-tabulate two prediction files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_crosstab)

    p = sub.add_parser("elicit", help="Beta(a, b) from a mode and a tail statement")
    p.add_argument("--mode", type=float, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--tail-mass", type=float, required=True, help="probability of exceeding the threshold")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("fit", help="run the Gibbs sampler and write chains.csv and report.json")
    _add_data_args(p)
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle", help="posterior means by grid integration")
    _add_data_args(p)
    p.add_argument("--points", type=int, default=None, help="grid points per dimension")
    p.add_argument("--unconstrained", action="store_true", help="keep mass where Se + Sp <= 1")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="re-summarize an existing chain CSV")
    p.add_argument("chains")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LataccError as exc:
        return _emit_error(exc.kind, str(exc))
    except (ValueError, IndexError) as exc:
        return _emit_error("invalid_input", str(exc))


if __name__ == "__main__":
    sys.exit(main())
