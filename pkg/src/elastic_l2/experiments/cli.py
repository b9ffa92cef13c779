"""Command-line entry point: ``elastic-l2 run|list-experiments|fit|config``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .config import (
    DESCRIPTIONS,
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    HypothesisError,
    default_config,
    load_config,
)
from .fitting import MODELS, fit_growth
from .runner import run_experiment, write_report


def _resolve(target: str) -> dict:
    if target.upper() in EXPERIMENTS and not Path(target).exists():
        return default_config(target.upper())
    return load_config(target)


def _cmd_run(args) -> int:
    raw = _resolve(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.from_dict(raw)
    start = time.perf_counter()
    report = run_experiment(cfg, threads=args.threads)
    stem = raw.get("output", {}).get("stem")
    jpath, cpath = write_report(report, cfg.output_dir(args.out), stem)
    for c in report.checks:
        tag = "info" if c.informational else ("ok" if c.passed else "FAIL")
        print(f"  [{tag:>4}] {c.name}: value={c.value!r} target={c.target!r} tol={c.tolerance!r}")
    print(report.summary_line())
    print(f"wrote {jpath} and {cpath} ({time.perf_counter() - start:.1f} s)", file=sys.stderr)
    return 0 if report.verdict else 1


def _cmd_list(args) -> int:
    for exp in EXPERIMENTS:
        print(f"{exp}  {DESCRIPTIONS[exp]}")
    return 0


def _cmd_config(args) -> int:
    print(json.dumps(default_config(args.experiment.upper()), indent=2, sort_keys=True))
    return 0


def _read_columns(path: str, column: str | None):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], []
    for row in rows[1:]:
        if not row:
            break  # trailing fit table
        body.append(row)
    if "t" not in header:
        raise ConfigError(f"{path}: no 't' column")
    col = column or next(h for h in header if h != "t")
    if col not in header:
        raise ConfigError(f"{path}: no column {col!r}; have {header}")
    ti, ci = header.index("t"), header.index(col)
    return col, [float(r[ti]) for r in body], [float(r[ci]) for r in body]


def _cmd_fit(args) -> int:
    col, t, v = _read_columns(args.csv, args.column)
    window = tuple(args.window) if args.window else None
    fit = fit_growth(t, v, args.model, window)
    print(json.dumps({"column": col, **fit.to_dict()}, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastic-l2", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config or an experiment ID")
    run.add_argument("config", help="path to a config file, or E1..E8 for the built-in default")
    run.add_argument("--out", help="output directory (default: config output.dir or ./reports)")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.set_defaults(func=_cmd_run)

    ls = sub.add_parser("list-experiments", help="list experiment IDs")
    ls.set_defaults(func=_cmd_list)

    cf = sub.add_parser("config", help="print the default config of an experiment")
    cf.add_argument("experiment", choices=[*EXPERIMENTS, *(e.lower() for e in EXPERIMENTS)])
    cf.set_defaults(func=_cmd_config)

    fit = sub.add_parser("fit", help="fit a growth law to a CSV column")
    fit.add_argument("csv")
    fit.add_argument("--model", required=True, choices=["const", *MODELS])
    fit.add_argument("--column", default=None, help="column to fit (default: first after 't')")
    fit.add_argument("--window", nargs=2, type=float, metavar=("T_MIN", "T_MAX"))
    fit.set_defaults(func=_cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, HypothesisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
