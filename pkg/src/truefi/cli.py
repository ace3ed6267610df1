"""Command-line interface: ``truefi {mine,tfi,enlarge,evaluate}``.

Exit codes: 0 success, 2 bad parameters or input, 3 infeasible threshold,
4 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .baselines import bonferroni_method, holdout_method
from .dataset import enlarge, random_split, read_fimi, serialize_fimi, write_fimi
from .errors import InfeasibleThresholdError, ParameterError, ResourceLimitError
from .fim import mine_frequent
from .harness import ExperimentConfig, format_summary, rows_to_csv, run_experiment, summarize, write_outputs
from .tfi import TfiConfig, method1, method2

EXIT_OK, EXIT_PARAM, EXIT_INFEASIBLE, EXIT_RESOURCE = 0, 2, 3, 4


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_mine(args) -> int:
    ds = read_fimi(args.dataset)
    fi = mine_frequent(ds, args.theta, args.max_itemsets)
    _emit(fi.to_text(), args.output)
    return EXIT_OK


def cmd_tfi(args) -> int:
    ds = read_fimi(args.dataset)
    config = TfiConfig(c=args.c, max_candidates=args.max_candidates,
                       max_itemsets=args.max_itemsets, sukp_early_exit=not args.exact_sukp)
    method = {"1": "method1", "2": "method2"}.get(args.method, args.method)
    if method in ("method1", "holdout"):
        ds_e, ds_v = random_split(ds, args.split_fraction, args.seed)
    if method == "method1":
        report = method1(ds_e, ds_v, args.theta, args.delta, config).to_dict()
    elif method == "method2":
        report = method2(ds, args.theta, args.delta, config).to_dict()
    else:
        if method == "bonferroni":
            out = bonferroni_method(ds, args.theta, args.delta, max_itemsets=args.max_itemsets)
        else:
            out = holdout_method(ds_e, ds_v, args.theta, args.delta, args.max_itemsets)
        report = {"method": method, "theta": args.theta, "delta": args.delta,
                  "output": out.to_records()}
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=1)
    text = "".join(
        f"{' '.join(map(str, rec['itemset']))}\t{rec['frequency']:.6f}\n" for rec in report["output"]
    )
    _emit(text, args.output)
    return EXIT_OK


def cmd_enlarge(args) -> int:
    ds = read_fimi(args.dataset)
    big = enlarge(ds, args.target_n, args.seed)
    if args.output:
        write_fimi(big, args.output)
    else:
        sys.stdout.write(serialize_fimi(big))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.output:
        cfg = replace(cfg, output_csv=args.output)
    if args.workers:
        cfg = replace(cfg, workers=args.workers)
    rows = run_experiment(cfg)
    write_outputs(cfg, rows)
    if not cfg.output_csv:
        sys.stdout.write(rows_to_csv(rows))
    if args.summary:
        print(format_summary(summarize(rows)), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truefi", description="True frequent itemset extraction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="frequent itemsets of a FIMI dataset")
    p.add_argument("dataset")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--output", "-o")
    p.add_argument("--max-itemsets", type=int, default=None)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("tfi", help="true frequent itemsets with FWER control")
    p.add_argument("dataset")
    p.add_argument("--method", choices=["1", "2", "method1", "method2", "bonferroni", "holdout"],
                   default="2")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--split-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=float, default=0.5, help="constant of the VC sample bound")
    p.add_argument("--max-candidates", type=int, default=200_000)
    p.add_argument("--max-itemsets", type=int, default=5_000_000)
    p.add_argument("--exact-sukp", action="store_true",
                   help="solve every knapsack to optimality instead of stopping early")
    p.add_argument("--report", help="write the full JSON report here")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tfi)

    p = sub.add_parser("enlarge", help="resample a dataset to a target size")
    p.add_argument("dataset")
    p.add_argument("--target-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_enlarge)

    p = sub.add_parser("evaluate", help="repeated-trial FWER and power evaluation")
    p.add_argument("--config", required=True)
    p.add_argument("--output", "-o", help="rows CSV (overrides output_csv)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--summary", action="store_true", help="print a summary table to stderr")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleThresholdError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
