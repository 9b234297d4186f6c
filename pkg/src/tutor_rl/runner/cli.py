"""Command-line interface: train / matrix / report / plot-data / stub-llm."""

from __future__ import annotations

import argparse
import os
import sys

from .config import ExperimentConfig, ParseError, ValidationError, load_config


def _add_out(parser):
    parser.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutor-rl",
        description="Train tutor-gated RL agents and report convergence results.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run a single experiment cell")
    p_train.add_argument("--config", required=True, help="INI file with [experiment]")
    p_train.add_argument("--seed", type=int, default=None,
                         help="train only this seed instead of the configured list")
    _add_out(p_train)

    p_matrix = sub.add_parser("matrix", help="run a grid of experiment cells")
    p_matrix.add_argument("--config", required=True,
                          help="INI file with [matrix] and/or [cell.*]")
    p_matrix.add_argument("--parallel", type=int, default=1, metavar="K",
                          help="cells to run concurrently")
    p_matrix.add_argument("--resume", action="store_true",
                          help="skip runs whose record.json already exists")
    _add_out(p_matrix)

    p_report = sub.add_parser("report", help="print result tables and render figures")
    p_report.add_argument("--sizes", default="",
                          help="tutor sizes for the correlation, e.g. "
                               "'llama3.1=8,vicuna=13,deepseek-r1:14b=14'")
    p_report.add_argument("--no-figures", action="store_true")
    _add_out(p_report)

    p_plot = sub.add_parser("plot-data", help="re-emit per-run CSVs and figures")
    p_plot.add_argument("--window", type=int, default=7,
                        help="odd moving-average window for smoothed columns")
    _add_out(p_plot)

    p_stub = sub.add_parser("stub-llm", help="serve canned tutor responses over HTTP")
    p_stub.add_argument("--port", type=int, default=11435)
    p_stub.add_argument("--mode", choices=("canned", "flaky", "malformed"),
                        default="canned")
    p_stub.add_argument("--action", type=int, default=0)
    p_stub.add_argument("--latency", type=float, default=0.0)
    return parser


def _parse_sizes(raw: str) -> dict[str, float]:
    sizes = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.rpartition("=")
        try:
            sizes[name] = float(value)
        except ValueError:
            raise ValidationError(f"--sizes: {part!r} is not name=number") from None
    return sizes


def cmd_train(args) -> int:
    from .matrix import run_matrix

    config = load_config(args.config)
    if not isinstance(config, ExperimentConfig):
        print("train expects a single-cell config ([experiment] section); "
              "use the matrix command for grids", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seeds = [args.seed]
    records = run_matrix([config], parallelism=1, out_dir=args.out)
    print(f"{len(records)} run(s) finished; summary at "
          f"{os.path.join(args.out, 'summary.csv')}")
    return 0


def cmd_matrix(args) -> int:
    from .matrix import run_matrix

    configs = load_config(args.config)
    if isinstance(configs, ExperimentConfig):
        configs = [configs]
    print(f"matrix: {len(configs)} cell(s), "
          f"{sum(len(c.seeds) for c in configs)} run(s)")
    records = run_matrix(configs, parallelism=args.parallel, out_dir=args.out,
                         resume=args.resume)
    print(f"{len(records)} run(s) in summary at "
          f"{os.path.join(args.out, 'summary.csv')}")
    return 0


def cmd_report(args) -> int:
    from .figures import render_learning_curves
    from .matrix import load_records
    from .report import format_report

    summary_path = os.path.join(args.out, "summary.csv")
    print(format_report(summary_path, _parse_sizes(args.sizes)))
    if not args.no_figures:
        paths = render_learning_curves(load_records(args.out),
                                       os.path.join(args.out, "figures"))
        for path in paths:
            print(f"figure: {path}")
    return 0


def cmd_plot_data(args) -> int:
    from .. import metrics
    from .figures import render_learning_curves
    from ..records import RunRecord

    runs_dir = os.path.join(args.out, "runs")
    if not os.path.isdir(runs_dir):
        print(f"no run records under {runs_dir}", file=sys.stderr)
        return 2
    records = []
    for entry in sorted(os.listdir(runs_dir)):
        record_path = os.path.join(runs_dir, entry, "record.json")
        if not os.path.exists(record_path):
            continue
        record = RunRecord.load(record_path)
        records.append(record)
        metrics.write_run_csv(
            os.path.join(runs_dir, entry, "run.csv"),
            metrics.PerformanceCurve(record.episode_returns, run_id=entry),
            window=args.window)
    paths = render_learning_curves(records, os.path.join(args.out, "figures"),
                                   window=args.window)
    for path in paths:
        print(f"figure: {path}")
    print(f"refreshed plot data for {len(records)} run(s)")
    return 0


def cmd_stub_llm(args) -> int:
    from .stub_llm import serve_forever

    serve_forever(args.port, args.mode, args.action, args.latency)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "matrix": cmd_matrix,
        "report": cmd_report,
        "plot-data": cmd_plot_data,
        "stub-llm": cmd_stub_llm,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
