"""Command line interface.

Subcommands: ``run`` a config sweep, ``plot`` a results CSV, ``align`` two
graphs, ``maxcut`` the exact oracle, ``sparsify`` a graph to an edge list.
"""

from __future__ import annotations

import argparse
import sys

from .alignment import aligned_levels
from .experiment import load_config, plan_summary, run_experiment
from .graphs import brute_force_maxcut, format_edge_list, read_graph_file
from .plotting import STYLES, emit_plots, read_rows
from .sparsify import METHODS, SparsifyConfig, sparsify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparseqaoa")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, help="override the config root seed")
    run_p.add_argument("--out-dir", help="override the config output directory")
    run_p.add_argument("--jobs", type=int, default=1, help="worker processes")
    run_p.add_argument("--dry-run", action="store_true", help="validate and print the sweep")

    plot_p = sub.add_parser("plot", help="render SVG plots from a results CSV")
    plot_p.add_argument("csv")
    plot_p.add_argument("--style", choices=STYLES, required=True)
    plot_p.add_argument("--out-dir", default=".")

    align_p = sub.add_parser("align", help="aligned energy levels of two graphs")
    align_p.add_argument("graph_a")
    align_p.add_argument("graph_b")
    align_p.add_argument("--per-level", action="store_true", help="print per-level detail")

    maxcut_p = sub.add_parser("maxcut", help="exact MaxCut by enumeration")
    maxcut_p.add_argument("graph")

    sparsify_p = sub.add_parser("sparsify", help="sparsify a graph, print the edge list")
    sparsify_p.add_argument("graph")
    sparsify_p.add_argument("--method", choices=METHODS, required=True)
    sparsify_p.add_argument("--ratio", type=float, required=True)
    sparsify_p.add_argument("--seed", type=int, default=0)
    sparsify_p.add_argument("--out", help="write to a file instead of stdout")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out_dir is not None:
        config.out_dir = args.out_dir
    if args.dry_run:
        for line in plan_summary(config):
            print(line)
        return 0
    result = run_experiment(config, jobs=args.jobs)
    print(f"wrote {len(result.rows)} rows to {result.csv_path}")
    for path in result.plot_paths:
        print(f"wrote {path}")
    if result.errors:
        print(f"{len(result.errors)} row(s) failed; see {result.manifest_path}", file=sys.stderr)
        return 1
    return 0


def _cmd_plot(args) -> int:
    paths = emit_plots(read_rows(args.csv), args.style, args.out_dir)
    for path in paths:
        print(f"wrote {path}")
    return 0 if paths else 1


def _cmd_align(args) -> int:
    report = aligned_levels(read_graph_file(args.graph_a), read_graph_file(args.graph_b))
    print(f"aligned_levels: {report.aligned_levels}")
    print(f"ground_state_aligned: {report.ground_state_aligned}")
    if args.per_level:
        for d in report.details:
            print(f"level {d.k}: |left|={d.size_left} |right|={d.size_right} {d.containment}")
    return 0


def _cmd_maxcut(args) -> int:
    g = read_graph_file(args.graph)
    c_max, optima = brute_force_maxcut(g)
    reps = sorted(s.assignment for s in optima)
    print(f"c_max: {c_max}")
    print(f"optima (vertex 0 fixed to side 0): {len(reps)}")
    print(f"lexicographically smallest: {reps[0]}")
    return 0


def _cmd_sparsify(args) -> int:
    g = read_graph_file(args.graph)
    config = SparsifyConfig(method=args.method, target_ratio=args.ratio, seed=args.seed)
    text = format_edge_list(sparsify(g, config))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "plot": _cmd_plot,
    "align": _cmd_align,
    "maxcut": _cmd_maxcut,
    "sparsify": _cmd_sparsify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
