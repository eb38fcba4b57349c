"""Command line entry point: ``treemsa align`` and ``treemsa evaluate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .pipeline import RunConfig, run_align, run_evaluate
from .scoring import DEFAULT_GAP_EXTEND, DEFAULT_GAP_OPEN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treemsa", description=__doc__)
    parser.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align an unaligned FASTA file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--alphabet", choices=["nt", "aa", "auto"], default="auto")
    p.add_argument("--gap-open", type=int, default=DEFAULT_GAP_OPEN)
    p.add_argument("--gap-extend", type=int, default=DEFAULT_GAP_EXTEND)
    p.add_argument("--gap-mode", choices=["flat", "affine"], default="affine")
    p.add_argument("--matrix", help="square substitution matrix file (header row of symbols)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int, default=0, help="0 = all cores")
    p.add_argument("--order", choices=["tree", "input"], default="tree")
    p.add_argument("--dump-tree", metavar="PATH", help="write the guide tree as NDJSON")
    p.add_argument("--dedup-map", metavar="PATH", help="write representative/duplicate ids as TSV")

    p = sub.add_parser("evaluate", help="quality metrics for an alignment")
    p.add_argument("--aligned", required=True)
    p.add_argument("--raw", required=True)
    p.add_argument("--report", required=True, help="JSON report path; CSV and PNG are written alongside")
    p.add_argument("--alphabet", choices=["nt", "aa", "auto"], default="auto")
    p.add_argument("--sample-size", type=int, default=10_000)
    p.add_argument("--pair-budget", type=int, default=100_000, help="0 = all pairs of the subsample")
    p.add_argument("--all-pairs", action="store_true", help="same as --pair-budget 0")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--time-s", type=float, help="alignment wall time to record in the report")
    p.add_argument("--no-figures", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "align":
            config = RunConfig(
                alphabet=args.alphabet,
                gap_open=args.gap_open,
                gap_extend=args.gap_extend,
                gap_mode=args.gap_mode,
                matrix=args.matrix,
                seed=args.seed,
                threads=args.threads,
                order=args.order,
                dump_tree=args.dump_tree,
                dedup_map=args.dedup_map,
            )
            summary = run_align(config, args.input, args.output)
            print(json.dumps(summary))
        else:
            config = RunConfig(
                alphabet=args.alphabet,
                seed=args.seed,
                sample_size=args.sample_size,
                pair_budget=None if args.all_pairs else args.pair_budget,
                figures=not args.no_figures,
                time_s=args.time_s,
            )
            report = run_evaluate(config, args.aligned, args.raw, args.report)
            print(report.to_json())
    except Exception as exc:  # one-line error, nonzero exit
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"treemsa: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
