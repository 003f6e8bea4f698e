"""Command-line entry point.

    threadmetrics report --posts RS.ndjson --comments RC.ndjson --out report/
    threadmetrics synth --spec corpus.txt --out corpus/

Exit codes: 0 success, 2 when some report section failed, 1 on fatal input errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .classifiers import ClassifierConfig, SuccessMode
from .ingest import Period
from .pipeline import EDGE_MODES, SECTIONS, AnalysisConfig, InputError, run_analysis
from .synth import SpecError, generate_corpus, read_spec_file

SUBCOMMAND_SECTIONS = {
    "ingest-stats": ("ingest",),
    "distributions": ("distributions",),
    "lifetimes": ("lifetimes",),
    "cyborg": ("cyborg",),
    "evolution": ("evolution",),
    "limelight": ("limelight",),
    "authors": ("authors",),
    "report": SECTIONS,
}


def _analysis_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("input")
    g.add_argument("--posts", nargs="+", type=Path, required=True, metavar="PATH")
    g.add_argument("--comments", nargs="+", type=Path, default=[], metavar="PATH")
    g.add_argument("--period-start", type=_epoch, default=None, metavar="EPOCH")
    g.add_argument("--period-end", type=_epoch, default=None, metavar="EPOCH")
    g.add_argument("--keep-id-prefixes", action="store_true",
                   help="compare ids verbatim instead of stripping t1_/t3_ prefixes")

    g = p.add_argument_group("output")
    g.add_argument("--out", type=Path, required=True, metavar="DIR")
    g.add_argument("--format", choices=("csv", "ndjson"), default="csv")
    g.add_argument("--emit-post-metrics", type=Path, metavar="PATH")
    g.add_argument("--emit-author-metrics", type=Path, metavar="PATH")
    g.add_argument("--emit-limelight", type=Path, metavar="PATH")

    g = p.add_argument_group("execution")
    g.add_argument("--threads", type=int, default=1, metavar="N")
    g.add_argument("--partitions", type=int, default=32, metavar="K")
    g.add_argument("--work-dir", type=Path, metavar="DIR", help="where partition spill files go")

    d = ClassifierConfig()
    g = p.add_argument_group("thresholds")
    g.add_argument("--mayfly-threshold", type=float, default=d.mayfly_threshold_s, metavar="S")
    g.add_argument("--cyborg-latency", type=float, default=d.cyborg_latency_s, metavar="S")
    g.add_argument("--cyborg-latency-exclusive", action="store_true",
                   help="treat the latency bound as strict (<) instead of <=")
    g.add_argument("--cyborg-min-chars", type=int, default=d.cyborg_min_chars, metavar="N")
    g.add_argument("--bloomer-fraction", type=float, default=d.bloomer_fraction)
    g.add_argument("--early-cutoff", type=float, default=d.early_cutoff_s, metavar="S")
    g.add_argument("--late-cutoff", type=float, default=d.late_cutoff_s, metavar="S")
    g.add_argument("--popular-min-comments", type=int, default=d.popular_min_comments, metavar="N",
                   help="evolution classes need strictly more comments than this")
    g.add_argument("--limelight-min-comments", type=int, default=500, metavar="N",
                   help="limelight analysis set: posts with at least this many comments")
    g.add_argument("--success-mode", choices=[m.value for m in SuccessMode], default=d.success_mode.value)
    g.add_argument("--exclude-author", action="append", default=[], metavar="NAME",
                   help="leave an account (e.g. AutoModerator) out of author distributions")
    g.add_argument("--edge-target", choices=EDGE_MODES, default="post-author",
                   help="degree edges point at the post author or at the replied-to comment's author")
    g.add_argument("--discrete-fit", action="store_true",
                   help="use the discrete (xmin - 1/2) power-law estimator")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threadmetrics", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _analysis_flags()
    for name in SUBCOMMAND_SECTIONS:
        sp = sub.add_parser(name, parents=[shared], help=f"{name} section" if name != "report" else "all sections")
        if name == "report":
            sp.add_argument("--sections", nargs="+", choices=SECTIONS, default=list(SECTIONS))
    sp = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    sp.add_argument("--spec", type=Path, required=True, metavar="FILE")
    sp.add_argument("--out", type=Path, required=True, metavar="DIR")
    sp.add_argument("--seed", type=int, default=None, metavar="N", help="override the spec's seed")
    return parser


def _epoch(text: str):
    value = float(text)
    return int(value) if value.is_integer() else value


def _config(args) -> AnalysisConfig:
    start = args.period_start if args.period_start is not None else 0
    end = args.period_end if args.period_end is not None else float("inf")
    classifier = ClassifierConfig(
        mayfly_threshold_s=args.mayfly_threshold,
        cyborg_latency_s=args.cyborg_latency,
        cyborg_latency_inclusive=not args.cyborg_latency_exclusive,
        cyborg_min_chars=args.cyborg_min_chars,
        bloomer_fraction=args.bloomer_fraction,
        early_cutoff_s=args.early_cutoff,
        late_cutoff_s=args.late_cutoff,
        popular_min_comments=args.popular_min_comments,
        success_mode=args.success_mode,
    )
    sections = tuple(args.sections) if args.command == "report" else SUBCOMMAND_SECTIONS[args.command]
    return AnalysisConfig(
        posts=args.posts,
        comments=args.comments,
        out_dir=args.out,
        period=Period(start, end),
        classifier=classifier,
        fmt=args.format,
        threads=args.threads,
        partitions=args.partitions,
        sections=sections,
        strip_prefixes=not args.keep_id_prefixes,
        limelight_min_comments=args.limelight_min_comments,
        exclude_authors=tuple(args.exclude_author),
        discrete_fit=args.discrete_fit,
        emit_post_metrics=args.emit_post_metrics,
        emit_author_metrics=args.emit_author_metrics,
        emit_limelight=args.emit_limelight,
        work_dir=args.work_dir,
        edge_target=args.edge_target,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if args.command == "synth":
        try:
            spec = read_spec_file(args.spec)
            if args.seed is not None:
                spec.seed = args.seed
            files = generate_corpus(spec, args.out)
        except (OSError, SpecError) as exc:
            print(f"threadmetrics: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {files.posts}, {files.comments}, {files.ground_truth}")
        return 0
    try:
        config = _config(args)
        result = run_analysis(config)
    except (InputError, ValueError, OSError) as exc:
        print(f"threadmetrics: {exc}", file=sys.stderr)
        return 1
    for name, entry in result.manifest["sections"].items():
        if entry["status"] != "ok":
            print(f"threadmetrics: section {name} failed: {entry['error']}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
