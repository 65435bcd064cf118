"""Batch command line: run an engine over annotated documents and report.

Usage::

    slistref [--algo {slist,bfp,bfp-kameyama}] [--max-slist-len N]
             [--trace] [--report {text,structured}]
             [--tie-break {salience,recency}] [--ambig-mode {lenient,strict}]
             [--figures DIR] input [input ...]

Exit status is 0 when every input parsed and every run completed (wrong
resolutions are data, not failures), 1 when any input failed with a
per-file diagnostic on stderr, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .centering import run_bfp, split_utterances_bfp
from .document import DocumentError, derive_segments, load_document_file
from .evaluate import classify_errors, score
from .kameyama import split_utterances_kameyama
from .report import (DocumentResult, format_centering_trace,
                     format_slist_trace, render_figure, structured_report,
                     text_report, write_delimited)
from .slist import run_slist

log = logging.getLogger(__name__)

_SPLITTERS = {
    "bfp": split_utterances_bfp,
    "bfp-kameyama": split_utterances_kameyama,
}


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slistref",
        description="Resolve pronouns in annotated documents with an "
                    "incremental salience list or a centering baseline and "
                    "score the result against gold chains.")
    parser.add_argument("inputs", nargs="+", metavar="input",
                        help="annotated document file (JSON)")
    parser.add_argument("--algo", choices=("slist", "bfp", "bfp-kameyama"),
                        default="slist", help="resolution engine")
    parser.add_argument("--max-slist-len", type=_positive_int, default=5,
                        metavar="N", help="salience list length cap")
    parser.add_argument("--trace", action="store_true",
                        help="emit the per-step engine trace")
    parser.add_argument("--report", choices=("text", "structured"),
                        default="text", help="report format")
    parser.add_argument("--tie-break", choices=("salience", "recency"),
                        default="salience",
                        help="how centering picks among tied readings")
    parser.add_argument("--ambig-mode", choices=("lenient", "strict"),
                        default="lenient",
                        help="whether flagged ties that picked gold still "
                             "count as wrong (ambiguous)")
    parser.add_argument("--figures", metavar="DIR",
                        help="also write scores.tsv and scores.png to DIR")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    return parser


def process_document(path, args) -> DocumentResult:
    doc = load_document_file(path)
    if not doc.tokens and not doc.markables:
        log.warning("%s: document is empty (no tokens or markables); "
                    "it still counts toward the document total", path)
    segments = derive_segments(doc)
    if args.algo == "slist":
        def runner(forced=None):
            return run_slist(doc, segments=segments,
                             max_len=args.max_slist_len, forced=forced)
    else:
        splitter = _SPLITTERS[args.algo]

        def runner(forced=None):
            return run_bfp(doc, splitter=splitter, segments=segments,
                           tie_break=args.tie_break, forced=forced)

    run = runner()
    categories = classify_errors(
        run.records, doc, rerun=lambda forced: runner(forced).records,
        segments=segments)
    table = score(run.records, doc, categories=categories,
                  ambig_mode=args.ambig_mode)
    return DocumentResult(
        doc_id=doc.doc_id,
        group=doc.group,
        algorithm=args.algo,
        table=table,
        records=run.records,
        categories=categories,
        trace=run.trace_dicts() if args.trace else [],
        diagnostics=getattr(run, "diagnostics", []),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="%(name)s: %(message)s")

    results: list[DocumentResult] = []
    failures = 0
    for path in args.inputs:
        try:
            results.append(process_document(path, args))
        except (DocumentError, OSError) as exc:
            failures += 1
            # load_document_file and OSError both put the path in the message
            print(f"slistref: {exc}", file=sys.stderr)

    config = {
        "algo": args.algo,
        "max_slist_len": args.max_slist_len,
        "tie_break": args.tie_break,
        "ambig_mode": args.ambig_mode,
        "trace": args.trace,
    }
    if args.report == "structured":
        print(structured_report(results, config, __version__))
    else:
        if args.trace:
            for r in results:
                print(f"== {r.doc_id} ({args.algo}) ==")
                formatter = (format_slist_trace if args.algo == "slist"
                             else format_centering_trace)
                print(formatter(r.trace))
                print()
        print(text_report(results), end="")

    if args.figures and results:
        outdir = Path(args.figures)
        outdir.mkdir(parents=True, exist_ok=True)
        write_delimited(outdir / "scores.tsv", results)
        render_figure(outdir / "scores.png", results)
        log.info("wrote %s and %s", outdir / "scores.tsv", outdir / "scores.png")

    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
