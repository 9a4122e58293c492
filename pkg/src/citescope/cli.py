"""Command-line entry point: analyze, validate, and synth subcommands.

Exit codes: 0 success, 1 fatal input error, 2 empty analysis, 64 usage error.
Output files are staged in a temporary directory and renamed into place only
after every write succeeded, so a fatal error never leaves partial output.
The CITESCOPE_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
import tempfile

from . import __version__
from .errors import CitescopeError, EmptyAnalysisError, ScenarioError
from .model import (
    Finding,
    LoadStats,
    document_from_json,
    iter_corpus_lines,
    load_targets,
    validate_document,
)
from .pipeline import RunConfig, run_analysis
from .report import CSV_FILES, emit_csv, emit_json
from .synth import SyntheticCorpus, load_scenario, write_corpus

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_EMPTY = 2
EXIT_USAGE = 64

log = logging.getLogger("citescope")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="citescope",
        description=(
            "Citation context analysis: parse in-text citations from a corpus of "
            "citing documents and report per-year citation locations, mention and "
            "citation types, sentence sentiment, and citing-cited relatedness."
        ),
    )
    parser.add_argument("--version", action="version", version=f"citescope {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser(
        "analyze", help="run the full analysis and write CSV/JSON reports"
    )
    analyze.add_argument("--corpus", required=True, help="line-delimited corpus file")
    analyze.add_argument("--targets", required=True, help="line-delimited target file")
    analyze.add_argument("--lexicon", required=True, help="sentiment lexicon file")
    analyze.add_argument(
        "--embeddings",
        default="test",
        help="embedding provider: test | file:PATH | url:URL (default: test)",
    )
    analyze.add_argument(
        "--group-by",
        choices=("year", "age"),
        default="year",
        help="group rows by citing year or by citation age (default: year)",
    )
    analyze.add_argument("--out", required=True, help="output directory for report files")
    analyze.add_argument(
        "--exclude-target-from-coupling",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="drop the cited target's own id from the citing paper's coupling set",
    )
    analyze.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="parallel workers; results are identical for any value",
    )
    analyze.add_argument(
        "--min-group-size",
        type=int,
        default=1,
        help="suppress groups with fewer records than this (default 1: keep all)",
    )

    validate = commands.add_parser("validate", help="check corpus and target files")
    validate.add_argument("--corpus", required=True)
    validate.add_argument("--targets", required=False)

    synth = commands.add_parser(
        "synth", help="generate a synthetic corpus with recorded ground truth"
    )
    synth.add_argument("--scenario", required=True, help="scenario JSON file")
    synth.add_argument("--seed", type=int, default=42)
    synth.add_argument("--out", required=True, help="output directory")
    return parser


def cmd_analyze(args: argparse.Namespace) -> int:
    config = RunConfig(
        corpus=args.corpus,
        targets=args.targets,
        lexicon=args.lexicon,
        embeddings=args.embeddings,
        group_by=args.group_by,
        out_dir=args.out,
        exclude_target_from_coupling=args.exclude_target_from_coupling,
        jobs=max(1, args.jobs),
        min_group_size=max(1, args.min_group_size),
    )
    try:
        report, summary = run_analysis(config)
    except EmptyAnalysisError as exc:
        print(f"citescope: empty analysis: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except CitescopeError as exc:
        print(f"citescope: error: {exc}", file=sys.stderr)
        return EXIT_FATAL

    out_parent = os.path.dirname(os.path.abspath(args.out)) or "."
    os.makedirs(out_parent, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=".citescope-", dir=out_parent)
    try:
        emit_csv(report, staging)
        emit_json(report, os.path.join(staging, "report.json"))
        os.makedirs(args.out, exist_ok=True)
        for name in CSV_FILES + ("report.json",):
            os.replace(os.path.join(staging, name), os.path.join(args.out, name))
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    markers = summary["markers"]
    unresolved = summary["unresolved_markers"]
    rate = (100.0 * unresolved / markers) if markers else 0.0
    st = summary["stats_targets"]
    print(f"citescope {__version__} analysis complete")
    print(
        f"  documents: {summary['documents']} loaded, {summary['skipped']} skipped, "
        f"{summary['empty_body']} with empty body"
    )
    print(f"  targets: {summary['targets']}")
    print(f"  markers: {markers} scanned, {unresolved} unresolved ({rate:.2f}%)")
    print(
        "  targets scope: "
        f"references={st['references']} mentions={st['reference_mentions']} "
        f"citations={st['in_text_citations']} sentences={st['citation_sentences']}"
    )
    print(f"  groups: {summary['groups']} ({args.group_by})")
    print(f"  output: {len(CSV_FILES)} CSV files + report.json in {args.out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    status = EXIT_OK
    malformed = 0
    valid = 0
    seen_ids: set[str] = set()
    try:
        for lineno, line in enumerate(iter_corpus_lines(args.corpus), start=1):
            try:
                doc = document_from_json(line)
            except ValueError as exc:
                print(f"line {lineno}: error: {exc}")
                malformed += 1
                status = EXIT_FATAL
                continue
            findings = validate_document(doc)
            if doc.id in seen_ids:
                findings.append(
                    Finding("error", "id", f"duplicate document id {doc.id!r}")
                )
            seen_ids.add(doc.id)
            for finding in findings:
                print(f"{doc.id}: {finding.severity}: {finding.path}: {finding.message}")
            if any(f.severity == "error" for f in findings):
                status = EXIT_FATAL
            else:
                valid += 1
    except CitescopeError as exc:
        print(f"citescope: error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    if malformed:
        print(f"corpus: {malformed} malformed lines")
    if valid == 0:
        print("warning: 0 documents in corpus")
    else:
        print(f"corpus: {valid} valid documents")
    if args.targets:
        try:
            tstats = LoadStats()
            targets = load_targets(args.targets, stats=tstats)
            if tstats.skipped:
                print(f"targets: {tstats.skipped} lines skipped")
                status = EXIT_FATAL
            print(f"targets: {len(targets)} loaded")
        except CitescopeError as exc:
            print(f"citescope: error: {exc}", file=sys.stderr)
            return EXIT_FATAL
    return status


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"citescope: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_FATAL
    corpus = SyntheticCorpus(scenario, seed=args.seed)
    paths = write_corpus(corpus, args.out)
    total = corpus.ground_truth["totals"]["all"]
    print(
        f"generated {total['documents']} documents, "
        f"{len(corpus.targets)} targets (seed {args.seed})"
    )
    for kind, path in paths.items():
        print(f"  {kind}: {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("CITESCOPE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "synth":
            return cmd_synth(args)
    except CitescopeError as exc:
        print(f"citescope: error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
