"""End-to-end analysis: stream the corpus, measure each document, aggregate.

Measurement of one document is a pure function of its bytes plus the shared
tables (targets, lexicon, grammar), so documents can be handled by parallel
workers; results are merged in corpus order, which keeps every output
bit-identical regardless of the worker count.
"""

from __future__ import annotations

import dataclasses
import logging
import multiprocessing
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ZeroVectorError
from .locations import make_location_record
from .mentions import MMR, SMR, SRC, MRC, UNMENTIONED, CitationUsage, ReferenceUsage
from .model import (
    CitingDocument,
    LoadStats,
    TargetPaper,
    document_from_json,
    iter_corpus_lines,
    load_targets,
    validate_document,
)
from .parser import CitationParser, CorpusStats, doc_stat_contribution, target_keys_of
from .relatedness import (
    EMBEDDING_UNAVAILABLE,
    EMPTY_ABSTRACT,
    ZERO_VECTOR,
    Missing,
    RelatednessRecord,
    cosine,
    embedding_text,
    make_provider,
    reference_relatedness,
)
from .report import AnalysisRecords, Report, aggregate
from .sentiment import (
    SentimentScore,
    ValenceLexicon,
    load_lexicon,
    prepare_sentence,
    score,
)
from .util import sha256_file

log = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RunConfig:
    corpus: str
    targets: str
    lexicon: str
    embeddings: str = "test"
    group_by: str = "year"
    out_dir: str = "."
    exclude_target_from_coupling: bool = True
    jobs: int = 1
    min_group_size: int = 1


@dataclass(frozen=True, slots=True)
class DocMeasure:
    """Everything extracted from one document, ready for ordered merging."""

    doc_id: str
    citing_year: int
    empty_body: bool
    stat_all: tuple[int, int, int, int, int]
    stat_targets: tuple[int, int, int, int, int]
    marker_count: int
    unresolved_count: int
    locations: tuple
    ref_usages: tuple[ReferenceUsage, ...]
    cit_usages: tuple[tuple[CitationUsage, tuple[str, ...]], ...]
    sentiments: tuple[tuple[str, SentimentScore], ...]
    pairs: tuple[tuple[str, Optional[float], Optional[str]], ...]
    embed_text: Optional[str]
    cited_target_ids: tuple[str, ...]


_worker_state: dict = {}


def _init_worker(targets, lexicon, exclude_target) -> None:
    _worker_state["targets"] = targets
    _worker_state["lexicon"] = lexicon
    _worker_state["exclude_target"] = exclude_target
    _worker_state["parser"] = CitationParser()


def measure_document(
    doc: CitingDocument,
    targets: dict[str, TargetPaper],
    parser: CitationParser,
    lexicon: ValenceLexicon,
    exclude_target_from_coupling: bool = True,
) -> DocMeasure:
    """Measure one valid document: tallies, per-mention and per-pair records."""
    body = doc.body_text()
    cited_targets = tuple(
        sorted({r.cited_id for r in doc.references if r.cited_id in targets})
    )
    if not body.strip():
        zero = (0, 0, 0, 0, 0)
        return DocMeasure(
            doc_id=doc.id,
            citing_year=doc.year,
            empty_body=True,
            stat_all=zero,
            stat_targets=zero,
            marker_count=0,
            unresolved_count=0,
            locations=(),
            ref_usages=(),
            cit_usages=(),
            sentiments=(),
            pairs=(),
            embed_text=None,
            cited_target_ids=cited_targets,
        )

    parsed = parser.extract(doc)
    stat_all, stat_targets = doc_stat_contribution(parsed, targets)
    key_to_target = target_keys_of(doc, targets)

    locations = tuple(
        make_location_record(parsed, mention, key_to_target[mention.reference_key])
        for mention in parsed.mentions
        if mention.reference_key in key_to_target
    )

    mention_counts = Counter(m.reference_key for m in parsed.mentions)
    ref_usages = []
    for ref in doc.references:
        if ref.key not in key_to_target:
            continue
        count = mention_counts.get(ref.key, 0)
        kind = UNMENTIONED if count == 0 else (SMR if count == 1 else MMR)
        ref_usages.append(
            ReferenceUsage(
                doc_id=doc.id, target_id=ref.cited_id, mention_count=count, kind=kind
            )
        )

    cit_usages = []
    sentence_targets: dict[int, set[str]] = {}
    sentence_citations: dict[int, list] = {}
    for index, citation in enumerate(parsed.citations):
        sentence_citations.setdefault(citation.sentence_index, []).append(citation)
        tids = sorted({key_to_target[k] for k in citation.reference_keys if k in key_to_target})
        if not tids:
            continue
        usage = CitationUsage(
            doc_id=doc.id,
            citation_index=index,
            reference_count=len(citation.reference_keys),
            kind=SRC if len(citation.reference_keys) == 1 else MRC,
        )
        cit_usages.append((usage, tuple(tids)))
        sentence_targets.setdefault(citation.sentence_index, set()).update(tids)

    sentiments = []
    for sentence_index in sorted(sentence_targets):
        sentence = parsed.citation_sentences[sentence_index]
        cleaned = prepare_sentence(sentence, sentence_citations[sentence_index])
        sentence_score = score(cleaned, lexicon)
        for tid in sorted(sentence_targets[sentence_index]):
            sentiments.append((tid, sentence_score))

    pairs = []
    for tid in cited_targets:
        outcome = reference_relatedness(
            targets[tid], doc, exclude_target=exclude_target_from_coupling
        )
        if isinstance(outcome, Missing):
            pairs.append((tid, None, outcome.reason))
        else:
            pairs.append((tid, outcome, None))

    return DocMeasure(
        doc_id=doc.id,
        citing_year=doc.year,
        empty_body=False,
        stat_all=stat_all,
        stat_targets=stat_targets,
        marker_count=len(parsed.citations) + len(parsed.unresolved),
        unresolved_count=len(parsed.unresolved),
        locations=locations,
        ref_usages=tuple(ref_usages),
        cit_usages=tuple(cit_usages),
        sentiments=tuple(sentiments),
        pairs=tuple(pairs),
        embed_text=embedding_text(doc.title, doc.abstract) if doc.abstract.strip() else None,
        cited_target_ids=cited_targets,
    )


def _measure_line(line: str):
    try:
        doc = document_from_json(line)
    except ValueError:
        return ("malformed", None)
    if any(f.severity == "error" for f in validate_document(doc)):
        return ("invalid", None)
    measure = measure_document(
        doc,
        _worker_state["targets"],
        _worker_state["parser"],
        _worker_state["lexicon"],
        _worker_state["exclude_target"],
    )
    return ("ok", measure)


def _measure_stream(lines: Iterable[str], config: RunConfig, targets, lexicon):
    if config.jobs <= 1:
        _init_worker(targets, lexicon, config.exclude_target_from_coupling)
        for line in lines:
            yield _measure_line(line)
        return
    with multiprocessing.Pool(
        processes=config.jobs,
        initializer=_init_worker,
        initargs=(targets, lexicon, config.exclude_target_from_coupling),
    ) as pool:
        yield from pool.imap(_measure_line, lines, chunksize=16)


def collect_records(config: RunConfig) -> tuple[AnalysisRecords, dict[str, TargetPaper], dict]:
    """Measurement phase: stream the corpus and build the record collections."""
    target_stats = LoadStats()
    targets = load_targets(config.targets, stats=target_stats)
    lexicon = load_lexicon(config.lexicon)
    provider = make_provider(config.embeddings)

    load_stats = LoadStats()
    empty_body = 0
    marker_count = 0
    unresolved_count = 0
    seen_ids: set[str] = set()
    measures: list[DocMeasure] = []
    records = AnalysisRecords()
    stat_all = [0, 0, 0, 0, 0]
    stat_targets = [0, 0, 0, 0, 0]

    for status, measure in _measure_stream(
        iter_corpus_lines(config.corpus), config, targets, lexicon
    ):
        if status == "malformed":
            load_stats.malformed_lines += 1
            continue
        if status == "invalid":
            load_stats.invalid_documents += 1
            continue
        if measure.doc_id in seen_ids:
            load_stats.duplicate_ids += 1
            continue
        seen_ids.add(measure.doc_id)
        load_stats.yielded += 1
        if measure.empty_body:
            empty_body += 1
        marker_count += measure.marker_count
        unresolved_count += measure.unresolved_count
        for i in range(5):
            stat_all[i] += measure.stat_all[i]
            stat_targets[i] += measure.stat_targets[i]
        records.locations.extend(measure.locations)
        records.ref_usages.extend((measure.citing_year, u) for u in measure.ref_usages)
        records.cit_usages.extend(
            (measure.citing_year, usage, tids) for usage, tids in measure.cit_usages
        )
        records.sentiments.extend(
            (measure.citing_year, tid, s) for tid, s in measure.sentiments
        )
        records.coverage.append(
            (measure.citing_year, not measure.empty_body, measure.cited_target_ids)
        )
        measures.append(measure)

    records.stats_all = CorpusStats(*stat_all, scope="all")
    records.stats_targets = CorpusStats(*stat_targets, scope="targets-only")

    missing_counts: dict[str, Counter] = {"textual": Counter(), "bibliographic": Counter()}
    _attach_relatedness(records, measures, targets, provider, missing_counts)

    records.metadata = {
        "tool": "citescope",
        "corpus_sha256": sha256_file(config.corpus),
        "targets_sha256": sha256_file(config.targets),
        "lexicon_sha256": sha256_file(config.lexicon),
        "embeddings": config.embeddings,
        "exclude_target_from_coupling": config.exclude_target_from_coupling,
        "provider": provider.info(),
        "load": {
            "documents": load_stats.yielded,
            "malformed_lines": load_stats.malformed_lines,
            "invalid_documents": load_stats.invalid_documents,
            "duplicate_ids": load_stats.duplicate_ids,
            "empty_body": empty_body,
            "targets": len(targets),
            "target_lines_skipped": target_stats.skipped,
        },
        "markers": {"total": marker_count, "unresolved": unresolved_count},
        "relatedness_missing": {
            kind: dict(sorted(counter.items())) for kind, counter in missing_counts.items()
        },
    }
    extra = {
        "documents": load_stats.yielded,
        "skipped": load_stats.skipped,
        "empty_body": empty_body,
        "targets": len(targets),
        "markers": marker_count,
        "unresolved_markers": unresolved_count,
    }
    return records, targets, extra


def run_analysis(config: RunConfig) -> tuple[Report, dict]:
    """Full pipeline: parse, measure, embed, aggregate. Returns (report, summary)."""
    records, targets, extra = collect_records(config)
    report = aggregate(
        records,
        group_by=config.group_by,
        targets=targets,
        min_group_size=config.min_group_size,
    )
    summary = dict(extra)
    summary.update(
        {
            "groups": len(report.rows),
            "stats_all": dataclasses.asdict(records.stats_all),
            "stats_targets": dataclasses.asdict(records.stats_targets),
        }
    )
    return report, summary


def _attach_relatedness(
    records: AnalysisRecords,
    measures: list[DocMeasure],
    targets: dict[str, TargetPaper],
    provider,
    missing_counts: dict[str, Counter],
) -> None:
    target_items = {
        tid: (tid, embedding_text(t.title, t.abstract))
        for tid, t in targets.items()
        if t.abstract.strip()
    }
    wanted: list[tuple[str, str]] = []
    for measure in measures:
        if measure.pairs and measure.embed_text is not None:
            wanted.append((measure.doc_id, measure.embed_text))
        for tid, _bib, _reason in measure.pairs:
            if tid in target_items:
                wanted.append(target_items[tid])
    vectors = dict(zip((sid for sid, _ in wanted), provider.embed(wanted))) if wanted else {}

    for measure in measures:
        for tid, bib, bib_reason in measure.pairs:
            if bib_reason is not None:
                missing_counts["bibliographic"][bib_reason] += 1
            textual: Optional[float] = None
            textual_reason: Optional[str] = None
            if tid not in target_items or measure.embed_text is None:
                textual_reason = EMPTY_ABSTRACT
            else:
                tv = vectors.get(tid)
                dv = vectors.get(measure.doc_id)
                if tv is None or dv is None:
                    textual_reason = EMBEDDING_UNAVAILABLE
                else:
                    try:
                        textual = cosine(tv, dv)
                    except ZeroVectorError:
                        textual_reason = ZERO_VECTOR
            if textual_reason is not None:
                missing_counts["textual"][textual_reason] += 1
            if textual is None and bib is None:
                continue
            records.relatedness.append(
                RelatednessRecord(
                    doc_id=measure.doc_id,
                    target_id=tid,
                    citing_year=measure.citing_year,
                    textual=textual,
                    textual_reason=textual_reason,
                    bibliographic=bib,
                    bibliographic_reason=bib_reason,
                )
            )
