"""Joins per-pair records into per-group rows and emits plot-ready files.

Groups are citing years by default, or citation ages (citing year minus
target year). Emission is deterministic: fixed headers, LF endings, numbers
at 6 significant digits, missing values as empty CSV cells / JSON nulls.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .errors import EmptyAnalysisError
from .locations import LocationAggregate, LocationRecord, LocationRow
from .mentions import (
    CitationAggregate,
    CitationRow,
    CitationUsage,
    MentionAggregate,
    MentionRow,
    ReferenceUsage,
)
from .parser import CorpusStats
from .relatedness import RelatednessAggregate, RelatednessRecord, RelatednessRow
from .sentiment import SentimentAggregate, SentimentRow, SentimentScore
from .util import fmt_number

REPORT_SCHEMA_VERSION = "1"

CSV_FILES = (
    "location_mean.csv",
    "location_parts.csv",
    "mention_types.csv",
    "mention_means.csv",
    "citation_types.csv",
    "citation_means.csv",
    "sentiment_shares.csv",
    "sentiment_compound.csv",
    "relatedness_textual.csv",
    "relatedness_bibliographic.csv",
    "coverage.csv",
    "table1.csv",
)


@dataclass(frozen=True, slots=True)
class CoverageRow:
    group_key: int
    citing_docs: int
    docs_with_fulltext_pct: float


@dataclass(frozen=True, slots=True)
class YearlyMetrics:
    group_key: int
    location: Optional[LocationRow]
    mentions: Optional[MentionRow]
    citations: Optional[CitationRow]
    sentiment: Optional[SentimentRow]
    relatedness: Optional[RelatednessRow]
    coverage: Optional[CoverageRow]


@dataclass(frozen=True, slots=True)
class Report:
    metadata: dict
    stats_all: CorpusStats
    stats_targets: CorpusStats
    rows: tuple[YearlyMetrics, ...]


@dataclass(slots=True)
class AnalysisRecords:
    """Everything the aggregation step needs, in corpus order.

    Citation usages carry the distinct target ids of the citation, and
    coverage items the distinct cited target ids of the document, so age
    grouping can expand them per target.
    """

    locations: list[LocationRecord] = dataclasses.field(default_factory=list)
    ref_usages: list[tuple[int, ReferenceUsage]] = dataclasses.field(default_factory=list)
    cit_usages: list[tuple[int, CitationUsage, tuple[str, ...]]] = dataclasses.field(
        default_factory=list
    )
    sentiments: list[tuple[int, str, SentimentScore]] = dataclasses.field(default_factory=list)
    relatedness: list[RelatednessRecord] = dataclasses.field(default_factory=list)
    coverage: list[tuple[int, bool, tuple[str, ...]]] = dataclasses.field(default_factory=list)
    stats_all: CorpusStats = CorpusStats(0, 0, 0, 0, 0, scope="all")
    stats_targets: CorpusStats = CorpusStats(0, 0, 0, 0, 0, scope="targets-only")
    metadata: dict = dataclasses.field(default_factory=dict)

    def has_records(self) -> bool:
        return bool(
            self.locations
            or self.ref_usages
            or self.cit_usages
            or self.sentiments
            or self.relatedness
        )


class _CoverageAggregate:
    __slots__ = ("docs", "fulltext")

    def __init__(self) -> None:
        self.docs = 0
        self.fulltext = 0

    def add(self, has_fulltext: bool) -> None:
        self.docs += 1
        if has_fulltext:
            self.fulltext += 1

    def row(self, group_key: int) -> CoverageRow:
        return CoverageRow(
            group_key=group_key,
            citing_docs=self.docs,
            docs_with_fulltext_pct=100.0 * self.fulltext / self.docs,
        )


def aggregate(
    records: AnalysisRecords,
    group_by: str = "year",
    targets: Optional[dict] = None,
    min_group_size: int = 1,
) -> Report:
    """One YearlyMetrics per non-empty group, ordered by group key.

    ``min_group_size`` suppresses groups whose largest family count is below
    the minimum (default 1, no suppression). Raises EmptyAnalysisError when
    no metric records exist at all.
    """
    if group_by not in ("year", "age"):
        raise ValueError(f"unknown group_by {group_by!r}")
    if group_by == "age" and targets is None:
        raise ValueError("age grouping requires the target map")
    if not records.has_records():
        raise EmptyAnalysisError("analysis produced no records")

    def key_for(citing_year: int, target_id: str) -> int:
        if group_by == "year":
            return citing_year
        return citing_year - targets[target_id].year

    loc: dict[int, LocationAggregate] = {}
    men: dict[int, MentionAggregate] = {}
    cit: dict[int, CitationAggregate] = {}
    sen: dict[int, SentimentAggregate] = {}
    rel: dict[int, RelatednessAggregate] = {}
    cov: dict[int, _CoverageAggregate] = {}

    for record in records.locations:
        key = key_for(record.citing_year, record.target_id)
        loc.setdefault(key, LocationAggregate()).add(record.progression, record.part)
    for citing_year, usage in records.ref_usages:
        key = key_for(citing_year, usage.target_id)
        men.setdefault(key, MentionAggregate()).add(usage.kind, usage.mention_count)
    for citing_year, usage, target_ids in records.cit_usages:
        if group_by == "year":
            keys = (citing_year,)
        else:
            keys = tuple(sorted({key_for(citing_year, tid) for tid in target_ids}))
        for key in keys:
            cit.setdefault(key, CitationAggregate()).add(usage.kind, usage.reference_count)
    for citing_year, target_id, score in records.sentiments:
        key = key_for(citing_year, target_id)
        sen.setdefault(key, SentimentAggregate()).add(score)
    for record in records.relatedness:
        key = key_for(record.citing_year, record.target_id)
        rel.setdefault(key, RelatednessAggregate()).add(record.textual, record.bibliographic)
    for citing_year, has_fulltext, target_ids in records.coverage:
        if group_by == "year":
            keys = (citing_year,)
        else:
            keys = tuple(sorted({key_for(citing_year, tid) for tid in target_ids}))
        for key in keys:
            cov.setdefault(key, _CoverageAggregate()).add(has_fulltext)

    all_keys = sorted(set(loc) | set(men) | set(cit) | set(sen) | set(rel) | set(cov))
    rows: list[YearlyMetrics] = []
    for key in all_keys:
        counts = [
            loc[key].count if key in loc else 0,
            men[key].mentioned + men[key].unmentioned if key in men else 0,
            cit[key].src + cit[key].mrc if key in cit else 0,
            sen[key].count if key in sen else 0,
            max(rel[key].n_textual, rel[key].n_bibliographic) if key in rel else 0,
            cov[key].docs if key in cov else 0,
        ]
        if max(counts) < min_group_size:
            continue
        rows.append(
            YearlyMetrics(
                group_key=key,
                location=loc[key].row(key) if key in loc else None,
                mentions=men[key].row(key) if key in men else None,
                citations=cit[key].row(key) if key in cit else None,
                sentiment=sen[key].row(key) if key in sen else None,
                relatedness=rel[key].row(key) if key in rel else None,
                coverage=cov[key].row(key) if key in cov else None,
            )
        )
    metadata = dict(records.metadata)
    metadata.setdefault("tool", "citescope")
    metadata.setdefault("tool_version", __version__)
    metadata["group_by"] = group_by
    metadata["min_group_size"] = min_group_size
    return Report(
        metadata=metadata,
        stats_all=records.stats_all,
        stats_targets=records.stats_targets,
        rows=tuple(rows),
    )


# --- emission ------------------------------------------------------------------


def _write_csv(path: str, header: list[str], lines: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for cells in lines:
            rendered = [cell if isinstance(cell, str) else fmt_number(cell) for cell in cells]
            handle.write(",".join(rendered) + "\n")


def emit_csv(report: Report, directory: str | os.PathLike) -> list[str]:
    """Write the twelve plot-data CSV files; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    out: list[str] = []

    def emit(name: str, header: list[str], lines: list[list]) -> None:
        path = os.path.join(directory, name)
        _write_csv(path, header, lines)
        out.append(path)

    rows = report.rows
    emit(
        "location_mean.csv",
        ["group_key", "mean_progression"],
        [[r.group_key, r.location.mean_progression] for r in rows if r.location],
    )
    emit(
        "location_parts.csv",
        ["group_key", "pct_begin", "pct_middle", "pct_end"],
        [
            [r.group_key, r.location.pct_begin, r.location.pct_middle, r.location.pct_end]
            for r in rows
            if r.location
        ],
    )
    emit(
        "mention_types.csv",
        ["group_key", "pct_smr", "pct_mmr"],
        [[r.group_key, r.mentions.pct_smr, r.mentions.pct_mmr] for r in rows if r.mentions],
    )
    emit(
        "mention_means.csv",
        ["group_key", "mean_mentions"],
        [[r.group_key, r.mentions.mean_mentions] for r in rows if r.mentions],
    )
    emit(
        "citation_types.csv",
        ["group_key", "pct_src", "pct_mrc"],
        [[r.group_key, r.citations.pct_src, r.citations.pct_mrc] for r in rows if r.citations],
    )
    emit(
        "citation_means.csv",
        ["group_key", "mean_refs_per_citation"],
        [[r.group_key, r.citations.mean_refs_per_citation] for r in rows if r.citations],
    )
    emit(
        "sentiment_shares.csv",
        ["group_key", "mean_pos", "mean_neu", "mean_neg"],
        [
            [r.group_key, r.sentiment.mean_pos, r.sentiment.mean_neu, r.sentiment.mean_neg]
            for r in rows
            if r.sentiment
        ],
    )
    emit(
        "sentiment_compound.csv",
        ["group_key", "mean_compound"],
        [[r.group_key, r.sentiment.mean_compound] for r in rows if r.sentiment],
    )
    emit(
        "relatedness_textual.csv",
        ["group_key", "mean_textual", "n_textual"],
        [
            [r.group_key, r.relatedness.mean_textual, r.relatedness.n_textual]
            for r in rows
            if r.relatedness
        ],
    )
    emit(
        "relatedness_bibliographic.csv",
        ["group_key", "mean_bibliographic", "n_bibliographic"],
        [
            [r.group_key, r.relatedness.mean_bibliographic, r.relatedness.n_bibliographic]
            for r in rows
            if r.relatedness
        ],
    )
    emit(
        "coverage.csv",
        ["group_key", "citing_docs", "docs_with_fulltext_pct"],
        [
            [r.group_key, r.coverage.citing_docs, r.coverage.docs_with_fulltext_pct]
            for r in rows
            if r.coverage
        ],
    )
    emit(
        "table1.csv",
        ["entity", "all", "targets_only"],
        [
            ["references", report.stats_all.references, report.stats_targets.references],
            [
                "reference_mentions",
                report.stats_all.reference_mentions,
                report.stats_targets.reference_mentions,
            ],
            [
                "in_text_citations",
                report.stats_all.in_text_citations,
                report.stats_targets.in_text_citations,
            ],
            [
                "citation_sentences",
                report.stats_all.citation_sentences,
                report.stats_targets.citation_sentences,
            ],
        ],
    )
    return out


def _row_dict(row: YearlyMetrics) -> dict:
    out: dict = {"group_key": row.group_key}
    for name in ("location", "mentions", "citations", "sentiment", "relatedness", "coverage"):
        value = getattr(row, name)
        out[name] = dataclasses.asdict(value) if value is not None else None
    return out


def report_to_dict(report: Report) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "metadata": report.metadata,
        "stats": {
            "all": dataclasses.asdict(report.stats_all),
            "targets_only": dataclasses.asdict(report.stats_targets),
        },
        "rows": [_row_dict(row) for row in report.rows],
    }


def emit_json(report: Report, path: str | os.PathLike) -> str:
    payload = json.dumps(report_to_dict(report), ensure_ascii=False, indent=2)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(payload + "\n")
    return str(path)
