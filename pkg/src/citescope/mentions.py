"""Reference mention types (SMR/MMR) and in-text citation types (SRC/MRC).

A reference mentioned exactly once in the body is an SMR, more than once an
MMR; references listed but never mentioned are excluded from the shares and
reported separately. A citation naming exactly one reference is an SRC, more
than one an MRC.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import UnknownReferenceError
from .model import InTextCitation, ParsedDocument
from .util import KahanSum

SMR = "SMR"
MMR = "MMR"
UNMENTIONED = "unmentioned"
SRC = "SRC"
MRC = "MRC"


@dataclass(frozen=True, slots=True)
class ReferenceUsage:
    doc_id: str
    target_id: Optional[str]
    mention_count: int
    kind: str


@dataclass(frozen=True, slots=True)
class CitationUsage:
    doc_id: str
    citation_index: int
    reference_count: int
    kind: str


def reference_usage(parsed: ParsedDocument, target_key: str) -> ReferenceUsage:
    """How often one reference key is mentioned in the body, classified."""
    entry = next((r for r in parsed.doc.references if r.key == target_key), None)
    if entry is None:
        raise UnknownReferenceError(
            f"key {target_key!r} is not a reference of document {parsed.doc.id}"
        )
    count = sum(1 for m in parsed.mentions if m.reference_key == target_key)
    if count == 0:
        kind = UNMENTIONED
    elif count == 1:
        kind = SMR
    else:
        kind = MMR
    return ReferenceUsage(
        doc_id=parsed.doc.id,
        target_id=entry.cited_id,
        mention_count=count,
        kind=kind,
    )


def citation_usage(
    citation: InTextCitation, doc_id: str = "", citation_index: int = 0
) -> CitationUsage:
    count = len(citation.reference_keys)
    return CitationUsage(
        doc_id=doc_id,
        citation_index=citation_index,
        reference_count=count,
        kind=SRC if count == 1 else MRC,
    )


@dataclass(frozen=True, slots=True)
class MentionRow:
    group_key: int
    pct_smr: float
    pct_mmr: float
    mean_mentions: float
    n_references: int
    n_unmentioned: int


@dataclass(frozen=True, slots=True)
class CitationRow:
    group_key: int
    pct_src: float
    pct_mrc: float
    mean_refs_per_citation: float
    n_citations: int


class MentionAggregate:
    __slots__ = ("smr", "mmr", "unmentioned", "mention_total")

    def __init__(self) -> None:
        self.smr = 0
        self.mmr = 0
        self.unmentioned = 0
        self.mention_total = KahanSum()

    def add(self, kind: str, mention_count: int) -> None:
        if kind == UNMENTIONED:
            self.unmentioned += 1
            return
        if kind == SMR:
            self.smr += 1
        else:
            self.mmr += 1
        self.mention_total.add(float(mention_count))

    def merge(self, other: "MentionAggregate") -> None:
        self.smr += other.smr
        self.mmr += other.mmr
        self.unmentioned += other.unmentioned
        self.mention_total.merge(other.mention_total)

    @property
    def mentioned(self) -> int:
        return self.smr + self.mmr

    def row(self, group_key: int) -> Optional[MentionRow]:
        if self.mentioned == 0:
            return None
        return MentionRow(
            group_key=group_key,
            pct_smr=100.0 * self.smr / self.mentioned,
            pct_mmr=100.0 * self.mmr / self.mentioned,
            mean_mentions=self.mention_total.value / self.mentioned,
            n_references=self.mentioned,
            n_unmentioned=self.unmentioned,
        )


class CitationAggregate:
    __slots__ = ("src", "mrc", "ref_total")

    def __init__(self) -> None:
        self.src = 0
        self.mrc = 0
        self.ref_total = KahanSum()

    def add(self, kind: str, reference_count: int) -> None:
        if kind == SRC:
            self.src += 1
        else:
            self.mrc += 1
        self.ref_total.add(float(reference_count))

    def merge(self, other: "CitationAggregate") -> None:
        self.src += other.src
        self.mrc += other.mrc
        self.ref_total.merge(other.ref_total)

    def row(self, group_key: int) -> Optional[CitationRow]:
        total = self.src + self.mrc
        if total == 0:
            return None
        return CitationRow(
            group_key=group_key,
            pct_src=100.0 * self.src / total,
            pct_mrc=100.0 * self.mrc / total,
            mean_refs_per_citation=self.ref_total.value / total,
            n_citations=total,
        )


def mention_profile(usages: Iterable[tuple[int, ReferenceUsage]]) -> list[MentionRow]:
    """Rows from (group_key, usage) pairs; unmentioned usages feed only the
    coverage figure, never the shares."""
    groups: dict[int, MentionAggregate] = {}
    for key, usage in usages:
        groups.setdefault(key, MentionAggregate()).add(usage.kind, usage.mention_count)
    rows = []
    for key in sorted(groups):
        row = groups[key].row(key)
        if row is not None:
            rows.append(row)
    return rows


def citation_profile(usages: Iterable[tuple[int, CitationUsage]]) -> list[CitationRow]:
    """Rows from (group_key, usage) pairs; the caller applies the scope filter
    (citations containing at least one target reference)."""
    groups: dict[int, CitationAggregate] = {}
    for key, usage in usages:
        groups.setdefault(key, CitationAggregate()).add(usage.kind, usage.reference_count)
    rows = []
    for key in sorted(groups):
        row = groups[key].row(key)
        if row is not None:
            rows.append(row)
    return rows
