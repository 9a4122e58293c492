"""Canonical data model: cited targets, citing documents, parsed artifacts.

All types are frozen dataclasses and safe to share across workers. Corpus and
target files are line-delimited JSON (UTF-8, one record per line); the
serializers here define the canonical byte form, so serialize(deserialize(x))
round-trips byte-identically for canonical records.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import CorpusError

# Marker / citation styles.
NUMERIC = "numeric-bracket"
PARENTHETICAL = "author-year-parenthetical"
NARRATIVE = "author-year-narrative"
STYLES = (NUMERIC, PARENTHETICAL, NARRATIVE)

YEAR_MIN = 1800
YEAR_MAX = 2100


@dataclass(frozen=True, slots=True)
class Section:
    label: str
    text: str


@dataclass(frozen=True, slots=True)
class ReferenceEntry:
    """One bibliography entry of a citing document.

    ``key`` is the in-document key (a numeric index string or an author-year
    key); ``cited_id`` is the canonical identifier of the cited work when the
    upstream linker resolved it.
    """

    key: str
    raw: str
    cited_id: Optional[str] = None
    first_author_surname: Optional[str] = None
    pub_year: Optional[int] = None
    year_suffix: Optional[str] = None


@dataclass(frozen=True, slots=True)
class CitingDocument:
    id: str
    year: int
    title: str
    abstract: str
    sections: tuple[Section, ...]
    references: tuple[ReferenceEntry, ...]

    def body_text(self) -> str:
        """Concatenated section texts joined by single newlines.

        The join is the character basis for all positional metrics: the
        newline separator counts as one character; title, abstract, and the
        reference list are excluded.
        """
        return "\n".join(section.text for section in self.sections)


@dataclass(frozen=True, slots=True)
class TargetPaper:
    """A cited (highly cited) paper with its own reference identifier set."""

    id: str
    year: int
    title: str
    abstract: str
    reference_ids: frozenset[str]


@dataclass(frozen=True, slots=True)
class RawMarker:
    char_start: int
    char_end: int
    surface: str
    style: str


# Reasons a scanned marker can fail to resolve against the reference list.
NO_MATCHING_KEY = "no-matching-key"
AMBIGUOUS_MATCH = "ambiguous-match"
OUT_OF_RANGE_INDEX = "out-of-range-index"


@dataclass(frozen=True, slots=True)
class UnresolvedMarker:
    marker: RawMarker
    reason: str


@dataclass(frozen=True, slots=True)
class InTextCitation:
    """One citation marker resolved to one or more reference keys."""

    char_start: int
    char_end: int
    reference_keys: tuple[str, ...]
    style: str
    sentence_index: int


@dataclass(frozen=True, slots=True)
class ReferenceMention:
    """One (in-text citation, reference key) pair; char_start is the marker's
    first character, the position used for text progression."""

    citation_index: int
    reference_key: str
    char_start: int


@dataclass(frozen=True, slots=True)
class CitationSentence:
    char_start: int
    char_end: int
    text: str


@dataclass(frozen=True, slots=True)
class ParsedDocument:
    doc: CitingDocument
    body_char_count: int
    citations: tuple[InTextCitation, ...]
    mentions: tuple[ReferenceMention, ...]
    citation_sentences: tuple[CitationSentence, ...]
    unresolved: tuple[UnresolvedMarker, ...]


@dataclass(frozen=True, slots=True)
class Finding:
    severity: str  # "error" | "warning"
    path: str
    message: str


@dataclass(slots=True)
class LoadStats:
    """Mutable counters filled while streaming a corpus file."""

    yielded: int = 0
    malformed_lines: int = 0
    invalid_documents: int = 0
    duplicate_ids: int = 0

    @property
    def skipped(self) -> int:
        return self.malformed_lines + self.invalid_documents + self.duplicate_ids


def validate_document(doc: CitingDocument) -> list[Finding]:
    """Check every intra-document invariant; empty list means valid.

    Error findings mark documents the loader must skip; warnings (an
    explicitly empty section text) keep the document.
    """
    findings: list[Finding] = []
    if not doc.id:
        findings.append(Finding("error", "id", "document id must be non-empty"))
    if not YEAR_MIN <= doc.year <= YEAR_MAX:
        findings.append(
            Finding("error", "year", f"year {doc.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        )
    if not doc.sections:
        findings.append(Finding("error", "sections", "sections must be non-empty"))
    for i, section in enumerate(doc.sections):
        if section.text == "":
            findings.append(
                Finding("warning", f"sections[{i}].text", "section text is empty")
            )
    seen_keys: set[str] = set()
    for i, ref in enumerate(doc.references):
        path = f"references[{i}]"
        if not ref.key:
            findings.append(Finding("error", f"{path}.key", "reference key must be non-empty"))
        elif ref.key in seen_keys:
            findings.append(
                Finding("error", f"{path}.key", f"duplicate reference key {ref.key!r}")
            )
        else:
            seen_keys.add(ref.key)
        if ref.cited_id is not None and ref.cited_id == "":
            findings.append(Finding("error", f"{path}.cited_id", "cited_id present but empty"))
        if ref.year_suffix is not None and ref.pub_year is None:
            findings.append(
                Finding("error", f"{path}.year_suffix", "year_suffix requires pub_year")
            )
        if ref.year_suffix is not None and len(ref.year_suffix) != 1:
            findings.append(
                Finding("error", f"{path}.year_suffix", "year_suffix must be a single letter")
            )
    return findings


def validate_target(target: TargetPaper) -> list[Finding]:
    findings: list[Finding] = []
    if not target.id:
        findings.append(Finding("error", "id", "target id must be non-empty"))
    if not YEAR_MIN <= target.year <= YEAR_MAX:
        findings.append(
            Finding("error", "year", f"year {target.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        )
    if target.id in target.reference_ids:
        findings.append(
            Finding("error", "reference_ids", "reference_ids must not contain the target's own id")
        )
    return findings


# --- canonical JSON (de)serialization -------------------------------------

_REF_OPTIONAL = ("cited_id", "first_author_surname", "pub_year", "year_suffix")


def document_to_dict(doc: CitingDocument) -> dict:
    refs = []
    for ref in doc.references:
        entry: dict = {"key": ref.key, "raw": ref.raw}
        for name in _REF_OPTIONAL:
            value = getattr(ref, name)
            if value is not None:
                entry[name] = value
        refs.append(entry)
    return {
        "id": doc.id,
        "year": doc.year,
        "title": doc.title,
        "abstract": doc.abstract,
        "sections": [{"label": s.label, "text": s.text} for s in doc.sections],
        "references": refs,
    }


def document_from_dict(record: dict) -> CitingDocument:
    try:
        sections = tuple(
            Section(label=str(s["label"]), text=str(s["text"])) for s in record["sections"]
        )
        references = tuple(
            ReferenceEntry(
                key=str(r["key"]),
                raw=str(r["raw"]),
                cited_id=r.get("cited_id"),
                first_author_surname=r.get("first_author_surname"),
                pub_year=r.get("pub_year"),
                year_suffix=r.get("year_suffix"),
            )
            for r in record["references"]
        )
        return CitingDocument(
            id=str(record["id"]),
            year=int(record["year"]),
            title=str(record["title"]),
            abstract=str(record["abstract"]),
            sections=sections,
            references=references,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed document record: {exc}") from exc


def document_to_json(doc: CitingDocument) -> str:
    return json.dumps(document_to_dict(doc), ensure_ascii=False, separators=(",", ":"))


def document_from_json(line: str) -> CitingDocument:
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("document record must be a JSON object")
    return document_from_dict(record)


def target_to_dict(target: TargetPaper) -> dict:
    return {
        "id": target.id,
        "year": target.year,
        "title": target.title,
        "abstract": target.abstract,
        "reference_ids": sorted(target.reference_ids),
    }


def target_from_dict(record: dict) -> TargetPaper:
    try:
        reference_ids = list(record["reference_ids"])
        unique = frozenset(str(r) for r in reference_ids)
        if len(unique) != len(reference_ids):
            raise ValueError("reference_ids contains duplicates")
        return TargetPaper(
            id=str(record["id"]),
            year=int(record["year"]),
            title=str(record["title"]),
            abstract=str(record["abstract"]),
            reference_ids=unique,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed target record: {exc}") from exc


def target_to_json(target: TargetPaper) -> str:
    return json.dumps(target_to_dict(target), ensure_ascii=False, separators=(",", ":"))


def target_from_json(line: str) -> TargetPaper:
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("target record must be a JSON object")
    return target_from_dict(record)


# --- corpus / target loading ----------------------------------------------


def iter_corpus_lines(path: str | os.PathLike) -> Iterator[str]:
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    with handle:
        for line in handle:
            line = line.strip()
            if line:
                yield line


def load_corpus(
    path: str | os.PathLike, stats: LoadStats | None = None
) -> Iterator[CitingDocument]:
    """Stream valid documents from a line-delimited corpus file.

    Malformed lines and documents with error findings are skipped and
    counted in ``stats``; duplicate document ids count as invalid.
    """
    if stats is None:
        stats = LoadStats()
    seen_ids: set[str] = set()
    for line in iter_corpus_lines(path):
        try:
            doc = document_from_json(line)
        except ValueError:
            stats.malformed_lines += 1
            continue
        if any(f.severity == "error" for f in validate_document(doc)):
            stats.invalid_documents += 1
            continue
        if doc.id in seen_ids:
            stats.duplicate_ids += 1
            continue
        seen_ids.add(doc.id)
        stats.yielded += 1
        yield doc


def load_targets(
    path: str | os.PathLike, stats: LoadStats | None = None
) -> dict[str, TargetPaper]:
    """Load the cited-target set keyed by id. Duplicate ids are fatal."""
    if stats is None:
        stats = LoadStats()
    targets: dict[str, TargetPaper] = {}
    for line in iter_corpus_lines(path):
        try:
            target = target_from_json(line)
        except ValueError:
            stats.malformed_lines += 1
            continue
        if any(f.severity == "error" for f in validate_target(target)):
            stats.invalid_documents += 1
            continue
        if target.id in targets:
            raise CorpusError(f"duplicate target id {target.id!r} in {path}")
        targets[target.id] = target
        stats.yielded += 1
    return targets
