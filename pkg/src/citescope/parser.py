"""Marker scanning, sentence segmentation, resolution, and corpus tallies.

The marker grammar is table-driven: the grammar file names the rule classes
that are active (numeric / parenthetical / narrative); each name selects a
built-in matcher. Matching is ASCII-strict, left-to-right, longest match on
ties, and markers never overlap.

Sentence segmentation is rule based: a run of ``.!?`` followed by whitespace
ends a sentence, unless the run sits inside a citation marker or a single
period completes a listed abbreviation. Section breaks always end a sentence.
"""

from __future__ import annotations

import bisect
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Sequence

from .errors import CorpusError
from .model import (
    AMBIGUOUS_MATCH,
    NARRATIVE,
    NO_MATCHING_KEY,
    NUMERIC,
    OUT_OF_RANGE_INDEX,
    PARENTHETICAL,
    CitationSentence,
    CitingDocument,
    InTextCitation,
    ParsedDocument,
    RawMarker,
    ReferenceEntry,
    ReferenceMention,
    TargetPaper,
    UnresolvedMarker,
)

log = logging.getLogger(__name__)

_NAME_TOKEN = r"[A-Za-z][A-Za-z'’\-]*"
_NAME = rf"{_NAME_TOKEN}(?: {_NAME_TOKEN}){{0,3}}"
_SEGMENT = rf"{_NAME}(?: et al\.)?, ?\d{{4}}[a-z]?"

_RULE_PATTERNS = {
    "numeric": (NUMERIC, re.compile(r"\[\d+(?:[,\-–]\d+)*\]", re.ASCII)),
    "parenthetical": (
        PARENTHETICAL,
        re.compile(rf"\((?:{_SEGMENT})(?:; ?(?:{_SEGMENT}))*\)", re.ASCII),
    ),
    "narrative": (
        NARRATIVE,
        re.compile(rf"[A-Z][A-Za-z'’\-]*(?: et al\.)? \(\d{{4}}[a-z]?\)", re.ASCII),
    ),
}

_SEGMENT_SPLIT = re.compile(r"; ?")
_TERMINATOR_RUN = re.compile(r"[.!?]+")
_DASH_CHARS = ("-", "–")

DEFAULT_ABBREVIATIONS = ("et al.", "e.g.", "i.e.", "Fig.", "cf.", "vs.")


def _read_data_text(name: str) -> str:
    return resources.files("citescope.data").joinpath(name).read_text(encoding="utf-8")


def load_grammar(path: str | None = None) -> tuple[str, ...]:
    """Read the grammar table; returns the active rule-class names.

    Each non-comment line is ``name = definition``; the name must be one of
    the built-in rule classes. Removing a line disables that class.
    """
    text = _read_data_text("grammar.txt") if path is None else open(path, encoding="utf-8").read()
    names: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name = line.split("=", 1)[0].strip()
        if name not in _RULE_PATTERNS:
            raise CorpusError(f"grammar line {lineno}: unknown rule class {name!r}")
        if name in names:
            raise CorpusError(f"grammar line {lineno}: duplicate rule class {name!r}")
        names.append(name)
    if not names:
        raise CorpusError("grammar table declares no rule classes")
    return tuple(names)


def load_abbreviations(path: str | None = None) -> tuple[str, ...]:
    """Abbreviation exception list, one entry per line, '#' comments."""
    text = (
        _read_data_text("abbreviations.txt") if path is None else open(path, encoding="utf-8").read()
    )
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return tuple(out)


class CitationParser:
    """Extracts and resolves citation markers for one grammar/abbreviation set."""

    def __init__(
        self,
        grammar: Sequence[str] | None = None,
        abbreviations: Sequence[str] | None = None,
    ):
        names = tuple(grammar) if grammar is not None else load_grammar()
        self._rules = [_RULE_PATTERNS[name] for name in names]
        self._abbreviations = tuple(
            abbreviations if abbreviations is not None else load_abbreviations()
        )
        self._abbrev_folded = tuple(a.casefold() for a in self._abbreviations)

    # -- scanning -----------------------------------------------------------

    def scan_markers(self, text: str) -> list[RawMarker]:
        """All non-overlapping grammar matches, left-to-right, longest on ties."""
        candidates: list[tuple[int, int, str]] = []
        for style, pattern in self._rules:
            pos = 0
            while True:
                match = pattern.search(text, pos)
                if match is None:
                    break
                start, end = match.start(), match.end()
                # narrative surnames must start at a word edge
                if style == NARRATIVE and start > 0 and text[start - 1].isalnum():
                    pos = start + 1
                    continue
                candidates.append((start, end, style))
                pos = start + 1  # overlapping candidates compete at selection
        candidates.sort(key=lambda c: (c[0], -(c[1] - c[0])))
        markers: list[RawMarker] = []
        cursor = 0
        for start, end, style in candidates:
            if start >= cursor:
                markers.append(RawMarker(start, end, text[start:end], style))
                cursor = end
        return markers

    # -- segmentation ---------------------------------------------------------

    def _abbreviation_at(self, text: str, dot: int) -> bool:
        for abbr in self._abbrev_folded:
            start = dot - len(abbr) + 1
            if start < 0:
                continue
            if text[start : dot + 1].casefold() != abbr:
                continue
            if start == 0 or not text[start - 1].isalnum():
                return True
        return False

    def segment_sentences(
        self, text: str, protected_spans: Sequence[tuple[int, int]] = ()
    ) -> list[tuple[int, int]]:
        """Sentence spans partitioning ``text`` modulo whitespace.

        ``protected_spans`` (typically marker spans) suppress any terminator
        they contain. Returns (start, end) offset pairs; a span includes its
        terminator run.
        """
        spans: list[tuple[int, int]] = []
        ordered = sorted(protected_spans)
        prot_starts = [s for s, _ in ordered]
        prot_ends = [e for _, e in ordered]

        def protected(i: int, j: int) -> bool:
            # any protected span overlapping [i, j)?
            idx = bisect.bisect_right(prot_starts, j - 1) - 1
            while idx >= 0 and prot_ends[idx] > i:
                if prot_starts[idx] < j:
                    return True
                idx -= 1
            return False

        n = len(text)
        line_start = 0
        while line_start <= n:
            newline = text.find("\n", line_start)
            line_end = n if newline < 0 else newline
            cursor = line_start
            open_start: int | None = None
            for match in _TERMINATOR_RUN.finditer(text, line_start, line_end):
                i, j = match.start(), match.end()
                if open_start is None:
                    while cursor < i and text[cursor].isspace():
                        cursor += 1
                    if cursor < i:
                        open_start = cursor
                if j < line_end and not text[j].isspace():
                    continue
                if protected(i, j):
                    continue
                if j - i == 1 and text[i] == "." and self._abbreviation_at(text, i):
                    continue
                if open_start is None:
                    open_start = i  # sentence consisting of the run itself
                spans.append((open_start, j))
                open_start = None
                cursor = j
            # remainder of the line without a closing terminator
            if open_start is None:
                while cursor < line_end and text[cursor].isspace():
                    cursor += 1
                if cursor < line_end:
                    open_start = cursor
            if open_start is not None:
                end = line_end
                while end > open_start and text[end - 1].isspace():
                    end -= 1
                if end > open_start:
                    spans.append((open_start, end))
            if newline < 0:
                break
            line_start = newline + 1
        return spans

    # -- resolution ----------------------------------------------------------

    def resolve_marker(
        self, marker: RawMarker, references: Sequence[ReferenceEntry]
    ) -> InTextCitation | UnresolvedMarker:
        """Map a marker to reference keys, or explain why it cannot be mapped.

        Numeric markers expand comma lists and dash ranges against numeric
        keys; author-year segments match surname (case-insensitive) plus year
        plus an optional disambiguating suffix letter. Every segment must
        resolve or the whole marker is unresolved with the first failure.
        """
        if marker.style == NUMERIC:
            keys_or_reason = self._resolve_numeric(marker.surface, references)
        else:
            keys_or_reason = self._resolve_author_year(marker.surface, marker.style, references)
        if isinstance(keys_or_reason, str):
            return UnresolvedMarker(marker=marker, reason=keys_or_reason)
        return InTextCitation(
            char_start=marker.char_start,
            char_end=marker.char_end,
            reference_keys=tuple(keys_or_reason),
            style=marker.style,
            sentence_index=-1,
        )

    def _resolve_numeric(
        self, surface: str, references: Sequence[ReferenceEntry]
    ) -> list[str] | str:
        inner = surface[1:-1]
        for dash in _DASH_CHARS[1:]:
            inner = inner.replace(dash, "-")
        indices: list[int] = []
        for part in inner.split(","):
            if "-" in part:
                pieces = [int(p) for p in part.split("-")]
                values = [pieces[0]]
                for end in pieces[1:]:
                    if end < values[-1]:
                        return OUT_OF_RANGE_INDEX
                    values.extend(range(values[-1] + 1, end + 1))
                indices.extend(values)
            else:
                indices.append(int(part))
        known = {ref.key for ref in references}
        keys: list[str] = []
        for idx in indices:
            key = str(idx)
            if key not in known:
                return OUT_OF_RANGE_INDEX
            if key in keys:
                log.warning("duplicate key %r inside marker %r deduplicated", key, surface)
                continue
            keys.append(key)
        return keys

    def _resolve_author_year(
        self, surface: str, style: str, references: Sequence[ReferenceEntry]
    ) -> list[str] | str:
        inner = surface[1:-1] if style == PARENTHETICAL else surface
        if style == PARENTHETICAL:
            segments = _SEGMENT_SPLIT.split(inner)
        else:
            segments = [inner.rstrip(")").replace(" (", ", ", 1)]
        keys: list[str] = []
        for segment in segments:
            name, _, year_part = segment.rpartition(",")
            year_part = year_part.strip()
            suffix = None
            if year_part[-1:].isalpha():
                suffix = year_part[-1]
                year_part = year_part[:-1]
            year = int(year_part)
            if name.endswith(" et al."):
                name = name[: -len(" et al.")]
            matches = [
                ref
                for ref in references
                if ref.first_author_surname is not None
                and ref.first_author_surname.casefold() == name.casefold()
                and ref.pub_year == year
            ]
            if suffix is not None:
                matches = [ref for ref in matches if ref.year_suffix == suffix]
            if not matches:
                return NO_MATCHING_KEY
            if len(matches) > 1:
                return AMBIGUOUS_MATCH
            key = matches[0].key
            if key in keys:
                log.warning("duplicate key %r inside marker %r deduplicated", key, surface)
                continue
            keys.append(key)
        return keys

    # -- whole-document extraction --------------------------------------------

    def extract(self, doc: CitingDocument) -> ParsedDocument:
        """Parse one document into citations, mentions, and citation sentences."""
        body = doc.body_text()
        markers = self.scan_markers(body)
        spans = self.segment_sentences(body, [(m.char_start, m.char_end) for m in markers])

        citations: list[InTextCitation] = []
        unresolved: list[UnresolvedMarker] = []
        for marker in markers:
            resolved = self.resolve_marker(marker, doc.references)
            if isinstance(resolved, UnresolvedMarker):
                unresolved.append(resolved)
            else:
                citations.append(resolved)

        # citation sentences: spans hosting at least one resolved citation
        sentence_of: list[int] = []
        cited_spans: list[tuple[int, int]] = []
        span_idx = 0
        for citation in citations:
            while span_idx < len(spans) and spans[span_idx][1] <= citation.char_start:
                span_idx += 1
            span = spans[span_idx]
            if not cited_spans or cited_spans[-1] != span:
                cited_spans.append(span)
            sentence_of.append(len(cited_spans) - 1)

        citations = [
            replace(citation, sentence_index=sentence_of[i])
            for i, citation in enumerate(citations)
        ]
        mentions = tuple(
            ReferenceMention(citation_index=i, reference_key=key, char_start=c.char_start)
            for i, c in enumerate(citations)
            for key in c.reference_keys
        )
        return ParsedDocument(
            doc=doc,
            body_char_count=len(body),
            citations=tuple(citations),
            mentions=mentions,
            citation_sentences=tuple(
                CitationSentence(char_start=s, char_end=e, text=body[s:e])
                for s, e in cited_spans
            ),
            unresolved=tuple(unresolved),
        )


@dataclass(frozen=True, slots=True)
class CorpusStats:
    """Document / reference / mention / citation / sentence tallies."""

    documents: int
    references: int
    reference_mentions: int
    in_text_citations: int
    citation_sentences: int
    scope: str  # "all" | "targets-only"


def target_keys_of(doc: CitingDocument, targets: dict[str, TargetPaper]) -> dict[str, str]:
    """Reference key -> target id for the document's target references."""
    return {
        ref.key: ref.cited_id
        for ref in doc.references
        if ref.cited_id is not None and ref.cited_id in targets
    }


def doc_stat_contribution(
    parsed: ParsedDocument, targets: dict[str, TargetPaper]
) -> tuple[tuple[int, int, int, int, int], tuple[int, int, int, int, int]]:
    """Per-document (all, targets-only) additions to the corpus tallies.

    Targets-only counting: a citation counts once per distinct target it
    names, and a citation sentence counts once per distinct target mentioned
    in it, which makes mentions >= citations >= sentences hold structurally.
    """
    key_to_target = target_keys_of(parsed.doc, targets)
    all_counts = (
        1,
        len(parsed.doc.references),
        len(parsed.mentions),
        len(parsed.citations),
        len(parsed.citation_sentences),
    )
    tgt_refs = len(key_to_target)
    tgt_mentions = sum(1 for m in parsed.mentions if m.reference_key in key_to_target)
    tgt_citations = 0
    sentence_targets: dict[int, set[str]] = {}
    for citation in parsed.citations:
        tids = {key_to_target[k] for k in citation.reference_keys if k in key_to_target}
        tgt_citations += len(tids)
        if tids:
            sentence_targets.setdefault(citation.sentence_index, set()).update(tids)
    tgt_sentences = sum(len(tids) for tids in sentence_targets.values())
    tgt_counts = (
        1 if tgt_refs else 0,
        tgt_refs,
        tgt_mentions,
        tgt_citations,
        tgt_sentences,
    )
    return all_counts, tgt_counts


def tally(
    parsed_docs: Iterable[ParsedDocument], targets: dict[str, TargetPaper]
) -> tuple[CorpusStats, CorpusStats]:
    """Corpus totals over a stream of parsed documents, both scopes."""
    all_totals = [0, 0, 0, 0, 0]
    tgt_totals = [0, 0, 0, 0, 0]
    for parsed in parsed_docs:
        all_add, tgt_add = doc_stat_contribution(parsed, targets)
        for i in range(5):
            all_totals[i] += all_add[i]
            tgt_totals[i] += tgt_add[i]
    return (
        CorpusStats(*all_totals, scope="all"),
        CorpusStats(*tgt_totals, scope="targets-only"),
    )
