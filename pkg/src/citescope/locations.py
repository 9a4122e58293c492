"""Citation location as text progression, with begin/middle/end parts.

A mention at character i of an n-character body sits at progression i / n.
The progression scale is cut into three equal parts: begin [0, 1/3),
middle [1/3, 2/3), end [2/3, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import EmptyBodyError, InvalidProgressionError
from .model import ParsedDocument, ReferenceMention
from .util import KahanSum

BEGIN = "begin"
MIDDLE = "middle"
END = "end"


def text_progression(parsed: ParsedDocument, mention: ReferenceMention) -> float:
    """Fractional character position i / n of a mention in the body text."""
    n = parsed.body_char_count
    if n <= 0:
        raise EmptyBodyError(f"document {parsed.doc.id} has an empty body")
    if not 0 <= mention.char_start < n:
        raise InvalidProgressionError(
            f"mention offset {mention.char_start} outside body of {n} characters"
        )
    return mention.char_start / n


def tertile(progression: float) -> str:
    """Begin / middle / end classification; boundaries at exactly 1/3 and 2/3."""
    if not 0.0 <= progression <= 1.0:
        raise InvalidProgressionError(f"progression {progression} outside [0, 1]")
    scaled = 3.0 * progression
    if scaled < 1.0:
        return BEGIN
    if scaled < 2.0:
        return MIDDLE
    return END


@dataclass(frozen=True, slots=True)
class LocationRecord:
    doc_id: str
    target_id: str
    progression: float
    part: str
    citing_year: int


@dataclass(frozen=True, slots=True)
class LocationRow:
    group_key: int
    mean_progression: float
    pct_begin: float
    pct_middle: float
    pct_end: float
    n_mentions: int


class LocationAggregate:
    """Associative per-group accumulator (count, compensated sum, part tallies)."""

    __slots__ = ("count", "total", "parts")

    def __init__(self) -> None:
        self.count = 0
        self.total = KahanSum()
        self.parts = {BEGIN: 0, MIDDLE: 0, END: 0}

    def add(self, progression: float, part: str) -> None:
        self.count += 1
        self.total.add(progression)
        self.parts[part] += 1

    def merge(self, other: "LocationAggregate") -> None:
        self.count += other.count
        self.total.merge(other.total)
        for part, n in other.parts.items():
            self.parts[part] += n

    def row(self, group_key: int) -> LocationRow:
        return LocationRow(
            group_key=group_key,
            mean_progression=self.total.value / self.count,
            pct_begin=100.0 * self.parts[BEGIN] / self.count,
            pct_middle=100.0 * self.parts[MIDDLE] / self.count,
            pct_end=100.0 * self.parts[END] / self.count,
            n_mentions=self.count,
        )


def location_profile(records: Iterable[LocationRecord]) -> list[LocationRow]:
    """Per-citing-year mean progression and tertile shares; empty groups are
    simply absent (callers group before calling for other keys)."""
    groups: dict[int, LocationAggregate] = {}
    for record in records:
        groups.setdefault(record.citing_year, LocationAggregate()).add(
            record.progression, record.part
        )
    return [groups[key].row(key) for key in sorted(groups)]


def make_location_record(
    parsed: ParsedDocument, mention: ReferenceMention, target_id: str
) -> Optional[LocationRecord]:
    """Record for one target mention; None for documents with no body text."""
    if parsed.body_char_count <= 0:
        return None
    progression = text_progression(parsed, mention)
    return LocationRecord(
        doc_id=parsed.doc.id,
        target_id=target_id,
        progression=progression,
        part=tertile(progression),
        citing_year=parsed.doc.year,
    )
