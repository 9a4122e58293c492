"""Lexicon-and-rules valence scoring for citation sentences.

The scorer sums per-token valences from a lexicon, adjusted by five rule
heuristics: exclamation emphasis, all-caps emphasis, booster modifiers with
distance damping, contrastive "but" reweighting, and negation within a
three-token window. The raw sum s is normalized to a compound score
s / sqrt(s^2 + 15) in [-1, 1]; pos/neu/neg are the shares of
positive-adjusted, neutral, and negative-adjusted token mass.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CorpusError
from .model import CitationSentence, InTextCitation
from .util import KahanSum

ALPHA = 15.0  # compound normalization constant
CAPS_BOOST = 0.733  # valence increase for an ALL-CAPS sentiment word
NEGATION_SCALAR = -0.74  # multiplier applied by a preceding negator
EXCLAIM_BOOST = 0.292  # per exclamation mark, at most four counted
BOOSTER_DAMPING = (1.0, 0.95, 0.9)  # by distance from the sentiment word

VALENCE_MIN = -4.0
VALENCE_MAX = 4.0

PLACEHOLDER = "CITE"

_STRIP_CHARS = string.punctuation


@dataclass(frozen=True, slots=True)
class ValenceLexicon:
    """Token valences plus booster increments, negator tokens, and an
    optional idiom table (empty by default)."""

    entries: Mapping[str, float]
    boosters: Mapping[str, float]
    negators: frozenset[str]
    idioms: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class SentimentScore:
    pos: float
    neu: float
    neg: float
    compound: float


NEUTRAL_SCORE = SentimentScore(pos=0.0, neu=1.0, neg=0.0, compound=0.0)


def load_lexicon(path: str) -> ValenceLexicon:
    """Parse a lexicon file: lines "token<TAB>valence"; the section headers
    "#boosters" and "#negators" switch parsing mode; other lines starting
    with '#' are comments."""
    entries: dict[str, float] = {}
    boosters: dict[str, float] = {}
    negators: set[str] = set()
    mode = "entries"
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.strip() == "#boosters":
                mode = "boosters"
                continue
            if line.strip() == "#negators":
                mode = "negators"
                continue
            if line.startswith("#"):
                continue
            if mode == "negators":
                token = line.strip()
                _check_token(token, lineno, path)
                if token in negators:
                    raise CorpusError(f"{path}:{lineno}: duplicate negator {token!r}")
                negators.add(token)
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{path}:{lineno}: expected 'token<TAB>value'")
            token, value_text = parts[0].strip(), parts[1].strip()
            _check_token(token, lineno, path)
            try:
                value = float(value_text)
            except ValueError as exc:
                raise CorpusError(f"{path}:{lineno}: bad value {value_text!r}") from exc
            table = entries if mode == "entries" else boosters
            if token in table:
                raise CorpusError(f"{path}:{lineno}: duplicate token {token!r}")
            if mode == "entries" and not VALENCE_MIN <= value <= VALENCE_MAX:
                raise CorpusError(
                    f"{path}:{lineno}: valence {value} outside [{VALENCE_MIN}, {VALENCE_MAX}]"
                )
            table[token] = value
    return ValenceLexicon(entries=entries, boosters=boosters, negators=frozenset(negators))


def _check_token(token: str, lineno: int, path: str) -> None:
    if not token:
        raise CorpusError(f"{path}:{lineno}: empty token")
    if token != token.lower():
        raise CorpusError(f"{path}:{lineno}: token {token!r} must be lowercase")


def load_idioms(path: str) -> dict[str, float]:
    """Optional idiom table: lines "word word[ word]<TAB>valence"."""
    idioms: dict[str, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            gram, _, value_text = line.partition("\t")
            gram = " ".join(gram.lower().split())
            if not gram or not value_text:
                raise CorpusError(f"{path}:{lineno}: expected 'ngram<TAB>value'")
            idioms[gram] = float(value_text)
    return idioms


def prepare_sentence(
    sentence: CitationSentence, citations: Sequence[InTextCitation]
) -> str:
    """Replace citation-marker substrings with a neutral placeholder token."""
    text = sentence.text
    inside = [
        c
        for c in citations
        if sentence.char_start <= c.char_start and c.char_end <= sentence.char_end
    ]
    for citation in sorted(inside, key=lambda c: c.char_start, reverse=True):
        start = citation.char_start - sentence.char_start
        end = citation.char_end - sentence.char_start
        text = text[:start] + PLACEHOLDER + text[end:]
    return text


def _tokenize(text: str) -> list[str]:
    """Whitespace split with leading/trailing punctuation stripped; original
    casing kept (lowercasing happens at lookup time)."""
    tokens = []
    for word in text.split():
        stripped = word.strip(_STRIP_CHARS)
        if stripped:
            tokens.append(stripped)
    return tokens


def _caps_differential(tokens: Sequence[str]) -> bool:
    upper = sum(1 for t in tokens if t.isupper())
    return 0 < len(tokens) - upper < len(tokens)


def _booster_scalar(token: str, valence: float, caps_diff: bool, boosters) -> float:
    scalar = boosters.get(token.lower(), 0.0)
    if scalar == 0.0:
        return 0.0
    if valence < 0:
        scalar = -scalar
    if token.isupper() and caps_diff:
        scalar += CAPS_BOOST if valence > 0 else -CAPS_BOOST
    return scalar


def _idiom_override(
    lowered: Sequence[str], i: int, idioms: Mapping[str, float]
) -> Optional[float]:
    # try every 3-gram, then every 2-gram, covering position i
    for width in (3, 2):
        for lo in range(i - width + 1, i + 1):
            hi = lo + width
            if lo < 0 or hi > len(lowered):
                continue
            gram = " ".join(lowered[lo:hi])
            if gram in idioms:
                return idioms[gram]
    return None


def score(text: str, lexicon: ValenceLexicon) -> SentimentScore:
    """Valence score of a cleaned sentence; token-less text is fully neutral."""
    tokens = _tokenize(text)
    if not tokens:
        return NEUTRAL_SCORE
    lowered = [t.lower() for t in tokens]
    caps_diff = _caps_differential(tokens)
    entries = lexicon.entries
    boosters = lexicon.boosters
    negators = lexicon.negators

    sentiments: list[float] = []
    for i, token in enumerate(tokens):
        low = lowered[i]
        if low in boosters:
            sentiments.append(0.0)
            continue
        if low not in entries:
            sentiments.append(0.0)
            continue
        valence = entries[low]
        if token.isupper() and caps_diff:
            valence += CAPS_BOOST if valence > 0 else -CAPS_BOOST
        for distance in range(3):
            j = i - distance - 1
            if j < 0:
                break
            if lowered[j] in entries:
                continue
            boost = _booster_scalar(tokens[j], valence, caps_diff, boosters)
            if boost:
                valence += boost * BOOSTER_DAMPING[distance]
            if lowered[j] in negators:
                valence *= NEGATION_SCALAR
        if lexicon.idioms:
            override = _idiom_override(lowered, i, lexicon.idioms)
            if override is not None:
                valence = override
        sentiments.append(valence)

    if "but" in lowered:
        pivot = lowered.index("but")
        sentiments = [
            v * 0.5 if i < pivot else (v * 1.5 if i > pivot else v)
            for i, v in enumerate(sentiments)
        ]

    raw_sum = math.fsum(sentiments)
    emphasis = min(text.count("!"), 4) * EXCLAIM_BOOST
    if raw_sum > 0:
        raw_sum += emphasis
    elif raw_sum < 0:
        raw_sum -= emphasis

    compound = raw_sum / math.sqrt(raw_sum * raw_sum + ALPHA)
    compound = max(-1.0, min(1.0, compound))

    pos_mass = sum(v + 1.0 for v in sentiments if v > 0)
    neg_mass = sum(v - 1.0 for v in sentiments if v < 0)
    neu_mass = float(sum(1 for v in sentiments if v == 0))
    if pos_mass > abs(neg_mass):
        pos_mass += emphasis
    elif pos_mass < abs(neg_mass):
        neg_mass -= emphasis
    total = pos_mass + abs(neg_mass) + neu_mass
    if total == 0:
        return NEUTRAL_SCORE
    return SentimentScore(
        pos=pos_mass / total,
        neu=neu_mass / total,
        neg=abs(neg_mass) / total,
        compound=compound,
    )


@dataclass(frozen=True, slots=True)
class SentimentRow:
    group_key: int
    mean_pos: float
    mean_neu: float
    mean_neg: float
    mean_compound: float
    n_sentences: int


class SentimentAggregate:
    __slots__ = ("count", "pos", "neu", "neg", "compound")

    def __init__(self) -> None:
        self.count = 0
        self.pos = KahanSum()
        self.neu = KahanSum()
        self.neg = KahanSum()
        self.compound = KahanSum()

    def add(self, score_: SentimentScore) -> None:
        self.count += 1
        self.pos.add(score_.pos)
        self.neu.add(score_.neu)
        self.neg.add(score_.neg)
        self.compound.add(score_.compound)

    def merge(self, other: "SentimentAggregate") -> None:
        self.count += other.count
        self.pos.merge(other.pos)
        self.neu.merge(other.neu)
        self.neg.merge(other.neg)
        self.compound.merge(other.compound)

    def row(self, group_key: int) -> SentimentRow:
        return SentimentRow(
            group_key=group_key,
            mean_pos=self.pos.value / self.count,
            mean_neu=self.neu.value / self.count,
            mean_neg=self.neg.value / self.count,
            mean_compound=self.compound.value / self.count,
            n_sentences=self.count,
        )


def sentiment_profile(scores: Iterable[tuple[int, SentimentScore]]) -> list[SentimentRow]:
    groups: dict[int, SentimentAggregate] = {}
    for key, score_ in scores:
        groups.setdefault(key, SentimentAggregate()).add(score_)
    return [groups[key].row(key) for key in sorted(groups)]
