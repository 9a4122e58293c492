"""Citing-cited relatedness: embedding cosine over title+abstract text and
the Ochiai coefficient over shared cited references.

Embeddings come from a pluggable provider: a precomputed-vector file, a
remote HTTP service speaking {"texts": [...]} -> {"dim": d, "vectors": [...]}
on POST /embed, or the built-in deterministic test embedder (hashed
bag-of-words, unit-normalized). Missing values carry a reason and never
contribute to a mean.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CorpusError, EmptyReferenceSetError, ProviderError, ZeroVectorError
from .model import CitingDocument, TargetPaper
from .util import KahanSum

log = logging.getLogger(__name__)

EMPTY_ABSTRACT = "empty-abstract"
EMBEDDING_UNAVAILABLE = "embedding-unavailable"
ZERO_VECTOR = "zero-vector"
MISSING_BASIS = "missing-basis"  # the target has no reference ids
NO_COUPLING_BASIS = "no-coupling-basis"  # the document has no resolved cited ids


@dataclass(frozen=True, slots=True)
class EmbeddingVector:
    values: tuple[float, ...]
    source_id: str


@dataclass(frozen=True, slots=True)
class Missing:
    reason: str


@dataclass(frozen=True, slots=True)
class RelatednessRecord:
    doc_id: str
    target_id: str
    citing_year: int
    textual: Optional[float]
    textual_reason: Optional[str]
    bibliographic: Optional[float]
    bibliographic_reason: Optional[str]


def embedding_text(title: str, abstract: str) -> str:
    return f"{title}. {abstract}"


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """<u,v> / (|u||v|); raises ZeroVectorError on a zero operand."""
    if len(u.values) != len(v.values):
        raise ValueError(
            f"dimension mismatch: {len(u.values)} vs {len(v.values)}"
        )
    dot = math.fsum(a * b for a, b in zip(u.values, v.values))
    nu = math.fsum(a * a for a in u.values)
    nv = math.fsum(b * b for b in v.values)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError(f"zero vector for {u.source_id if nu == 0.0 else v.source_id}")
    return dot / math.sqrt(nu * nv)


def ochiai(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """|a & b| / sqrt(|a| * |b|); both sets must be non-empty."""
    if not a or not b:
        raise EmptyReferenceSetError("ochiai requires two non-empty sets")
    return len(a & b) / math.sqrt(len(a) * len(b))


# --- providers ---------------------------------------------------------------


class HashedBagOfWordsEmbedder:
    """Deterministic test embedder: md5-hashed token counts, unit-normalized.

    Identical text always yields the identical vector, independent of process
    or platform; word order never matters (a documented property of this
    provider only, not of real embeddings).
    """

    name = "test-hash"

    def __init__(self, dim: int = 256):
        self.dim = dim

    def info(self) -> dict:
        return {"provider": self.name, "dim": self.dim}

    def embed(self, items: Sequence[tuple[str, str]]) -> list[Optional[EmbeddingVector]]:
        out: list[Optional[EmbeddingVector]] = []
        for source_id, text in items:
            counts = [0.0] * self.dim
            for token in text.lower().split():
                token = token.strip(".,;:!?()[]\"'")
                if not token:
                    continue
                digest = hashlib.md5(token.encode("utf-8")).digest()
                counts[int.from_bytes(digest[:8], "big") % self.dim] += 1.0
            norm = math.sqrt(math.fsum(c * c for c in counts))
            if norm == 0.0:
                out.append(EmbeddingVector(values=tuple(counts), source_id=source_id))
                continue
            out.append(
                EmbeddingVector(values=tuple(c / norm for c in counts), source_id=source_id)
            )
        return out


class VectorFileProvider:
    """Precomputed vectors: UTF-8 lines "id<TAB>v1,v2,...,vd"."""

    name = "file"

    def __init__(self, path: str):
        self.path = path
        self.dim = 0
        self._vectors: dict[str, tuple[float, ...]] = {}
        try:
            handle = open(path, encoding="utf-8")
        except OSError as exc:
            raise CorpusError(f"cannot read vector file {path}: {exc}") from exc
        with handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                key, _, payload = line.partition("\t")
                if not key or not payload:
                    raise CorpusError(f"{path}:{lineno}: expected 'id<TAB>v1,v2,...'")
                try:
                    values = tuple(float(x) for x in payload.split(","))
                except ValueError as exc:
                    raise CorpusError(f"{path}:{lineno}: bad vector component") from exc
                if any(not math.isfinite(x) for x in values):
                    raise CorpusError(f"{path}:{lineno}: non-finite vector component")
                if self.dim == 0:
                    self.dim = len(values)
                elif len(values) != self.dim:
                    raise CorpusError(
                        f"{path}:{lineno}: dimension {len(values)} != {self.dim}"
                    )
                self._vectors[key] = values

    def info(self) -> dict:
        return {"provider": self.name, "dim": self.dim, "vectors": len(self._vectors)}

    def embed(self, items: Sequence[tuple[str, str]]) -> list[Optional[EmbeddingVector]]:
        out: list[Optional[EmbeddingVector]] = []
        for source_id, _text in items:
            values = self._vectors.get(source_id)
            if values is None:
                out.append(None)
            else:
                out.append(EmbeddingVector(values=values, source_id=source_id))
        return out


class HttpProvider:
    """Remote embedding service speaking the documented /embed contract."""

    name = "url"

    def __init__(self, url: str, batch_size: int = 64, timeout: float = 30.0, retries: int = 2):
        self.url = url
        self.batch_size = batch_size
        self.timeout = timeout
        self.retries = retries
        self.dim: Optional[int] = None

    def info(self) -> dict:
        return {"provider": self.name, "url": self.url, "dim": self.dim}

    def _post(self, texts: list[str]) -> list[list[float]]:
        payload = json.dumps({"texts": texts}).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=payload, headers={"Content-Type": "application/json"}
        )
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as response:
                    body = json.loads(response.read().decode("utf-8"))
                vectors = body["vectors"]
                dim = int(body["dim"])
                if len(vectors) != len(texts):
                    raise ProviderError(
                        f"provider returned {len(vectors)} vectors for {len(texts)} texts"
                    )
                if self.dim is None:
                    self.dim = dim
                elif dim != self.dim:
                    raise ProviderError(f"provider dim changed: {dim} != {self.dim}")
                return vectors
            except (urllib.error.URLError, TimeoutError, ConnectionError) as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.2 * (attempt + 1))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ProviderError(f"malformed provider response: {exc}") from exc
        raise ProviderError(f"embedding service unreachable at {self.url}: {last_error}")

    def embed(self, items: Sequence[tuple[str, str]]) -> list[Optional[EmbeddingVector]]:
        out: list[Optional[EmbeddingVector]] = []
        for start in range(0, len(items), self.batch_size):
            chunk = items[start : start + self.batch_size]
            vectors = self._post([text for _sid, text in chunk])
            for (source_id, _text), values in zip(chunk, vectors):
                out.append(EmbeddingVector(values=tuple(values), source_id=source_id))
        return out


class CachingProvider:
    """Per-run cache keyed by source id, wrapped around any provider."""

    def __init__(self, inner):
        self.inner = inner
        self._cache: dict[str, Optional[EmbeddingVector]] = {}

    def info(self) -> dict:
        return self.inner.info()

    def embed(self, items: Sequence[tuple[str, str]]) -> list[Optional[EmbeddingVector]]:
        pending = [item for item in items if item[0] not in self._cache]
        if pending:
            seen: set[str] = set()
            unique = []
            for item in pending:
                if item[0] not in seen:
                    seen.add(item[0])
                    unique.append(item)
            for item, vector in zip(unique, self.inner.embed(unique)):
                self._cache[item[0]] = vector
        return [self._cache[source_id] for source_id, _ in items]


def make_provider(spec: str) -> CachingProvider:
    """Build a provider from a CLI spec: "test", "file:PATH", or "url:URL"."""
    if spec == "test":
        return CachingProvider(HashedBagOfWordsEmbedder())
    if spec.startswith("file:"):
        return CachingProvider(VectorFileProvider(spec[len("file:") :]))
    if spec.startswith("url:"):
        return CachingProvider(HttpProvider(spec[len("url:") :]))
    raise CorpusError(f"unknown embedding provider spec {spec!r}")


# --- pairwise relatedness -----------------------------------------------------


def textual_relatedness(
    target: TargetPaper, doc: CitingDocument, provider
) -> float | Missing:
    """Embedding cosine between title+abstract texts, or a reasoned Missing."""
    if not target.abstract.strip() or not doc.abstract.strip():
        return Missing(EMPTY_ABSTRACT)
    items = [
        (target.id, embedding_text(target.title, target.abstract)),
        (doc.id, embedding_text(doc.title, doc.abstract)),
    ]
    tv, dv = provider.embed(items)
    if tv is None or dv is None:
        return Missing(EMBEDDING_UNAVAILABLE)
    try:
        return cosine(tv, dv)
    except ZeroVectorError:
        return Missing(ZERO_VECTOR)


def coupling_set(
    doc: CitingDocument, target: TargetPaper, exclude_target: bool = True
) -> frozenset[str]:
    """The document's resolved cited-id set used for bibliographic coupling."""
    ids = {ref.cited_id for ref in doc.references if ref.cited_id is not None}
    if exclude_target:
        ids.discard(target.id)
    return frozenset(ids)


def reference_relatedness(
    target: TargetPaper, doc: CitingDocument, exclude_target: bool = True
) -> float | Missing:
    """Ochiai coefficient over shared cited references, or a reasoned Missing."""
    if not target.reference_ids:
        return Missing(MISSING_BASIS)
    doc_ids = coupling_set(doc, target, exclude_target)
    if not doc_ids:
        return Missing(NO_COUPLING_BASIS)
    return ochiai(target.reference_ids, doc_ids)


@dataclass(frozen=True, slots=True)
class RelatednessRow:
    group_key: int
    mean_textual: Optional[float]
    mean_bibliographic: Optional[float]
    n_textual: int
    n_bibliographic: int


class RelatednessAggregate:
    __slots__ = ("n_textual", "n_bibliographic", "textual", "bibliographic")

    def __init__(self) -> None:
        self.n_textual = 0
        self.n_bibliographic = 0
        self.textual = KahanSum()
        self.bibliographic = KahanSum()

    def add(self, textual: Optional[float], bibliographic: Optional[float]) -> None:
        if textual is not None:
            self.n_textual += 1
            self.textual.add(textual)
        if bibliographic is not None:
            self.n_bibliographic += 1
            self.bibliographic.add(bibliographic)

    def merge(self, other: "RelatednessAggregate") -> None:
        self.n_textual += other.n_textual
        self.n_bibliographic += other.n_bibliographic
        self.textual.merge(other.textual)
        self.bibliographic.merge(other.bibliographic)

    def row(self, group_key: int) -> Optional[RelatednessRow]:
        if self.n_textual == 0 and self.n_bibliographic == 0:
            return None
        return RelatednessRow(
            group_key=group_key,
            mean_textual=self.textual.value / self.n_textual if self.n_textual else None,
            mean_bibliographic=(
                self.bibliographic.value / self.n_bibliographic
                if self.n_bibliographic
                else None
            ),
            n_textual=self.n_textual,
            n_bibliographic=self.n_bibliographic,
        )


def relatedness_profile(records: Iterable[RelatednessRecord]) -> list[RelatednessRow]:
    groups: dict[int, RelatednessAggregate] = {}
    for record in records:
        groups.setdefault(record.citing_year, RelatednessAggregate()).add(
            record.textual, record.bibliographic
        )
    rows = []
    for key in sorted(groups):
        row = groups[key].row(key)
        if row is not None:
            rows.append(row)
    return rows
