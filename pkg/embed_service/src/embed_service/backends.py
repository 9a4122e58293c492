"""Embedding backends selected via the EMBED_SERVICE_MODEL environment variable.

Two kinds are supported:

- ``hash:<dim>`` — a dependency-free deterministic bag-of-words backend
  (md5 token hashing, raw counts, no normalization). Useful for tests and
  offline deployments.
- any other value — a Hugging Face model id loaded with ``transformers``,
  mean-pooled over the last hidden state. The default is a scientific-text
  encoder matching the corpus domain.

Vectors are emitted unnormalized; similarity consumers normalize.
"""

from __future__ import annotations

import hashlib
from typing import Protocol

DEFAULT_MODEL = "allenai/scibert_scivocab_uncased"


class Backend(Protocol):
    model_id: str
    dim: int
    pooling: str

    def embed(self, texts: list[str]) -> list[list[float]]: ...


class HashBackend:
    """Deterministic hashed bag-of-words; raw token counts, not normalized."""

    pooling = "bag-of-words-count"

    def __init__(self, dim: int = 384):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.model_id = f"hash-v1:{dim}"

    def embed(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            counts = [0.0] * self.dim
            for token in text.lower().split():
                token = token.strip(".,;:!?()[]\"'")
                if not token:
                    continue
                digest = hashlib.md5(token.encode("utf-8")).digest()
                counts[int.from_bytes(digest[:8], "big") % self.dim] += 1.0
            out.append(counts)
        return out


class TransformerBackend:
    """Mean-pooled transformer encoder; deterministic in eval mode."""

    pooling = "mean"

    def __init__(self, model_id: str = DEFAULT_MODEL):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self.model_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)

    def embed(self, texts: list[str]) -> list[list[float]]:
        torch = self._torch
        batch = self.tokenizer(
            texts, padding=True, truncation=True, max_length=512, return_tensors="pt"
        )
        with torch.no_grad():
            hidden = self.model(**batch).last_hidden_state
        mask = batch["attention_mask"].unsqueeze(-1).float()
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
        return [[float(x) for x in row] for row in pooled]


def build_backend(spec: str | None) -> Backend:
    spec = (spec or DEFAULT_MODEL).strip()
    if spec.startswith("hash:"):
        return HashBackend(dim=int(spec.split(":", 1)[1]))
    if spec == "hash":
        return HashBackend()
    return TransformerBackend(spec)
