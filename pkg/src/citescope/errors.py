"""Exception types raised by the analysis toolkit."""


class CitescopeError(Exception):
    """Base class for all toolkit errors."""


class CorpusError(CitescopeError):
    """Unreadable or structurally unusable corpus / target / lexicon input."""


class EmptyBodyError(CitescopeError):
    """Positional metric requested for a document with no body characters."""


class InvalidProgressionError(CitescopeError):
    """Progression value outside [0, 1]."""


class UnknownReferenceError(CitescopeError):
    """Reference key not present in the document's reference list."""


class ZeroVectorError(CitescopeError):
    """Cosine similarity requested for a zero-length vector."""


class EmptyReferenceSetError(CitescopeError):
    """Ochiai coefficient requested for an empty identifier set."""


class EmptyAnalysisError(CitescopeError):
    """An analysis run produced no records at all."""


class ProviderError(CitescopeError):
    """Embedding provider failure (transport errors are retried first)."""


class ScenarioError(CitescopeError):
    """Invalid synthetic-corpus scenario; message carries the field path."""
