class SearchError(Exception):
    """Base class for operational failures (bad index, unreadable corpus)."""


class BuildError(SearchError):
    """Index construction failed."""


class IndexFormatError(SearchError):
    """On-disk index is missing pieces or does not decode."""


class QueryError(ValueError):
    """The query string itself is unusable (empty, too long)."""


class UnsupportedQueryError(QueryError):
    """The query is well formed but no index family can evaluate it."""
