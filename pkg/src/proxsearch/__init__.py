"""Proximity full-text search with composite-key indexes.

Indexes a corpus so that queries made of very frequent words resolve
against small co-occurrence posting lists instead of scanning the huge
per-word lists, while rarer words use ordinary positional postings.
"""

from .builder import MODE_FULL, MODE_IDX1, TextCorpus, build_index, canonical_key
from .engine import (
    QueryType,
    SearchEngine,
    SubQuery,
    classify_query,
    combine_results,
    expand_subqueries,
    select_three_keys,
    select_two_keys,
)
from .errors import (
    BuildError,
    IndexFormatError,
    QueryError,
    SearchError,
    UnsupportedQueryError,
)
from .index import Index
from .lexicon import (
    RARE,
    FlList,
    LemmaClass,
    LemmaDictionary,
    LemmaEntry,
    LexiconConfig,
    Token,
    tokenize,
)
from .merge import DualHeap, Fragment, MergeSession, PostingIterator, equalize
from .oracle import OracleHit, OracleSearcher
from .storage import Posting

__version__ = "0.1.0"

__all__ = [
    "BuildError",
    "DualHeap",
    "FlList",
    "Fragment",
    "Index",
    "IndexFormatError",
    "LemmaClass",
    "LemmaDictionary",
    "LemmaEntry",
    "LexiconConfig",
    "MergeSession",
    "MODE_FULL",
    "MODE_IDX1",
    "OracleHit",
    "OracleSearcher",
    "Posting",
    "PostingIterator",
    "QueryError",
    "QueryType",
    "RARE",
    "SearchEngine",
    "SearchError",
    "SubQuery",
    "TextCorpus",
    "Token",
    "UnsupportedQueryError",
    "build_index",
    "canonical_key",
    "classify_query",
    "combine_results",
    "equalize",
    "expand_subqueries",
    "select_three_keys",
    "select_two_keys",
    "tokenize",
]
