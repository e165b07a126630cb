"""Query pipeline: lemmatize, expand, classify, select keys, evaluate.

A query expands into one sub-query per combination of its words' lemma
alternatives. Each sub-query is classified by the lemma-class mix of its
terms, which decides the index families used to evaluate it:

* all stop lemmas        -> three-component key index
* all frequently used    -> two-component key index
* all ordinary           -> positional index, NSW stream untouched
* frequent + ordinary    -> two-component keys plus positional index
* any stop + any other   -> positional index with NSW confirmation of the
                            stop lemmas

Match semantics, shared with the brute-force reference searcher: a
document matches when every selected source (key or lemma) contributes an
anchor and some choice of one anchor per source spans at most
``max_distance`` positions. Repeated non-stop lemmas in a query are
deduplicated (existence semantics); repeated stop lemmas are real
constraints because composite keys demand distinct occurrences. Stop
lemmas of a mixed query must occur within ``max_distance`` of one of the
window's postings, at a different position. Against a plain positional
("idx1") index the same semantics are computed by deriving each key's
anchors from the raw posting lists at query time.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .builder import canonical_key
from .errors import QueryError, UnsupportedQueryError
from .index import Index
from .lexicon import FlList, LemmaClass, LemmaDictionary, tokenize
from .merge import Fragment, MergeSession, PostingIterator
from .storage import Posting

MAX_QUERY_WORDS = 9


class QueryType(enum.Enum):
    QT1 = "QT1"
    QT2 = "QT2"
    QT3 = "QT3"
    QT4 = "QT4"
    QT5 = "QT5"


@dataclass(frozen=True)
class QueryTerm:
    position: int
    lemma: str
    fl_number: int
    lemma_class: LemmaClass


@dataclass(frozen=True)
class SubQuery:
    """One lemma choice per query word, in query order."""

    terms: tuple[QueryTerm, ...]

    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.terms]


@dataclass(frozen=True)
class SelectedKey:
    """A composite key plus the query positions its components stand for.

    ``query_positions`` is parallel to ``key``: slot i of the key covers
    the query word at ``query_positions[i]``.
    """

    key: tuple[int, ...]
    query_positions: tuple[int, ...]

    @property
    def anchor_fl(self) -> int:
        return self.key[0]


def expand_subqueries(
    query: str, dictionary: LemmaDictionary, fl_list: FlList
) -> list[SubQuery]:
    """Cartesian product of per-word lemma alternatives.

    The first word's alternatives vary slowest, so the sub-query built
    entirely from first alternatives comes first.
    """
    words = [token.text for token in tokenize(query)]
    if not words:
        raise QueryError("query contains no words")
    if len(words) > MAX_QUERY_WORDS:
        raise QueryError(
            f"query has {len(words)} words; the limit is {MAX_QUERY_WORDS}, "
            "divide it into parts"
        )
    alternatives = [dictionary.lemmatize(word) for word in words]
    subqueries = []
    for combo in product(*alternatives):
        terms = []
        for position, lemma in enumerate(combo):
            entry = fl_list.classify(lemma)
            terms.append(
                QueryTerm(position, lemma, entry.fl_number, entry.lemma_class)
            )
        subqueries.append(SubQuery(tuple(terms)))
    return subqueries


def classify_query(sub: SubQuery) -> QueryType:
    classes = {term.lemma_class for term in sub.terms}
    if classes == {LemmaClass.STOP}:
        return QueryType.QT1
    if classes == {LemmaClass.FREQUENTLY_USED}:
        return QueryType.QT2
    if classes == {LemmaClass.ORDINARY}:
        return QueryType.QT3
    if LemmaClass.STOP in classes:
        return QueryType.QT5
    return QueryType.QT4


def _window_key(terms: Sequence[QueryTerm]) -> SelectedKey:
    ordered = sorted(terms, key=lambda t: (t.fl_number, t.position))
    key, _ = canonical_key([t.fl_number for t in ordered])
    return SelectedKey(key, tuple(t.position for t in ordered))


def select_three_keys(sub: SubQuery) -> list[SelectedKey]:
    """Width-3 windows over the query terms, two positions apart.

    Windows start at 0, 2, 4, ...; when the term count is even the last
    window wraps around to the first term, so every position is covered.
    Duplicate keys covering the same positions are merged.
    """
    n = len(sub.terms)
    if n < 3:
        raise UnsupportedQueryError(
            "stop-lemma-only queries need at least 3 words; "
            f"got {n}, and shorter ones have no composite index"
        )
    windows = [(start, start + 1, start + 2) for start in range(0, n - 2, 2)]
    if n % 2 == 0:
        windows.append((n - 2, n - 1, 0))
    selected = []
    seen = set()
    for window in windows:
        selection = _window_key([sub.terms[i] for i in window])
        marker = (selection.key, selection.query_positions)
        if marker not in seen:
            seen.add(marker)
            selected.append(selection)
    return selected


def select_two_keys(terms: Sequence[QueryTerm]) -> list[SelectedKey]:
    """Consecutive pairs over the given terms (at least two)."""
    return _dedupe(
        _window_key(pair) for pair in zip(terms, terms[1:])
    )


def _dedupe(selections: Iterable[SelectedKey]) -> list[SelectedKey]:
    out = []
    seen = set()
    for selection in selections:
        marker = (selection.key, selection.query_positions)
        if marker not in seen:
            seen.add(marker)
            out.append(selection)
    return out


def combine_results(fragment_lists: Iterable[Sequence[Fragment]]) -> list[Fragment]:
    """Union of per-sub-query fragments, ranked by relevance.

    Duplicate (doc, start, end) windows keep their best relevance; ties
    order by (doc_id, start).
    """
    best: dict[tuple[int, int, int], Fragment] = {}
    for fragments in fragment_lists:
        for fragment in fragments:
            slot = (fragment.doc_id, fragment.start, fragment.end)
            kept = best.get(slot)
            if kept is None or fragment.relevance > kept.relevance:
                best[slot] = fragment
    return sorted(
        best.values(), key=lambda f: (-f.relevance, f.doc_id, f.start)
    )


class SearchEngine:
    """Evaluates queries against one opened index."""

    def __init__(self, index: Index, dictionary: LemmaDictionary | None = None):
        self.index = index
        self.dictionary = dictionary or index.dictionary
        self.fl_list = index.fl_list
        self.max_distance = index.config.max_distance

    def search(self, query: str) -> list[Fragment]:
        """Run the full pipeline and return ranked fragments.

        Sub-queries no index family supports are skipped; if none are
        supported the error is raised instead of silently returning
        nothing.
        """
        subqueries = expand_subqueries(query, self.dictionary, self.fl_list)
        results = []
        unsupported: UnsupportedQueryError | None = None
        for sub in subqueries:
            try:
                results.append(self.evaluate(sub))
            except UnsupportedQueryError as exc:
                unsupported = exc
        if not results and unsupported is not None:
            raise unsupported
        return combine_results(results)

    def evaluate(self, sub: SubQuery) -> list[Fragment]:
        """Dispatch a sub-query to its index family and collect fragments."""
        query_type = classify_query(sub)
        idx1 = self.index.mode == "idx1"
        if query_type is QueryType.QT1:
            fragments = self._eval_stop_only(sub, idx1)
        elif query_type is QueryType.QT2:
            fragments = self._eval_frequent_only(sub, idx1)
        elif query_type is QueryType.QT3:
            fragments = self._eval_lemma_sources(sub.terms, with_nsw=False)
        elif query_type is QueryType.QT4:
            fragments = self._eval_mixed_no_stop(sub, idx1)
        else:
            fragments = self._eval_with_stop(sub, idx1)
        return sorted(fragments, key=lambda f: (f.doc_id, f.start))

    # -- source construction -------------------------------------------------

    def _run(self, iterators, window_filter=None) -> list[Fragment]:
        session = MergeSession(iterators, self.max_distance, self.index.doc_lengths)
        return session.run(window_filter)

    def _eval_stop_only(self, sub: SubQuery, idx1: bool) -> list[Fragment]:
        selections = select_three_keys(sub)
        if idx1:
            return self._eval_derived(sub, selections)
        iterators = []
        for selection in selections:
            source = self.index.three_key_postings(selection.key)
            if source is None:
                return []
            iterators.append(PostingIterator(selection.key, source))
        return self._run(iterators)

    def _eval_frequent_only(self, sub: SubQuery, idx1: bool) -> list[Fragment]:
        if len(sub.terms) == 1:
            return self._eval_lemma_sources(sub.terms, with_nsw=False)
        selections = select_two_keys(sub.terms)
        if idx1:
            return self._eval_derived(sub, selections)
        iterators = []
        for selection in selections:
            source = self.index.two_key_postings(selection.key)
            if source is None:
                return []
            iterators.append(PostingIterator(selection.key, source))
        return self._run(iterators)

    def _eval_lemma_sources(
        self,
        terms: Sequence[QueryTerm],
        with_nsw: bool,
        extra_iterators: Sequence[PostingIterator] = (),
        window_filter=None,
    ) -> list[Fragment]:
        iterators = list(extra_iterators)
        for lemma in dict.fromkeys(t.lemma for t in terms):
            source = self.index.ordinary_postings(lemma, with_nsw=with_nsw)
            if source is None:
                return []
            iterators.append(PostingIterator(lemma, source))
        if not iterators:
            return []
        return self._run(iterators, window_filter)

    def _eval_mixed_no_stop(self, sub: SubQuery, idx1: bool) -> list[Fragment]:
        frequent = [t for t in sub.terms if t.lemma_class is LemmaClass.FREQUENTLY_USED]
        ordinary = [t for t in sub.terms if t.lemma_class is LemmaClass.ORDINARY]
        if len(frequent) < 2:
            return self._eval_lemma_sources(sub.terms, with_nsw=False)
        selections = select_two_keys(frequent)
        if idx1:
            pair_iterators = self._derived_iterators(sub, selections)
        else:
            pair_iterators = []
            for selection in selections:
                source = self.index.two_key_postings(selection.key)
                if source is None:
                    return []
                pair_iterators.append(PostingIterator(selection.key, source))
        if pair_iterators is None:
            return []
        return self._eval_lemma_sources(
            ordinary, with_nsw=False, extra_iterators=pair_iterators
        )

    def _eval_with_stop(self, sub: SubQuery, idx1: bool) -> list[Fragment]:
        non_stop = [t for t in sub.terms if t.lemma_class is not LemmaClass.STOP]
        stop_fls = sorted({t.fl_number for t in sub.terms if t.lemma_class is LemmaClass.STOP})
        if idx1:
            window_filter = self._positional_stop_filter(sub, stop_fls)
            return self._eval_lemma_sources(
                non_stop, with_nsw=False, window_filter=window_filter
            )

        def nsw_filter(doc_id: int, window_events) -> bool:
            present = set()
            for _, _, pairs in window_events:
                for fl, _ in pairs:
                    present.add(fl)
            return all(fl in present for fl in stop_fls)

        return self._eval_lemma_sources(
            non_stop, with_nsw=True, window_filter=nsw_filter
        )

    # -- idx1: anchors derived from raw posting lists -------------------------

    def _eval_derived(self, sub: SubQuery, selections) -> list[Fragment]:
        iterators = self._derived_iterators(sub, selections)
        if iterators is None:
            return []
        return self._run(iterators)

    def _derived_iterators(self, sub, selections) -> list[PostingIterator] | None:
        """One in-memory anchor iterator per composite key.

        Reads the full raw posting list of every distinct lemma involved
        (once per sub-query), then recomputes each key's anchor
        occurrences, exactly what the composite index stores.
        """
        maps: dict[str, dict[int, list[int]]] = {}
        for selection in selections:
            for qpos in selection.query_positions:
                lemma = sub.terms[qpos].lemma
                if lemma not in maps:
                    by_doc = self._doc_positions(lemma)
                    if by_doc is None:
                        return None
                    maps[lemma] = by_doc
        iterators = []
        for selection in selections:
            lemmas = [sub.terms[qpos].lemma for qpos in selection.query_positions]
            anchors = derive_anchor_postings(
                [maps[lemma] for lemma in lemmas], self.max_distance
            )
            if not anchors:
                return None
            iterators.append(
                PostingIterator(selection.key, ((p, None) for p in anchors))
            )
        return iterators

    def _doc_positions(self, lemma: str) -> dict[int, list[int]] | None:
        source = self.index.ordinary_postings(lemma)
        if source is None:
            return None
        by_doc: dict[int, list[int]] = {}
        for posting, _ in source:
            by_doc.setdefault(posting.doc_id, []).append(posting.pos)
        return by_doc

    def _positional_stop_filter(self, sub: SubQuery, stop_fls: Sequence[int]):
        stop_lemmas = {
            t.fl_number: t.lemma
            for t in sub.terms
            if t.lemma_class is LemmaClass.STOP
        }
        stop_maps = {}
        for fl in stop_fls:
            by_doc = self._doc_positions(stop_lemmas[fl])
            stop_maps[fl] = by_doc or {}
        md = self.max_distance

        def window_filter(doc_id: int, window_events) -> bool:
            window_positions = [pos for pos, _, _ in window_events]
            for fl in stop_fls:
                positions = stop_maps[fl].get(doc_id)
                if not positions:
                    return False
                lo = bisect_left(positions, window_positions[0] - md)
                hi = bisect_right(positions, window_positions[-1] + md)
                if not any(
                    q != p and abs(q - p) <= md
                    for q in positions[lo:hi]
                    for p in window_positions
                ):
                    return False
            return True

        return window_filter


def derive_anchor_postings(
    position_maps: Sequence[dict[int, list[int]]], max_distance: int
) -> list[Posting]:
    """Anchor postings of a composite key from raw per-lemma positions.

    ``position_maps`` lists doc -> sorted positions for the anchor lemma
    first, then each satellite. An anchor occurrence qualifies when every
    satellite has an occurrence within ``max_distance``, all at pairwise
    distinct positions (one word occurrence cannot fill two key slots).
    """
    anchor_map = position_maps[0]
    satellites = position_maps[1:]
    postings = []
    for doc_id in sorted(anchor_map):
        satellite_positions = []
        for satellite in satellites:
            positions = satellite.get(doc_id)
            if positions is None:
                satellite_positions = None
                break
            satellite_positions.append(positions)
        if satellite_positions is None:
            continue
        for pos in anchor_map[doc_id]:
            if anchor_satisfied(pos, satellite_positions, max_distance):
                postings.append(Posting(doc_id, pos))
    return postings


def anchor_satisfied(
    pos: int, satellite_positions: Sequence[Sequence[int]], max_distance: int
) -> bool:
    """Can each satellite claim its own occurrence near ``pos``?

    Occurrences must lie within ``max_distance`` of the anchor, must not
    sit on the anchor's position, and two satellites cannot share one
    position. Handles one satellite (pair keys) and two (triple keys,
    including the repeated-lemma case where both satellites read the
    same list).
    """
    candidates = []
    for positions in satellite_positions:
        lo = bisect_left(positions, pos - max_distance)
        hi = bisect_right(positions, pos + max_distance)
        nearby = [q for q in positions[lo:hi] if q != pos]
        if not nearby:
            return False
        candidates.append(nearby)
    if len(candidates) == 1:
        return True
    first, second = candidates
    # A distinct pair exists unless both choices collapse to one shared spot.
    return not (len(first) == 1 and len(second) == 1 and first[0] == second[0])
