"""Brute-force reference searcher over raw lemmatized documents.

Implements the engine's published match semantics directly from token
streams: no posting lists, no heaps, no NSW records. It shares only the
lexicon and the key-selection rules (those define *what* must match);
anchor computation and window scanning are reimplemented here so that a
disagreement between the two paths points at a real bug. Runtime is
proportional to corpus size and is only meant for desk-scale corpora.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .engine import (
    QueryType,
    SubQuery,
    classify_query,
    select_three_keys,
    select_two_keys,
)
from .lexicon import FlList, LemmaClass, LemmaDictionary


@dataclass(frozen=True)
class OracleHit:
    """One matched document with the positions that satisfied the query.

    ``witness`` maps query positions to document positions; ``anchors``
    are the per-source anchor positions of the satisfying selection.
    """

    doc_id: int
    witness: tuple[tuple[int, int], ...]
    anchors: tuple[int, ...]


class _Source:
    """One constraint of a sub-query: anchor positions plus witness info."""

    def __init__(self, positions, slot_query_positions, satellite_lists):
        self.positions = positions
        self.slot_query_positions = slot_query_positions
        self.satellite_lists = satellite_lists


class OracleSearcher:
    """Exhaustive searcher over an in-memory tokenized corpus."""

    def __init__(
        self,
        documents: Sequence[Sequence[str]],
        dictionary: LemmaDictionary,
        fl_list: FlList,
    ) -> None:
        self.fl_list = fl_list
        self.doc_lengths = [len(doc) for doc in documents]
        self._positions: list[dict[str, list[int]]] = []
        for words in documents:
            table: dict[str, list[int]] = {}
            for pos, word in enumerate(words):
                for lemma in dictionary.lemmatize(word):
                    table.setdefault(lemma, []).append(pos)
            self._positions.append(table)
        self._docs_with: dict[str, list[int]] = {}
        self._anchor_cache: dict = {}

    def _lemma_docs(self, lemma: str) -> list[int]:
        docs = self._docs_with.get(lemma)
        if docs is None:
            docs = [
                doc_id
                for doc_id, table in enumerate(self._positions)
                if lemma in table
            ]
            self._docs_with[lemma] = docs
        return docs

    def search(self, sub: SubQuery, max_distance: int) -> list[OracleHit]:
        """All documents matching the sub-query, with witnesses."""
        query_type = classify_query(sub)
        if query_type is QueryType.QT1:
            sources = self._key_sources(sub, select_three_keys(sub), max_distance)
        elif query_type is QueryType.QT2:
            if len(sub.terms) == 1:
                sources = self._lemma_sources(sub.terms)
            else:
                sources = self._key_sources(
                    sub, select_two_keys(sub.terms), max_distance
                )
        elif query_type is QueryType.QT3:
            sources = self._lemma_sources(sub.terms)
        elif query_type is QueryType.QT4:
            frequent = [
                t for t in sub.terms if t.lemma_class is LemmaClass.FREQUENTLY_USED
            ]
            ordinary = [t for t in sub.terms if t.lemma_class is LemmaClass.ORDINARY]
            if len(frequent) < 2:
                sources = self._lemma_sources(sub.terms)
            else:
                sources = self._key_sources(
                    sub, select_two_keys(frequent), max_distance
                ) + self._lemma_sources(ordinary)
        else:
            non_stop = [t for t in sub.terms if t.lemma_class is not LemmaClass.STOP]
            sources = self._lemma_sources(non_stop)
        stop_terms = (
            [t for t in sub.terms if t.lemma_class is LemmaClass.STOP]
            if query_type is QueryType.QT5
            else []
        )

        hits: list[OracleHit] = []
        for doc_id in range(len(self._positions)):
            per_source = []
            for source in sources:
                positions = source.positions.get(doc_id)
                if not positions:
                    per_source = None
                    break
                per_source.append(positions)
            if per_source is None:
                continue
            for lo, hi, selection in _tight_windows(per_source):
                if hi - lo > max_distance:
                    continue
                witness = self._build_witness(
                    doc_id, sources, selection, max_distance
                )
                if stop_terms:
                    extra = self._confirm_stops(
                        doc_id, stop_terms, per_source, lo, hi, max_distance
                    )
                    if extra is None:
                        continue
                    witness.update(extra)
                hits.append(
                    OracleHit(
                        doc_id,
                        tuple(sorted(witness.items())),
                        tuple(sorted(selection)),
                    )
                )
        hits.sort(key=lambda h: (h.doc_id, min(p for _, p in h.witness), h.anchors))
        return hits

    # -- source construction ---------------------------------------------

    def _lemma_sources(self, terms) -> list[_Source]:
        sources = []
        seen: dict[str, list[int]] = {}
        for term in terms:
            seen.setdefault(term.lemma, []).append(term.position)
        for lemma, query_positions in seen.items():
            positions = {
                doc_id: self._positions[doc_id][lemma]
                for doc_id in self._lemma_docs(lemma)
            }
            sources.append(_Source(positions, tuple(query_positions), None))
        return sources

    def _key_sources(self, sub, selections, max_distance) -> list[_Source]:
        sources = []
        for selection in selections:
            lemmas = tuple(sub.terms[q].lemma for q in selection.query_positions)
            cache_key = (max_distance, lemmas)
            anchors = self._anchor_cache.get(cache_key)
            if anchors is None:
                anchors = self._compute_anchors(lemmas, max_distance)
                self._anchor_cache[cache_key] = anchors
            sources.append(
                _Source(anchors, selection.query_positions, lemmas[1:])
            )
        return sources

    def _compute_anchors(self, lemmas, max_distance) -> dict[int, list[int]]:
        """Anchor positions per document for one composite key.

        The first lemma anchors; each remaining lemma must occur within
        ``max_distance`` of the anchor, all occurrences at pairwise
        distinct positions.
        """
        anchor_lemma, satellites = lemmas[0], lemmas[1:]
        anchors: dict[int, list[int]] = {}
        for doc_id in self._lemma_docs(anchor_lemma):
            table = self._positions[doc_id]
            satellite_lists = []
            for lemma in satellites:
                positions = table.get(lemma)
                if positions is None:
                    satellite_lists = None
                    break
                satellite_lists.append(positions)
            if satellite_lists is None:
                continue
            found = [
                pos
                for pos in table[anchor_lemma]
                if _satellites_near(pos, satellite_lists, max_distance) is not None
            ]
            if found:
                anchors[doc_id] = found
        return anchors

    # -- witnesses ----------------------------------------------------------

    def _build_witness(self, doc_id, sources, selection, max_distance) -> dict:
        witness: dict[int, int] = {}
        table = self._positions[doc_id]
        for source, anchor in zip(sources, selection):
            if source.satellite_lists is None:
                for qpos in source.slot_query_positions:
                    witness[qpos] = anchor
                continue
            witness[source.slot_query_positions[0]] = anchor
            satellite_lists = [table[lemma] for lemma in source.satellite_lists]
            found = _satellites_near(anchor, satellite_lists, max_distance)
            for qpos, position in zip(source.slot_query_positions[1:], found):
                witness[qpos] = position
        return witness

    def _confirm_stops(
        self, doc_id, stop_terms, per_source, lo, hi, max_distance
    ) -> dict | None:
        """Stop lemmas must occur near some window posting, off-position."""
        table = self._positions[doc_id]
        window_positions = sorted(
            pos
            for positions in per_source
            for pos in positions[
                bisect_left(positions, lo) : bisect_right(positions, hi)
            ]
        )
        witness: dict[int, int] = {}
        for term in stop_terms:
            positions = table.get(term.lemma)
            if not positions:
                return None
            found = None
            for q in positions[
                bisect_left(positions, lo - max_distance) : bisect_right(
                    positions, hi + max_distance
                )
            ]:
                if any(q != p and abs(q - p) <= max_distance for p in window_positions):
                    found = q
                    break
            if found is None:
                return None
            witness[term.position] = found
        return witness


def _satellites_near(pos, satellite_lists, max_distance):
    """Distinct-position satellite occurrences near ``pos``, or None.

    Returns one chosen occurrence per satellite when every satellite can
    claim its own position (none on the anchor, no sharing).
    """
    candidates = []
    for positions in satellite_lists:
        lo = bisect_left(positions, pos - max_distance)
        hi = bisect_right(positions, pos + max_distance)
        nearby = [q for q in positions[lo:hi] if q != pos]
        if not nearby:
            return None
        candidates.append(nearby)
    if len(candidates) == 1:
        return (candidates[0][0],)
    first, second = candidates
    for p1 in first:
        for p2 in second:
            if p1 != p2:
                return (p1, p2)
    return None


def _tight_windows(per_source: Sequence[Sequence[int]]):
    """Minimal covering windows over per-source sorted position lists.

    For every achievable left edge the tightest selection is built by
    taking each source's first position at or after the edge; windows
    whose right edge repeats are superseded by the later (tighter) left
    edge. Yields (left, right, selection) triples.
    """
    edges = sorted({pos for positions in per_source for pos in positions})
    windows: list[tuple[int, int, tuple[int, ...]]] = []
    for edge in edges:
        selection = []
        for positions in per_source:
            idx = bisect_left(positions, edge)
            if idx == len(positions):
                selection = None
                break
            selection.append(positions[idx])
        if selection is None:
            break
        if min(selection) != edge:
            continue
        right = max(selection)
        if windows and windows[-1][1] == right:
            windows.pop()
        windows.append((edge, right, tuple(selection)))
    return windows
