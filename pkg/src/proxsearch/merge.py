"""Multi-way posting list intersection on paired binary heaps.

One iterator per selected key reads its posting list in increasing
(doc_id, pos) order. All iterators sit in two 1-indexed array heaps at
once: a min-heap ordered by ascending current doc id and a max-heap
ordered descending. Each iterator carries its own slot number in both
arrays (``min_index``/``max_index``), maintained on every swap, so after
advancing the minimum iterator both heaps are repaired in O(log n)
without searching. The two tops agree exactly when every iterator stands
on the same document.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .storage import Posting


@dataclass(frozen=True)
class Fragment:
    """One search hit: a document window [start, end] with a relevance score."""

    doc_id: int
    start: int
    end: int
    relevance: float


class PostingIterator:
    """Cursor over one posting source, with back-links into both heaps.

    ``source`` yields (posting, payload) pairs; the payload carries the
    decoded NSW record when the caller asked for it, else None. The first
    record is loaded on construction.
    """

    __slots__ = ("key", "value", "payload", "min_index", "max_index", "exhausted",
                 "next_calls", "_source")

    def __init__(self, key, source: Iterator[tuple[Posting, tuple | None]]) -> None:
        self.key = key
        self._source = source
        self.value: Posting | None = None
        self.payload = None
        self.min_index = 0
        self.max_index = 0
        self.exhausted = False
        self.next_calls = 0
        self.next()

    def next(self) -> bool:
        """Advance to the next posting; False once the list is exhausted."""
        try:
            self.value, self.payload = next(self._source)
        except StopIteration:
            self.exhausted = True
            self.value = None
            self.payload = None
            return False
        self.next_calls += 1
        return True


class DualHeap:
    """A 1-indexed binary heap of posting iterators.

    ``orientation`` is "min" (ascending doc id) or "max" (descending).
    Every move of an iterator inside the array writes its new slot back
    into the iterator's ``min_index`` or ``max_index`` field, matching
    the orientation.
    """

    def __init__(self, capacity: int, orientation: str) -> None:
        if orientation not in ("min", "max"):
            raise ValueError(f"bad heap orientation {orientation!r}")
        self.capacity = capacity
        self.orientation = orientation
        self.heap: list[PostingIterator | None] = [None] * (capacity + 1)
        self.count = 0
        self.comparisons = 0
        self._descending = orientation == "max"
        self._back = "max_index" if self._descending else "min_index"

    def _less(self, a: PostingIterator, b: PostingIterator) -> bool:
        self.comparisons += 1
        if self._descending:
            return a.value.doc_id > b.value.doc_id
        return a.value.doc_id < b.value.doc_id

    def _place(self, slot: int, it: PostingIterator) -> None:
        self.heap[slot] = it
        setattr(it, self._back, slot)

    def insert(self, it: PostingIterator) -> None:
        if self.count >= self.capacity:
            raise ValueError("heap capacity exceeded")
        self.count += 1
        self._place(self.count, it)
        self._sift_up(self.count)

    def get_min(self) -> PostingIterator:
        """The top element under this orientation's order, in O(1)."""
        if self.count == 0:
            raise ValueError("heap is empty")
        return self.heap[1]

    def update(self, slot: int) -> None:
        """Restore the heap property after the value at ``slot`` changed."""
        if not 1 <= slot <= self.count:
            raise ValueError(f"heap slot {slot} out of range 1..{self.count}")
        if slot > 1 and self._less(self.heap[slot], self.heap[slot // 2]):
            self._sift_up(slot)
        else:
            self._sift_down(slot)

    def clear(self) -> None:
        self.heap = [None] * (self.capacity + 1)
        self.count = 0

    def _sift_up(self, slot: int) -> None:
        while slot > 1 and self._less(self.heap[slot], self.heap[slot // 2]):
            child, parent = self.heap[slot], self.heap[slot // 2]
            self._place(slot // 2, child)
            self._place(slot, parent)
            slot //= 2

    def _sift_down(self, slot: int) -> None:
        while True:
            best = slot
            left, right = slot * 2, slot * 2 + 1
            if left <= self.count and self._less(self.heap[left], self.heap[best]):
                best = left
            if right <= self.count and self._less(self.heap[right], self.heap[best]):
                best = right
            if best == slot:
                return
            moving, other = self.heap[slot], self.heap[best]
            self._place(best, moving)
            self._place(slot, other)
            slot = best


def equalize(min_heap: DualHeap, max_heap: DualHeap) -> int | None:
    """Advance iterators until all stand on one document id.

    Returns that id, or None when any iterator ran out (an empty
    intersection from here on). Only the minimum iterator is ever
    advanced, and each loop iteration costs O(log n).
    """
    while True:
        top = min_heap.get_min()
        if top.value.doc_id == max_heap.get_min().value.doc_id:
            return top.value.doc_id
        if not top.next():
            return None
        min_heap.update(top.min_index)
        max_heap.update(top.max_index)


def minimal_windows(events: Sequence[tuple], source_count: int) -> list[tuple[int, int]]:
    """Index ranges of minimal windows covering all sources.

    ``events`` is (pos, source, payload) sorted by position. A window is
    minimal when no strictly smaller sub-window still covers every
    source; returned (lo, hi) pairs index into ``events`` and none
    contains another.
    """
    found: list[tuple[int, int]] = []
    counts = [0] * source_count
    covered = 0
    lo = 0
    for hi, (_, src, _) in enumerate(events):
        if counts[src] == 0:
            covered += 1
        counts[src] += 1
        if covered < source_count:
            continue
        while counts[events[lo][1]] > 1:
            counts[events[lo][1]] -= 1
            lo += 1
        # Left/right edges are non-decreasing, so containment between
        # candidates only happens through an equal edge position: an equal
        # left edge means the earlier window was tighter, an equal right
        # edge means it was looser.
        left_pos, right_pos = events[lo][0], events[hi][0]
        if not (found and events[found[-1][0]][0] == left_pos):
            if found and events[found[-1][1]][0] == right_pos:
                found.pop()
            found.append((lo, hi))
        counts[events[lo][1]] -= 1
        covered -= 1
        lo += 1
    return found


class MergeSession:
    """Drives one sub-query's intersection over its selected iterators."""

    def __init__(
        self,
        iterators: Sequence[PostingIterator],
        max_distance: int,
        doc_lengths: Sequence[int],
    ) -> None:
        if not iterators:
            raise ValueError("a merge session needs at least one iterator")
        self.iterators = list(iterators)
        self.max_distance = max_distance
        self.doc_lengths = doc_lengths
        self._done = any(it.exhausted for it in self.iterators)
        self.min_heap = DualHeap(len(iterators), "min")
        self.max_heap = DualHeap(len(iterators), "max")
        if not self._done:
            self._register()

    def _register(self) -> None:
        self.min_heap.clear()
        self.max_heap.clear()
        for it in self.iterators:
            self.min_heap.insert(it)
            self.max_heap.insert(it)

    @property
    def next_calls(self) -> int:
        return sum(it.next_calls for it in self.iterators)

    @property
    def comparisons(self) -> int:
        return self.min_heap.comparisons + self.max_heap.comparisons

    def next_match(self) -> int | None:
        """Next document on which every iterator stands, or None."""
        if self._done:
            return None
        doc = equalize(self.min_heap, self.max_heap)
        if doc is None:
            self._done = True
        return doc

    def drain(self, doc_id: int) -> list[tuple[list[int], list]]:
        """Collect all postings of ``doc_id`` from every iterator.

        Afterwards each iterator stands on its first posting beyond the
        document. The document is fully drained even if an iterator
        exhausts along the way, so its matches are not lost.
        """
        collected = []
        for it in self.iterators:
            positions: list[int] = []
            payloads: list = []
            while not it.exhausted and it.value.doc_id == doc_id:
                positions.append(it.value.pos)
                payloads.append(it.payload)
                it.next()
            collected.append((positions, payloads))
        if any(it.exhausted for it in self.iterators):
            self._done = True
        else:
            self._register()
        return collected

    def run(self, window_filter: Callable | None = None) -> list[Fragment]:
        """Full two-level loop: align documents, then match inside each.

        ``window_filter(doc_id, window_events)`` may veto a candidate
        window (used for near-stop-word confirmation).
        """
        fragments: list[Fragment] = []
        while (doc := self.next_match()) is not None:
            sources = self.drain(doc)
            fragments.extend(
                match_in_document(
                    doc, sources, self.max_distance, self.doc_lengths, window_filter
                )
            )
        return fragments


def match_in_document(
    doc_id: int,
    sources: Sequence[tuple[list[int], list]],
    max_distance: int,
    doc_lengths: Sequence[int],
    window_filter: Callable | None = None,
) -> list[Fragment]:
    """Fragments for one document from per-source anchor positions.

    A fragment is emitted for every minimal window whose anchors span at
    most ``max_distance``; it starts at the window's first anchor and is
    extended right by ``max_distance`` (clamped to the document end) to
    cover satellite lemmas. Relevance is the inverse fragment length, so
    tighter matches rank higher.
    """
    events = sorted(
        (
            (pos, src, payload)
            for src, (positions, payloads) in enumerate(sources)
            for pos, payload in zip(positions, payloads)
        ),
        key=lambda event: (event[0], event[1]),
    )
    fragments = []
    for lo, hi in minimal_windows(events, len(sources)):
        start = events[lo][0]
        span_end = events[hi][0]
        if span_end - start > max_distance:
            continue
        if window_filter is not None and not window_filter(
            doc_id, events[lo : hi + 1]
        ):
            continue
        end = min(span_end + max_distance, doc_lengths[doc_id] - 1)
        fragments.append(Fragment(doc_id, start, end, 1.0 / (end - start + 1)))
    return fragments
