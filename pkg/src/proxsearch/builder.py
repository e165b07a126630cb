"""Single-pass construction of all index families for a text corpus.

Two modes exist. ``idx1`` is the plain positional baseline: every lemma
occurrence (stop lemmas included) becomes one posting and nothing else is
written. ``full`` splits the work by lemma class: frequently-used and
ordinary lemmas get positional postings plus a parallel near-stop-word
(NSW) stream, frequently-used pairs feed the two-component key index, and
stop-lemma triples feed the three-component key index. Composite postings
record the anchor occurrence, i.e. the most frequent lemma of the key.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from pathlib import Path
from typing import Iterator, Sequence

from . import storage
from .errors import BuildError
from .lexicon import (
    FlList,
    LemmaClass,
    LemmaDictionary,
    LexiconConfig,
    tokenize,
)
from .storage import Posting

MODE_IDX1 = "idx1"
MODE_FULL = "full"


def canonical_key(fls: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Canonical composite key plus its anchor rank.

    Components are sorted ascending by rank; the anchor is the most
    frequent component (smallest rank). Posting lists of a composite key
    always store the anchor's occurrence position.
    """
    key = tuple(sorted(fls))
    return key, key[0]


class TextCorpus:
    """A directory of UTF-8 text files, one document per file.

    Document ids are assigned in sorted file-name order, so two reads of
    the same directory agree on numbering.
    """

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)
        if not self.root.is_dir():
            raise BuildError(f"corpus directory not found: {self.root}")
        self.files = sorted(
            p for p in self.root.iterdir() if p.is_file() and not p.name.startswith(".")
        )
        if not self.files:
            raise BuildError(f"corpus directory is empty: {self.root}")

    @property
    def doc_count(self) -> int:
        return len(self.files)

    @property
    def doc_names(self) -> list[str]:
        return [p.name for p in self.files]

    def iter_documents(self) -> Iterator[tuple[int, list[str]]]:
        for doc_id, path in enumerate(self.files):
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise BuildError(f"unreadable corpus file {path}: {exc}")
            yield doc_id, [token.text for token in tokenize(text)]


class IndexBuilder:
    """Accumulates postings document by document, then writes segments."""

    def __init__(
        self,
        config: LexiconConfig,
        dictionary: LemmaDictionary,
        fl_list: FlList,
        mode: str = MODE_FULL,
    ) -> None:
        if mode not in (MODE_IDX1, MODE_FULL):
            raise BuildError(f"unknown index mode {mode!r}")
        self.config = config
        self.dictionary = dictionary
        self.fl_list = fl_list
        self.mode = mode
        self.doc_lengths: list[int] = []
        self._ordinary: dict[str, list[Posting]] = {}
        self._nsw: dict[str, list[bytes]] = {}
        self._two_key: dict[tuple[int, int], list[Posting]] = {}
        self._three_key: dict[tuple[int, int, int], list[Posting]] = {}

    def add_document(self, doc_id: int, words: Sequence[str]) -> None:
        if doc_id != len(self.doc_lengths):
            raise BuildError("documents must be added in id order")
        self.doc_lengths.append(len(words))
        occurrences = self._lemma_occurrences(words)
        if self.mode == MODE_IDX1:
            for pos, entries in enumerate(occurrences):
                for lemma, _, _ in entries:
                    self._ordinary.setdefault(lemma, []).append(Posting(doc_id, pos))
            return
        stops = [
            (pos, fl)
            for pos, entries in enumerate(occurrences)
            for lemma, fl, cls in entries
            if cls is LemmaClass.STOP
        ]
        stop_positions = [pos for pos, _ in stops]
        self._add_ordinary_with_nsw(doc_id, occurrences, stops, stop_positions)
        self._add_two_key(doc_id, occurrences)
        self._add_three_key(doc_id, stops, stop_positions)

    def _lemma_occurrences(
        self, words: Sequence[str]
    ) -> list[list[tuple[str, int, LemmaClass]]]:
        classify = self.fl_list.classify
        lemmatize = self.dictionary.lemmatize
        table = []
        for word in words:
            entries = []
            for lemma in lemmatize(word):
                entry = classify(lemma)
                entries.append((lemma, entry.fl_number, entry.lemma_class))
            table.append(entries)
        return table

    def _add_ordinary_with_nsw(self, doc_id, occurrences, stops, stop_positions):
        md = self.config.max_distance
        for pos, entries in enumerate(occurrences):
            nsw_payload = None
            for lemma, _, cls in entries:
                if cls is LemmaClass.STOP:
                    continue
                if nsw_payload is None:
                    lo = bisect_left(stop_positions, pos - md)
                    hi = bisect_right(stop_positions, pos + md)
                    nsw_payload = storage.encode_nsw_record(
                        (fl, q - pos) for q, fl in stops[lo:hi] if q != pos
                    )
                self._ordinary.setdefault(lemma, []).append(Posting(doc_id, pos))
                self._nsw.setdefault(lemma, []).append(nsw_payload)

    def _add_two_key(self, doc_id, occurrences):
        md = self.config.max_distance
        frequent = [
            (pos, fl)
            for pos, entries in enumerate(occurrences)
            for _, fl, cls in entries
            if cls is LemmaClass.FREQUENTLY_USED
        ]
        emitted: set[tuple[tuple[int, int], int]] = set()
        lo = hi = 0
        for i, (pos, fl) in enumerate(frequent):
            while frequent[lo][0] < pos - md:
                lo += 1
            while hi < len(frequent) and frequent[hi][0] <= pos + md:
                hi += 1
            for j in range(lo, hi):
                other_pos, other_fl = frequent[j]
                if other_pos == pos or fl > other_fl:
                    continue
                emitted.add(((fl, other_fl), pos))
        for (key, pos) in sorted(emitted, key=lambda e: (e[0], e[1])):
            self._two_key.setdefault(key, []).append(Posting(doc_id, pos))

    def _add_three_key(self, doc_id, stops, stop_positions):
        md = self.config.max_distance
        emitted: set[tuple[tuple[int, int, int], int]] = set()
        lo = hi = 0
        for i, (pos, fl) in enumerate(stops):
            while stop_positions[lo] < pos - md:
                lo += 1
            while hi < len(stops) and stop_positions[hi] <= pos + md:
                hi += 1
            window = [
                (q, other_fl)
                for q, other_fl in stops[lo:hi]
                if q != pos and other_fl >= fl
            ]
            for a in range(len(window)):
                pos_a, fl_a = window[a]
                for b in range(a + 1, len(window)):
                    pos_b, fl_b = window[b]
                    if pos_b == pos_a:
                        continue
                    key = (fl, fl_a, fl_b) if fl_a <= fl_b else (fl, fl_b, fl_a)
                    emitted.add((key, pos))
        for (key, pos) in sorted(emitted, key=lambda e: (e[0], e[1])):
            self._three_key.setdefault(key, []).append(Posting(doc_id, pos))

    def write(self, out_dir: Path, doc_names: Sequence[str]) -> dict:
        out_dir.mkdir(parents=True, exist_ok=True)
        families: dict[str, dict] = {}

        ordinary = storage.SegmentWriter()
        for lemma in sorted(self._ordinary):
            ordinary.add(
                storage.lemma_key(lemma),
                storage.encode_postings(self._ordinary[lemma]),
                len(self._ordinary[lemma]),
            )
        families["ordinary"] = ordinary.write(
            out_dir / storage.ORDINARY_DICT, out_dir / storage.ORDINARY_DATA
        )

        if self.mode == MODE_FULL:
            nsw = storage.SegmentWriter()
            for lemma in sorted(self._nsw):
                nsw.add(
                    storage.lemma_key(lemma),
                    b"".join(self._nsw[lemma]),
                    len(self._nsw[lemma]),
                )
            families["nsw"] = nsw.write(
                out_dir / storage.NSW_DICT, out_dir / storage.NSW_DATA
            )

            two_key = storage.SegmentWriter()
            for key in sorted(self._two_key):
                two_key.add(
                    storage.fl_key(key),
                    storage.encode_postings(self._two_key[key]),
                    len(self._two_key[key]),
                )
            families["two_key"] = two_key.write(
                out_dir / storage.TWO_KEY_DICT, out_dir / storage.TWO_KEY_DATA
            )

            three_key = storage.SegmentWriter()
            for key in sorted(self._three_key):
                three_key.add(
                    storage.fl_key(key),
                    storage.encode_postings(self._three_key[key]),
                    len(self._three_key[key]),
                )
            families["three_key"] = three_key.write(
                out_dir / storage.THREE_KEY_DICT, out_dir / storage.THREE_KEY_DATA
            )

        self.fl_list.save(out_dir / storage.FL_LIST_FILE)
        self.dictionary.save(out_dir / storage.DICTIONARY_FILE)
        manifest = {
            "format": storage.MANIFEST_FORMAT,
            "mode": self.mode,
            "sw_count": self.config.sw_count,
            "fu_count": self.config.fu_count,
            "max_distance": self.config.max_distance,
            "min_count": self.config.min_count,
            "doc_count": len(self.doc_lengths),
            "doc_lengths": list(self.doc_lengths),
            "doc_names": list(doc_names),
            "families": families,
        }
        storage.write_manifest(out_dir / storage.MANIFEST_FILE, manifest)
        return manifest


def build_index(
    corpus: TextCorpus,
    out_dir: Path | str,
    config: LexiconConfig,
    dictionary: LemmaDictionary | None = None,
    fl_list: FlList | None = None,
    mode: str = MODE_FULL,
    overwrite: bool = False,
) -> dict:
    """Build every configured index family for ``corpus`` under ``out_dir``.

    Returns the written manifest. Refuses to clobber an existing index
    unless ``overwrite`` is set.
    """
    out_dir = Path(out_dir)
    if (out_dir / storage.MANIFEST_FILE).exists() and not overwrite:
        raise BuildError(
            f"index already exists at {out_dir}; pass overwrite to replace it"
        )
    dictionary = dictionary or LemmaDictionary.identity()
    if fl_list is None:
        fl_list = FlList.build(
            (words for _, words in corpus.iter_documents()), dictionary, config
        )
    builder = IndexBuilder(config, dictionary, fl_list, mode)
    for doc_id, words in corpus.iter_documents():
        builder.add_document(doc_id, words)
    return builder.write(out_dir, corpus.doc_names)
