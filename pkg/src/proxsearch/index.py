"""Read side of the on-disk index.

The dictionaries are loaded eagerly; posting and NSW payloads are decoded
lazily per key so the consumption counters reflect only what a query
actually touched.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from . import storage
from .errors import IndexFormatError
from .lexicon import FlList, LemmaDictionary, LexiconConfig
from .storage import Posting, ReadCounters


class Index:
    """An immutable, opened index directory."""

    def __init__(self, path: Path | str) -> None:
        self.path = Path(path)
        manifest = storage.read_manifest(self.path / storage.MANIFEST_FILE)
        self.manifest = manifest
        self.mode = manifest["mode"]
        self.config = LexiconConfig(
            sw_count=manifest["sw_count"],
            fu_count=manifest["fu_count"],
            max_distance=manifest["max_distance"],
            min_count=manifest["min_count"],
        )
        self.doc_count = manifest["doc_count"]
        self.doc_lengths = manifest["doc_lengths"]
        self.doc_names = manifest["doc_names"]
        self.fl_list = FlList.load(self.path / storage.FL_LIST_FILE, self.config)
        self.dictionary = LemmaDictionary.load(self.path / storage.DICTIONARY_FILE)
        self.counters = ReadCounters()

        self._ordinary = self._load_dict(storage.ORDINARY_DICT)
        self._ordinary_data = self._load_data(storage.ORDINARY_DATA)
        if self.mode == "full":
            self._nsw = self._load_dict(storage.NSW_DICT)
            self._nsw_data = self._load_data(storage.NSW_DATA)
            self._two_key = {
                storage.decode_fl_key(k): v
                for k, v in self._load_dict(storage.TWO_KEY_DICT).items()
            }
            self._two_key_data = self._load_data(storage.TWO_KEY_DATA)
            self._three_key = {
                storage.decode_fl_key(k): v
                for k, v in self._load_dict(storage.THREE_KEY_DICT).items()
            }
            self._three_key_data = self._load_data(storage.THREE_KEY_DATA)
        else:
            self._nsw = {}
            self._nsw_data = b""
            self._two_key = {}
            self._two_key_data = b""
            self._three_key = {}
            self._three_key_data = b""

    def _load_dict(self, name: str) -> dict:
        path = self.path / name
        if not path.exists():
            raise IndexFormatError(f"index file missing: {path}")
        return storage.read_segment_dict(path)

    def _load_data(self, name: str) -> bytes:
        path = self.path / name
        if not path.exists():
            raise IndexFormatError(f"index file missing: {path}")
        return path.read_bytes()

    # -- ordinary family ---------------------------------------------------

    def has_lemma(self, lemma: str) -> bool:
        return storage.lemma_key(lemma) in self._ordinary

    def lemma_posting_count(self, lemma: str) -> int:
        entry = self._ordinary.get(storage.lemma_key(lemma))
        return entry[2] if entry else 0

    def ordinary_postings(
        self, lemma: str, with_nsw: bool = False
    ) -> Iterator[tuple[Posting, tuple | None]] | None:
        """Stream of (posting, nsw_pairs) for ``lemma``; None if unknown.

        ``with_nsw`` zips in the parallel NSW stream; without it that
        stream is never touched, so its bytes are not charged.
        """
        entry = self._ordinary.get(storage.lemma_key(lemma))
        if entry is None:
            return None
        offset, _, count = entry
        postings = storage.iter_postings(
            self._ordinary_data, offset, count, self.counters
        )
        if not with_nsw:
            return ((p, None) for p in postings)
        nsw_entry = self._nsw.get(storage.lemma_key(lemma))
        if nsw_entry is None:
            raise IndexFormatError(f"no NSW stream for lemma {lemma!r}")
        return self._zip_nsw(postings, nsw_entry[0], count)

    def _zip_nsw(self, postings, nsw_offset: int, count: int):
        for posting in postings:
            pairs, nsw_offset = storage.read_nsw_record(
                self._nsw_data, nsw_offset, self.counters
            )
            yield posting, pairs

    # -- composite families ------------------------------------------------

    def two_key_postings(self, key: tuple[int, int]):
        return self._composite(self._two_key, self._two_key_data, key)

    def three_key_postings(self, key: tuple[int, int, int]):
        return self._composite(self._three_key, self._three_key_data, key)

    def _composite(self, table, data, key):
        entry = table.get(key)
        if entry is None:
            return None
        offset, _, count = entry
        postings = storage.iter_postings(data, offset, count, self.counters)
        return ((p, None) for p in postings)

    # -- statistics ----------------------------------------------------------

    def stats(self) -> dict:
        """Per-family sizes plus lemma class boundaries, for reporting."""
        fl_sizes = self.fl_list.class_sizes()
        return {
            "path": str(self.path),
            "mode": self.mode,
            "config": {
                "sw_count": self.config.sw_count,
                "fu_count": self.config.fu_count,
                "max_distance": self.config.max_distance,
                "min_count": self.config.min_count,
            },
            "doc_count": self.doc_count,
            "families": self.manifest["families"],
            "lemma_classes": fl_sizes,
            "ranked_lemmas": len(self.fl_list.ranked),
        }
