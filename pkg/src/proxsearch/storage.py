"""Byte-level formats shared by every index family.

All integers on disk are unsigned LEB128 varints (low 7 bits first, high
bit set on continuation bytes). Signed quantities are zigzag-mapped onto
unsigned values first. A segment is a pair of files: a dictionary file
listing ``key -> (offset, length, count)`` and a data file holding the
concatenated per-key payloads. Posting payloads are delta coded: the first
posting is stored absolute, afterwards a document-id delta is written and
the position is stored absolute when the document changed, or as a
position delta when it did not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

MANIFEST_FILE = "manifest.json"
FL_LIST_FILE = "fl_list.tsv"
DICTIONARY_FILE = "dictionary.tsv"

ORDINARY_DICT = "ordinary.dict"
ORDINARY_DATA = "ordinary.post"
NSW_DICT = "ordinary_nsw.dict"
NSW_DATA = "ordinary_nsw.dat"
TWO_KEY_DICT = "two_key.dict"
TWO_KEY_DATA = "two_key.post"
THREE_KEY_DICT = "three_key.dict"
THREE_KEY_DATA = "three_key.post"

MANIFEST_FORMAT = "proxsearch-1"


class Posting(NamedTuple):
    """A single (document, word position) index record."""

    doc_id: int
    pos: int


@dataclass
class ReadCounters:
    """Consumption counters kept at the storage boundary.

    ``posting_bytes``/``nsw_bytes`` measure decoded stream consumption, not
    OS-level I/O, so they are deterministic across machines.
    """

    postings: int = 0
    posting_bytes: int = 0
    nsw_records: int = 0
    nsw_bytes: int = 0

    @property
    def bytes_read(self) -> int:
        return self.posting_bytes + self.nsw_bytes

    def reset(self) -> None:
        self.postings = 0
        self.posting_bytes = 0
        self.nsw_records = 0
        self.nsw_bytes = 0

    def snapshot(self) -> dict:
        return {
            "postings": self.postings,
            "posting_bytes": self.posting_bytes,
            "nsw_records": self.nsw_records,
            "nsw_bytes": self.nsw_bytes,
            "bytes_read": self.bytes_read,
        }


def write_uvarint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varints encode non-negative integers only")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def read_uvarint(buf, offset: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        byte = buf[offset]
        offset += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, offset
        shift += 7


def zigzag_encode(value: int) -> int:
    return value * 2 if value >= 0 else -value * 2 - 1


def zigzag_decode(value: int) -> int:
    return value // 2 if value % 2 == 0 else -(value + 1) // 2


def encode_postings(postings: Iterable[Posting]) -> bytes:
    out = bytearray()
    prev_doc = prev_pos = 0
    first = True
    for doc_id, pos in postings:
        if first:
            write_uvarint(out, doc_id)
            write_uvarint(out, pos)
            first = False
        else:
            delta = doc_id - prev_doc
            write_uvarint(out, delta)
            write_uvarint(out, pos if delta else pos - prev_pos)
        prev_doc, prev_pos = doc_id, pos
    return bytes(out)


def iter_postings(
    buf, offset: int, count: int, counters: ReadCounters | None = None
) -> Iterator[Posting]:
    """Decode ``count`` postings lazily, charging counters as bytes are used."""
    prev_doc = prev_pos = 0
    for i in range(count):
        start = offset
        delta, offset = read_uvarint(buf, offset)
        value, offset = read_uvarint(buf, offset)
        if i == 0:
            doc, pos = delta, value
        elif delta:
            doc, pos = prev_doc + delta, value
        else:
            doc, pos = prev_doc, prev_pos + value
        prev_doc, prev_pos = doc, pos
        if counters is not None:
            counters.postings += 1
            counters.posting_bytes += offset - start
        yield Posting(doc, pos)


def encode_nsw_record(pairs: Iterable[tuple[int, int]]) -> bytes:
    """Encode one near-stop-word record.

    ``pairs`` holds (stop-lemma rank, signed offset) entries; they are
    stored sorted by (offset, rank) with both fields zigzag-delta coded so
    the record is self-describing and skippable.
    """
    ordered = sorted(pairs, key=lambda p: (p[1], p[0]))
    out = bytearray()
    write_uvarint(out, len(ordered))
    prev_fl = 0
    for fl, off in ordered:
        write_uvarint(out, zigzag_encode(fl - prev_fl))
        write_uvarint(out, zigzag_encode(off))
        prev_fl = fl
    return bytes(out)


def read_nsw_record(
    buf, offset: int, counters: ReadCounters | None = None
) -> tuple[tuple[tuple[int, int], ...], int]:
    start = offset
    count, offset = read_uvarint(buf, offset)
    pairs = []
    prev_fl = 0
    for _ in range(count):
        fl_delta, offset = read_uvarint(buf, offset)
        off, offset = read_uvarint(buf, offset)
        prev_fl += zigzag_decode(fl_delta)
        pairs.append((prev_fl, zigzag_decode(off)))
    if counters is not None:
        counters.nsw_records += 1
        counters.nsw_bytes += offset - start
    return tuple(pairs), offset


def lemma_key(lemma: str) -> bytes:
    return lemma.encode("utf-8")


def fl_key(fls: Iterable[int]) -> bytes:
    out = bytearray()
    for fl in fls:
        write_uvarint(out, fl)
    return bytes(out)


def decode_fl_key(key: bytes) -> tuple[int, ...]:
    fls = []
    offset = 0
    while offset < len(key):
        fl, offset = read_uvarint(key, offset)
        fls.append(fl)
    return tuple(fls)


class SegmentWriter:
    """Collects per-key payloads and writes one dictionary + data file pair.

    Entries are written sorted by key bytes so builds are reproducible.
    """

    def __init__(self) -> None:
        self._entries: list[tuple[bytes, bytes, int]] = []

    def add(self, key: bytes, payload: bytes, count: int) -> None:
        self._entries.append((key, payload, count))

    def write(self, dict_path: Path, data_path: Path) -> dict:
        self._entries.sort(key=lambda e: e[0])
        dict_out = bytearray()
        data_out = bytearray()
        total = 0
        for key, payload, count in self._entries:
            write_uvarint(dict_out, len(key))
            dict_out += key
            write_uvarint(dict_out, len(data_out))
            write_uvarint(dict_out, len(payload))
            write_uvarint(dict_out, count)
            data_out += payload
            total += count
        dict_path.write_bytes(bytes(dict_out))
        data_path.write_bytes(bytes(data_out))
        return {
            "keys": len(self._entries),
            "records": total,
            "data_bytes": len(data_out),
            "dict_bytes": len(dict_out),
        }


def read_segment_dict(path: Path) -> dict[bytes, tuple[int, int, int]]:
    buf = path.read_bytes()
    entries: dict[bytes, tuple[int, int, int]] = {}
    offset = 0
    while offset < len(buf):
        key_len, offset = read_uvarint(buf, offset)
        key = bytes(buf[offset : offset + key_len])
        offset += key_len
        data_offset, offset = read_uvarint(buf, offset)
        length, offset = read_uvarint(buf, offset)
        count, offset = read_uvarint(buf, offset)
        entries[key] = (data_offset, length, count)
    return entries


def write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def read_manifest(path: Path) -> dict:
    from .errors import IndexFormatError

    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IndexFormatError(f"no index manifest at {path}")
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"unreadable index manifest {path}: {exc}")
    if manifest.get("format") != MANIFEST_FORMAT:
        raise IndexFormatError(
            f"unsupported index format {manifest.get('format')!r} in {path}"
        )
    return manifest
