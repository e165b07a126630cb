"""Tokenization, lemma lookup, and the ranked lemma frequency list.

Every lemma seen often enough in the corpus gets a 1-based rank in
decreasing frequency order (ties broken lexicographically). The first
``sw_count`` ranks are stop lemmas, the next ``fu_count`` are frequently
used lemmas, and everything else -- including lemmas too rare to rank --
is ordinary. No word is ever dropped from indexing; the classes only
decide which index family serves it.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import BuildError

# Rank sentinel for lemmas too rare to deserve a slot in the ranked list.
RARE = 2**31 - 1
_RARE_TEXT = "~"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class LemmaClass(enum.Enum):
    STOP = "stop"
    FREQUENTLY_USED = "frequently_used"
    ORDINARY = "ordinary"


class Token(NamedTuple):
    text: str
    position: int


@dataclass(frozen=True)
class LexiconConfig:
    """Knobs shared by the lexicon and every index family."""

    sw_count: int = 700
    fu_count: int = 2100
    max_distance: int = 5
    min_count: int = 2

    def __post_init__(self) -> None:
        if self.sw_count < 1:
            raise ValueError("sw_count must be >= 1")
        if self.fu_count < 0:
            raise ValueError("fu_count must be >= 0")
        if self.max_distance < 1:
            raise ValueError("max_distance must be >= 1")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")

    def class_for_rank(self, fl_number: int) -> LemmaClass:
        if fl_number == RARE:
            return LemmaClass.ORDINARY
        if fl_number <= self.sw_count:
            return LemmaClass.STOP
        if fl_number <= self.sw_count + self.fu_count:
            return LemmaClass.FREQUENTLY_USED
        return LemmaClass.ORDINARY


@dataclass(frozen=True)
class LemmaEntry:
    lemma: str
    fl_number: int
    lemma_class: LemmaClass
    count: int = 0


def tokenize(text: str) -> list[Token]:
    """Split text into lowercased alphanumeric runs with 0-based positions.

    Any non-alphanumeric character separates tokens; there is no sentence
    handling because positions are plain word ordinals.
    """
    return [
        Token(match.group(), i)
        for i, match in enumerate(_TOKEN_RE.finditer(text.lower()))
    ]


class LemmaDictionary:
    """Word -> lemma alternatives, with identity fallback.

    Loaded from UTF-8 lines ``word<TAB>lemma1,lemma2,...``. A word absent
    from the dictionary is its own lemma. Alternative order is preserved
    from the file; it drives the order of expanded sub-queries.
    """

    def __init__(self, mapping: Mapping[str, Sequence[str]] | None = None) -> None:
        self._map: dict[str, tuple[str, ...]] = {}
        for word, lemmas in (mapping or {}).items():
            deduped = tuple(dict.fromkeys(lemmas))
            if deduped:
                self._map[word.lower()] = deduped

    @classmethod
    def identity(cls) -> "LemmaDictionary":
        return cls()

    @classmethod
    def load(cls, path: Path | str) -> "LemmaDictionary":
        mapping: dict[str, list[str]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            word, _, lemmas = line.partition("\t")
            mapping[word.lower()] = [
                lemma.strip().lower() for lemma in lemmas.split(",") if lemma.strip()
            ]
        return cls(mapping)

    def save(self, path: Path | str) -> None:
        lines = [
            f"{word}\t{','.join(lemmas)}" for word, lemmas in sorted(self._map.items())
        ]
        Path(path).write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")

    def lemmatize(self, word: str) -> tuple[str, ...]:
        """All lemmas of ``word``; the word itself if it is not listed."""
        return self._map.get(word, (word,))

    def __len__(self) -> int:
        return len(self._map)


class FlList:
    """Lemmas ranked by decreasing corpus frequency, with class lookup."""

    def __init__(self, entries: Iterable[LemmaEntry], config: LexiconConfig) -> None:
        self.config = config
        self._by_lemma: dict[str, LemmaEntry] = {e.lemma: e for e in entries}
        self.ranked: list[LemmaEntry] = sorted(
            (e for e in self._by_lemma.values() if e.fl_number != RARE),
            key=lambda e: e.fl_number,
        )

    @classmethod
    def build(
        cls,
        documents: Iterable[Sequence[str]],
        dictionary: LemmaDictionary,
        config: LexiconConfig,
    ) -> "FlList":
        """Rank lemmas of a tokenized corpus.

        Each word occurrence counts once toward each of its lemmas. Lemmas
        occurring fewer than ``config.min_count`` times stay unranked.
        """
        counts: Counter[str] = Counter()
        for words in documents:
            for word in words:
                for lemma in dictionary.lemmatize(word):
                    counts[lemma] += 1
        if not counts:
            raise BuildError("corpus is empty: no lemma statistics to rank")
        return cls.from_counts(counts, config)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], config: LexiconConfig) -> "FlList":
        ranked = sorted(
            (lemma for lemma, count in counts.items() if count >= config.min_count),
            key=lambda lemma: (-counts[lemma], lemma),
        )
        entries = [
            LemmaEntry(lemma, rank, config.class_for_rank(rank), counts[lemma])
            for rank, lemma in enumerate(ranked, start=1)
        ]
        entries.extend(
            LemmaEntry(lemma, RARE, LemmaClass.ORDINARY, count)
            for lemma, count in counts.items()
            if count < config.min_count
        )
        return cls(entries, config)

    @classmethod
    def from_ranks(cls, ranks: Mapping[str, int], config: LexiconConfig) -> "FlList":
        """Build from externally supplied ranks (counts unknown)."""
        return cls(
            (
                LemmaEntry(lemma, fl, config.class_for_rank(fl))
                for lemma, fl in ranks.items()
            ),
            config,
        )

    def classify(self, lemma: str) -> LemmaEntry:
        """Entry for ``lemma``; unseen lemmas are unranked and ordinary."""
        entry = self._by_lemma.get(lemma)
        if entry is None:
            return LemmaEntry(lemma, RARE, LemmaClass.ORDINARY, 0)
        return entry

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._by_lemma

    def __len__(self) -> int:
        return len(self._by_lemma)

    def class_sizes(self) -> dict[str, int]:
        sizes = {cls.value: 0 for cls in LemmaClass}
        for entry in self._by_lemma.values():
            sizes[entry.lemma_class.value] += 1
        return sizes

    def save(self, path: Path | str) -> None:
        """Persist as UTF-8 ``lemma<TAB>count<TAB>fl_number`` lines."""
        entries = sorted(
            self._by_lemma.values(), key=lambda e: (e.fl_number, e.lemma)
        )
        lines = [
            f"{e.lemma}\t{e.count}\t{_RARE_TEXT if e.fl_number == RARE else e.fl_number}"
            for e in entries
        ]
        Path(path).write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str, config: LexiconConfig) -> "FlList":
        entries = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            lemma, count_text, fl_text = line.split("\t")
            fl = RARE if fl_text == _RARE_TEXT else int(fl_text)
            entries.append(
                LemmaEntry(lemma, fl, config.class_for_rank(fl), int(count_text))
            )
        return cls(entries, config)
