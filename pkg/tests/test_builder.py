import random

import pytest

from proxsearch import storage
from proxsearch.builder import (
    MODE_FULL,
    MODE_IDX1,
    TextCorpus,
    build_index,
    canonical_key,
)
from proxsearch.errors import BuildError
from proxsearch.index import Index
from proxsearch.lexicon import FlList, LemmaDictionary, LexiconConfig

from conftest import SONG_RANKS


def make_corpus(tmp_path, docs, name="corpus"):
    corpus_dir = tmp_path / name
    corpus_dir.mkdir()
    for i, text in enumerate(docs):
        (corpus_dir / f"{i:04d}.txt").write_text(text, encoding="utf-8")
    return TextCorpus(corpus_dir)


def build(tmp_path, docs, config, ranks=None, dictionary=None, mode=MODE_FULL, name="idx"):
    corpus = make_corpus(tmp_path, docs, name=f"{name}_corpus")
    fl_list = FlList.from_ranks(ranks, config) if ranks else None
    build_index(
        corpus,
        tmp_path / name,
        config,
        dictionary=dictionary,
        fl_list=fl_list,
        mode=mode,
    )
    return Index(tmp_path / name)


def postings_of(index, family, key):
    source = getattr(index, family)(key)
    assert source is not None, f"missing key {key}"
    return [p for p, _ in source]


class TestCanonicalKey:
    def test_three_distinct(self):
        assert canonical_key([293, 268, 47]) == ((47, 268, 293), 47)

    def test_repeated_component(self):
        assert canonical_key([293, 47, 293]) == ((47, 293, 293), 47)

    def test_all_equal(self):
        assert canonical_key([5, 5, 5]) == ((5, 5, 5), 5)

    def test_pair(self):
        assert canonical_key([2667, 2177]) == ((2177, 2667), 2177)


class TestOrdinaryFamily:
    def test_nsw_record_lists_nearby_stops(self, tmp_path, default_config):
        index = build(
            tmp_path, ["the fresh the"], default_config,
            ranks={"the": 10, "fresh": 2667},
        )
        stream = index.ordinary_postings("fresh", with_nsw=True)
        (posting, pairs), = list(stream)
        assert posting == storage.Posting(0, 1)
        assert set(pairs) == {(10, -1), (10, 1)}

    def test_stop_lemmas_have_no_ordinary_postings_in_full_mode(
        self, tmp_path, default_config
    ):
        index = build(
            tmp_path, ["the fresh the"], default_config,
            ranks={"the": 10, "fresh": 2667},
        )
        assert index.ordinary_postings("the") is None

    def test_no_stop_neighbours_means_empty_record(self, tmp_path, default_config):
        index = build(tmp_path, ["beauty"], default_config, ranks={})
        (_, pairs), = list(index.ordinary_postings("beauty", with_nsw=True))
        assert pairs == ()

    def test_idx1_indexes_every_lemma_without_nsw(self, tmp_path, default_config):
        index = build(
            tmp_path, ["the fresh the"], default_config,
            ranks={"the": 10, "fresh": 2667}, mode=MODE_IDX1,
        )
        assert postings_of(index, "ordinary_postings", "the") == [
            storage.Posting(0, 0),
            storage.Posting(0, 2),
        ]
        assert postings_of(index, "ordinary_postings", "fresh") == [storage.Posting(0, 1)]
        assert not (tmp_path / "idx" / storage.NSW_DATA).exists()

    def test_streams_are_aligned_and_stream1_decodes_alone(self, tmp_path, default_config):
        index = build(
            tmp_path,
            ["the fresh beauty the fresh", "fresh the beauty"],
            default_config,
            ranks={"the": 10, "fresh": 2667},
        )
        for lemma in ("fresh", "beauty"):
            postings = list(index.ordinary_postings(lemma))
            with_nsw = list(index.ordinary_postings(lemma, with_nsw=True))
            assert len(postings) == len(with_nsw)
            assert [p for p, _ in postings] == [p for p, _ in with_nsw]


class TestThreeKeyFamily:
    def test_you_are_who(self, tmp_path, default_config):
        index = build(tmp_path, ["you are who"], default_config, ranks=SONG_RANKS)
        assert postings_of(index, "three_key_postings", (47, 268, 293)) == [
            storage.Posting(0, 0)
        ]
        # No other anchors qualify: the most frequent component anchors.
        assert index.three_key_postings((268, 293, 293)) is None

    def test_who_are_you_who(self, tmp_path, default_config):
        index = build(tmp_path, ["who are you who"], default_config, ranks=SONG_RANKS)
        assert postings_of(index, "three_key_postings", (47, 293, 293)) == [
            storage.Posting(0, 2)
        ]
        assert postings_of(index, "three_key_postings", (47, 268, 293)) == [
            storage.Posting(0, 2)
        ]
        assert postings_of(index, "three_key_postings", (268, 293, 293)) == [
            storage.Posting(0, 1)
        ]

    def test_distance_bound_is_inclusive(self, tmp_path):
        config = LexiconConfig(sw_count=9, fu_count=0, max_distance=3, min_count=1)
        ranks = {"a": 1, "b": 2, "c": 3}
        # b and c exactly at distance 3 from a; one filler beyond reach.
        index = build(tmp_path, ["b x x a x x c x x x x x"], config, ranks=ranks)
        assert postings_of(index, "three_key_postings", (1, 2, 3)) == [
            storage.Posting(0, 3)
        ]

    def test_far_apart_stops_produce_nothing(self, tmp_path):
        config = LexiconConfig(sw_count=9, fu_count=0, max_distance=2, min_count=1)
        index = build(
            tmp_path, ["a x x x b x x x c"], config, ranks={"a": 1, "b": 2, "c": 3}
        )
        assert index.manifest["families"]["three_key"]["records"] == 0

    def test_single_occurrence_cannot_fill_two_slots(self, tmp_path):
        config = LexiconConfig(sw_count=9, fu_count=0, max_distance=5, min_count=1)
        index = build(tmp_path, ["a b"], config, ranks={"a": 1, "b": 2})
        # A triple needs three distinct word positions.
        assert index.manifest["families"]["three_key"]["records"] == 0
        index2 = build(
            tmp_path, ["a b b"], config, ranks={"a": 1, "b": 2}, name="idx2"
        )
        assert postings_of(index2, "three_key_postings", (1, 2, 2)) == [
            storage.Posting(0, 0)
        ]


class TestTwoKeyFamily:
    def test_pair_posting_at_anchor(self, tmp_path, default_config):
        index = build(
            tmp_path, ["fresh around"], default_config,
            ranks={"fresh": 2667, "around": 2177},
        )
        assert postings_of(index, "two_key_postings", (2177, 2667)) == [
            storage.Posting(0, 1)
        ]

    def test_single_frequent_lemma_produces_no_pairs(self, tmp_path, default_config):
        index = build(tmp_path, ["fresh beauty"], default_config, ranks={"fresh": 2667})
        assert index.manifest["families"]["two_key"]["records"] == 0

    def test_pair_beyond_distance_produces_nothing(self, tmp_path):
        config = LexiconConfig(sw_count=1, fu_count=10, max_distance=2, min_count=1)
        index = build(
            tmp_path, ["fresh x x x around"], config,
            ranks={"fresh": 2, "around": 3, "x": 1},
        )
        assert index.manifest["families"]["two_key"]["records"] == 0

    def test_pair_at_exactly_max_distance(self, tmp_path):
        config = LexiconConfig(sw_count=1, fu_count=10, max_distance=4, min_count=1)
        index = build(
            tmp_path, ["fresh i i i around"], config,
            ranks={"fresh": 2, "around": 3, "i": 1},
        )
        assert postings_of(index, "two_key_postings", (2, 3)) == [storage.Posting(0, 0)]


def brute_force_three_keys(docs, dictionary, fl_list, max_distance):
    """Triple co-occurrences by cubic scan, for soundness/completeness checks."""
    from proxsearch.lexicon import LemmaClass, tokenize

    expected: dict[tuple, set] = {}
    for doc_id, text in enumerate(docs):
        stops = []
        for token in tokenize(text):
            for lemma in dictionary.lemmatize(token.text):
                entry = fl_list.classify(lemma)
                if entry.lemma_class is LemmaClass.STOP:
                    stops.append((token.position, entry.fl_number))
        for p, f in stops:
            for i, (p1, s) in enumerate(stops):
                if p1 == p or abs(p1 - p) > max_distance:
                    continue
                for p2, t in stops[i + 1 :]:
                    if p2 in (p, p1) or abs(p2 - p) > max_distance:
                        continue
                    if f <= s and f <= t:
                        key = tuple(sorted((f, s, t)))
                        expected.setdefault(key, set()).add((doc_id, p))
    return expected


def random_stop_docs(rng, doc_count, doc_len, stop_lemmas, filler_ratio=0.3):
    docs = []
    for _ in range(doc_count):
        words = []
        for _ in range(doc_len):
            if rng.random() < filler_ratio:
                words.append(f"filler{rng.randrange(50)}")
            else:
                words.append(rng.choice(stop_lemmas))
        docs.append(" ".join(words))
    return docs


class TestSoundnessCompleteness:
    @pytest.mark.parametrize("max_distance", [2, 5])
    def test_three_key_matches_brute_force(self, tmp_path, max_distance):
        rng = random.Random(20240 + max_distance)
        stop_lemmas = [f"s{i}" for i in range(6)]
        ranks = {lemma: i + 1 for i, lemma in enumerate(stop_lemmas)}
        config = LexiconConfig(
            sw_count=6, fu_count=3, max_distance=max_distance, min_count=1
        )
        docs = random_stop_docs(rng, 12, 30, stop_lemmas)
        dictionary = LemmaDictionary.identity()
        fl_list = FlList.from_ranks(ranks, config)
        index = build(
            tmp_path, docs, config, ranks=ranks, name=f"idx_md{max_distance}"
        )
        expected = brute_force_three_keys(docs, dictionary, fl_list, max_distance)
        actual = {}
        for key in expected:
            source = index.three_key_postings(key)
            assert source is not None, f"key {key} missing from index"
            actual[key] = {(p.doc_id, p.pos) for p, _ in source}
        assert actual == expected
        assert index.manifest["families"]["three_key"]["records"] == sum(
            len(v) for v in expected.values()
        )

    def test_three_key_counts_grow_with_distance(self, tmp_path):
        rng = random.Random(7)
        stop_lemmas = [f"s{i}" for i in range(5)]
        ranks = {lemma: i + 1 for i, lemma in enumerate(stop_lemmas)}
        docs = random_stop_docs(rng, 10, 40, stop_lemmas)
        counts = []
        for md in (5, 7, 9):
            config = LexiconConfig(sw_count=5, fu_count=0, max_distance=md, min_count=1)
            index = build(tmp_path, docs, config, ranks=ranks, name=f"mono{md}")
            counts.append(index.manifest["families"]["three_key"]["records"])
        assert counts[0] <= counts[1] <= counts[2]

    def test_posting_lists_strictly_increase(self, tmp_path):
        rng = random.Random(99)
        stop_lemmas = [f"s{i}" for i in range(4)]
        ranks = {lemma: i + 1 for i, lemma in enumerate(stop_lemmas)}
        config = LexiconConfig(sw_count=4, fu_count=0, max_distance=5, min_count=1)
        docs = random_stop_docs(rng, 8, 25, stop_lemmas)
        index = build(tmp_path, docs, config, ranks=ranks)
        for key in list(index._three_key):
            postings = [p for p, _ in index.three_key_postings(key)]
            assert postings == sorted(postings)
            assert len(set(postings)) == len(postings)


class TestBuildPlumbing:
    def test_refuses_overwrite_without_flag(self, tmp_path, default_config):
        corpus = make_corpus(tmp_path, ["the end"])
        build_index(corpus, tmp_path / "idx", default_config)
        with pytest.raises(BuildError):
            build_index(corpus, tmp_path / "idx", default_config)
        build_index(corpus, tmp_path / "idx", default_config, overwrite=True)

    def test_missing_corpus_dir(self, tmp_path):
        with pytest.raises(BuildError):
            TextCorpus(tmp_path / "nope")

    def test_unreadable_file_is_named(self, tmp_path):
        corpus_dir = tmp_path / "corpus"
        corpus_dir.mkdir()
        (corpus_dir / "bad.txt").write_bytes(b"\xff\xfe\x00bad")
        corpus = TextCorpus(corpus_dir)
        with pytest.raises(BuildError, match="bad.txt"):
            list(corpus.iter_documents())

    def test_manifest_records_config(self, tmp_path):
        config = LexiconConfig(sw_count=3, fu_count=2, max_distance=7, min_count=1)
        index = build(tmp_path, ["a b c", "c b a", "a c b"], config)
        assert index.manifest["max_distance"] == 7
        assert index.manifest["mode"] == MODE_FULL
        assert index.manifest["doc_count"] == 3
        assert index.doc_lengths == [3, 3, 3]

    def test_builds_are_byte_identical(self, tmp_path):
        docs = ["the fresh beauty of the fresh", "who are you who", "fresh the beauty"]
        config = LexiconConfig(sw_count=3, fu_count=3, max_distance=5, min_count=1)
        for name in ("one", "two"):
            corpus = make_corpus(tmp_path, docs, name=f"c_{name}")
            build_index(corpus, tmp_path / name, config)
        files_one = sorted((tmp_path / "one").iterdir())
        files_two = sorted((tmp_path / "two").iterdir())
        assert [f.name for f in files_one] == [f.name for f in files_two]
        for f1, f2 in zip(files_one, files_two):
            assert f1.read_bytes() == f2.read_bytes(), f1.name
