from collections import Counter

import pytest

from proxsearch.bench import (
    BenchReport,
    generate_corpus,
    generate_queries,
    run_bench,
)
from proxsearch.lexicon import FlList, LemmaClass, LemmaDictionary, LexiconConfig


class TestGenerateCorpus:
    def test_same_seed_is_byte_identical(self, tmp_path):
        for name in ("one", "two"):
            generate_corpus(
                seed=11, doc_count=5, vocab_size=100, zipf_exponent=1.0,
                doc_len=40, out_dir=tmp_path / name,
            )
        files_one = sorted((tmp_path / "one").iterdir())
        files_two = sorted((tmp_path / "two").iterdir())
        assert [f.name for f in files_one] == [f.name for f in files_two]
        for f1, f2 in zip(files_one, files_two):
            assert f1.read_bytes() == f2.read_bytes()

    def test_zero_documents(self):
        assert generate_corpus(1, 0, 10, 1.0, doc_len=5) == []

    def test_rank_frequency_ratio_tracks_exponent(self):
        docs = generate_corpus(
            seed=3, doc_count=400, vocab_size=10_000, zipf_exponent=1.0, doc_len=600
        )
        counts = Counter(word for doc in docs for word in doc)
        ratio = counts["w00001"] / counts["w00010"]
        assert 8.0 <= ratio <= 12.0  # ~10 within 20%

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            generate_corpus(0, 5, 0, 1.0)


class TestGenerateQueries:
    def make_fl(self):
        counts = {f"w{i:05d}": 1000 // i for i in range(1, 40)}
        config = LexiconConfig(sw_count=10, fu_count=10, max_distance=5, min_count=1)
        return FlList.from_counts(counts, config)

    def test_lengths_cycle_and_class_respected(self):
        fl = self.make_fl()
        queries = generate_queries(fl, 9, (3, 4, 5), seed=5)
        assert [len(q.split()) for q in queries] == [3, 4, 5] * 3
        stop_lemmas = {
            e.lemma for e in fl.ranked if e.lemma_class is LemmaClass.STOP
        }
        for query in queries:
            assert set(query.split()) <= stop_lemmas

    def test_deterministic(self):
        fl = self.make_fl()
        assert generate_queries(fl, 6, (3,), seed=9) == generate_queries(
            fl, 6, (3,), seed=9
        )

    def test_requires_population(self):
        config = LexiconConfig(sw_count=1, fu_count=1, max_distance=5, min_count=1)
        fl = FlList.from_counts({"a": 5}, config)
        with pytest.raises(ValueError):
            generate_queries(fl, 3, (3,), seed=1, lemma_class=LemmaClass.FREQUENTLY_USED)


@pytest.fixture(scope="module")
def small_bench(tmp_path_factory):
    root = tmp_path_factory.mktemp("bench")
    corpus_dir = root / "corpus"
    generate_corpus(
        seed=21, doc_count=60, vocab_size=300, zipf_exponent=0.9,
        doc_len=60, out_dir=corpus_dir,
    )
    config = LexiconConfig(sw_count=12, fu_count=30, max_distance=5, min_count=1)
    fl = FlList.build(
        (read.split() for read in (
            p.read_text() for p in sorted(corpus_dir.iterdir())
        )),
        LemmaDictionary.identity(),
        config,
    )
    queries = generate_queries(fl, 8, (3, 4), seed=33)
    report = run_bench(
        corpus_dir, queries, root / "work", config,
        max_distances=(5, 7), repetitions=1,
    )
    return corpus_dir, config, fl, queries, report, root


class TestRunBench:
    def test_variants_and_counts(self, small_bench):
        _, _, _, queries, report, _ = small_bench
        assert [v.name for v in report.variants] == ["idx1", "full_md5", "full_md7"]
        for variant in report.variants:
            assert variant.executed + variant.skipped == len(queries)

    def test_idx1_postings_equal_sum_of_lemma_counts(self, small_bench):
        corpus_dir, config, fl, _, _, root = small_bench
        lemmas = [e.lemma for e in fl.ranked[:3]]
        query = " ".join(lemmas)  # three distinct stop lemmas
        report = run_bench(
            corpus_dir, [query], root / "work_single", config,
            max_distances=(5,), repetitions=1,
        )
        idx1 = report.variant("idx1")
        expected = sum(fl.classify(lemma).count for lemma in lemmas)
        assert idx1.avg_postings == expected

    def test_full_reads_fewer_postings_than_idx1(self, small_bench):
        _, _, _, _, report, _ = small_bench
        idx1 = report.variant("idx1")
        full = report.variant("full_md5")
        assert full.avg_postings < idx1.avg_postings

    def test_bytes_monotone_in_distance(self, small_bench):
        _, _, _, _, report, _ = small_bench
        assert (
            report.variant("full_md5").avg_bytes_read
            <= report.variant("full_md7").avg_bytes_read
        )

    def test_counters_reproducible(self, small_bench):
        corpus_dir, config, _, queries, report, root = small_bench
        again = run_bench(
            corpus_dir, queries, root / "work_again", config,
            max_distances=(5, 7), repetitions=1,
        )
        for first, second in zip(report.variants, again.variants):
            assert first.avg_bytes_read == second.avg_bytes_read
            assert first.avg_postings == second.avg_postings
            assert first.executed == second.executed

    def test_empty_query_set(self, small_bench, tmp_path):
        corpus_dir, config, _, _, _, _ = small_bench
        report = run_bench(
            corpus_dir, [], tmp_path / "work", config,
            max_distances=(5,), repetitions=1,
        )
        assert report.query_count == 0
        full = report.variant("full_md5")
        assert full.avg_postings is None
        assert full.ratios_vs_idx1 == {"time": None, "bytes": None, "postings": None}

    def test_report_serializes(self, small_bench):
        _, _, _, _, report, _ = small_bench
        payload = report.to_dict()
        assert payload["query_count"] == 8
        assert "synthetic" in payload["note"]
        table = report.format_table()
        assert "idx1" in table and "full_md7" in table
