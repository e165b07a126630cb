"""Benchmark harness: plain positional baseline vs. the composite family.

Builds the baseline index ("idx1") and one full index per configured
proximity radius over the same corpus, executes a query set against each,
and reports average query time, average decoded bytes, and average
postings processed, plus ratios against the baseline and against the
smallest-radius variant. Searches run in a single thread; counters come
from the storage boundary, so two runs of the same setup agree exactly
(timings aside).
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .builder import MODE_FULL, MODE_IDX1, TextCorpus, build_index
from .engine import SearchEngine
from .errors import UnsupportedQueryError
from .index import Index
from .lexicon import FlList, LemmaClass, LemmaDictionary, LexiconConfig

QUERY_SET_NOTE = (
    "query set is synthetic: lemmas sampled proportionally to corpus frequency"
)


def generate_corpus(
    seed: int,
    doc_count: int,
    vocab_size: int,
    zipf_exponent: float,
    doc_len: int = 500,
    out_dir: Path | str | None = None,
) -> list[list[str]]:
    """Deterministic corpus whose word ranks follow a Zipf distribution.

    Word ``w00001`` is the most frequent. With ``out_dir`` set, documents
    are also written as ``00000.txt``, ``00001.txt``, ... so the same
    seed always produces byte-identical files.
    """
    if vocab_size < 1 or doc_len < 1 or doc_count < 0:
        raise ValueError("corpus parameters must be positive")
    width = max(5, len(str(vocab_size)))
    words = [f"w{rank:0{width}d}" for rank in range(1, vocab_size + 1)]
    weights = [rank ** -zipf_exponent for rank in range(1, vocab_size + 1)]
    cumulative = []
    total = 0.0
    for weight in weights:
        total += weight
        cumulative.append(total)
    rng = random.Random(seed)
    documents = [
        rng.choices(words, cum_weights=cumulative, k=doc_len)
        for _ in range(doc_count)
    ]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name_width = max(5, len(str(max(doc_count - 1, 0))))
        for doc_id, doc in enumerate(documents):
            (out / f"{doc_id:0{name_width}d}.txt").write_text(
                " ".join(doc) + "\n", encoding="utf-8"
            )
    return documents


def generate_queries(
    fl_list: FlList,
    count: int,
    lengths: Sequence[int],
    seed: int,
    lemma_class: LemmaClass = LemmaClass.STOP,
) -> list[str]:
    """Sample queries of the given class, lemma probability ~ frequency."""
    population = [e for e in fl_list.ranked if e.lemma_class is lemma_class and e.count > 0]
    if not population:
        raise ValueError(f"no ranked lemmas of class {lemma_class.value}")
    lemmas = [e.lemma for e in population]
    weights = [e.count for e in population]
    rng = random.Random(seed)
    queries = []
    for i in range(count):
        length = lengths[i % len(lengths)]
        queries.append(" ".join(rng.choices(lemmas, weights=weights, k=length)))
    return queries


@dataclass
class VariantResult:
    name: str
    mode: str
    max_distance: int
    executed: int = 0
    skipped: int = 0
    avg_time_s: float | None = None
    avg_bytes_read: float | None = None
    avg_postings: float | None = None
    by_length: dict[int, dict] = field(default_factory=dict)
    ratios_vs_idx1: dict = field(default_factory=dict)
    ratios_vs_smallest: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "max_distance": self.max_distance,
            "executed": self.executed,
            "skipped": self.skipped,
            "avg_time_s": self.avg_time_s,
            "avg_bytes_read": self.avg_bytes_read,
            "avg_postings": self.avg_postings,
            "by_length": {str(k): v for k, v in sorted(self.by_length.items())},
            "ratios_vs_idx1": self.ratios_vs_idx1,
            "ratios_vs_smallest": self.ratios_vs_smallest,
        }


@dataclass
class BenchReport:
    query_count: int
    repetitions: int
    variants: list[VariantResult]
    note: str = QUERY_SET_NOTE

    def to_dict(self) -> dict:
        return {
            "note": self.note,
            "query_count": self.query_count,
            "repetitions": self.repetitions,
            "variants": [v.to_dict() for v in self.variants],
        }

    def variant(self, name: str) -> VariantResult:
        for variant in self.variants:
            if variant.name == name:
                return variant
        raise KeyError(name)

    def format_table(self) -> str:
        header = (
            f"{'variant':<12} {'md':>3} {'run':>5} {'skip':>5} "
            f"{'avg time (s)':>13} {'avg bytes':>12} {'avg postings':>13}"
        )
        lines = [header, "-" * len(header)]
        for v in self.variants:
            lines.append(
                f"{v.name:<12} {v.max_distance:>3} {v.executed:>5} {v.skipped:>5} "
                f"{_fmt(v.avg_time_s, '13.6f')} {_fmt(v.avg_bytes_read, '12.1f')} "
                f"{_fmt(v.avg_postings, '13.1f')}"
            )
        lines.append(f"note: {self.note}")
        return "\n".join(lines)


def _fmt(value, spec) -> str:
    width = int(spec.split(".")[0])
    return f"{value:>{spec}}" if value is not None else " " * (width - 3) + "n/a"


def _average(values: list[float]) -> float | None:
    return statistics.fmean(values) if values else None


def run_bench(
    corpus_dir: Path | str,
    queries: Sequence[str],
    work_dir: Path | str,
    config: LexiconConfig,
    max_distances: Sequence[int] = (5, 7, 9),
    repetitions: int = 3,
    dictionary: LemmaDictionary | None = None,
) -> BenchReport:
    """Build all variants under ``work_dir`` and measure the query set.

    Every query runs ``repetitions`` times per variant, single-threaded;
    recorded time is the mean of the repetitions. Queries a variant
    cannot evaluate are recorded as skipped.
    """
    corpus = TextCorpus(corpus_dir)
    dictionary = dictionary or LemmaDictionary.identity()
    work_dir = Path(work_dir)
    mds = sorted(max_distances)
    fl_list = FlList.build(
        (words for _, words in corpus.iter_documents()), dictionary, config
    )

    variants: list[tuple[str, str, int]] = [("idx1", MODE_IDX1, mds[0])]
    variants += [(f"full_md{md}", MODE_FULL, md) for md in mds]
    results = []
    for name, mode, md in variants:
        variant_config = LexiconConfig(
            sw_count=config.sw_count,
            fu_count=config.fu_count,
            max_distance=md,
            min_count=config.min_count,
        )
        out = work_dir / name
        build_index(
            corpus,
            out,
            variant_config,
            dictionary=dictionary,
            fl_list=fl_list,
            mode=mode,
            overwrite=True,
        )
        results.append(_measure(name, mode, md, out, queries, repetitions))

    _attach_ratios(results, mds)
    return BenchReport(len(queries), repetitions, results)


def _measure(name, mode, md, index_dir, queries, repetitions) -> VariantResult:
    index = Index(index_dir)
    engine = SearchEngine(index)
    result = VariantResult(name, mode, md)
    times: list[float] = []
    bytes_read: list[int] = []
    postings: list[int] = []
    per_length: dict[int, dict[str, list]] = {}
    for query in queries:
        length = len(query.split())
        try:
            query_times = []
            for _ in range(repetitions):
                index.counters.reset()
                started = time.perf_counter()
                engine.search(query)
                query_times.append(time.perf_counter() - started)
        except UnsupportedQueryError:
            result.skipped += 1
            continue
        result.executed += 1
        elapsed = statistics.fmean(query_times)
        times.append(elapsed)
        bytes_read.append(index.counters.bytes_read)
        postings.append(index.counters.postings)
        bucket = per_length.setdefault(
            length, {"times": [], "bytes": [], "postings": []}
        )
        bucket["times"].append(elapsed)
        bucket["bytes"].append(index.counters.bytes_read)
        bucket["postings"].append(index.counters.postings)
    result.avg_time_s = _average(times)
    result.avg_bytes_read = _average(bytes_read)
    result.avg_postings = _average(postings)
    result.by_length = {
        length: {
            "executed": len(bucket["times"]),
            "avg_time_s": _average(bucket["times"]),
            "avg_bytes_read": _average(bucket["bytes"]),
            "avg_postings": _average(bucket["postings"]),
        }
        for length, bucket in per_length.items()
    }
    return result


def _ratio(numerator, denominator) -> float | None:
    if numerator is None or not denominator:
        return None
    return numerator / denominator


def _attach_ratios(results: list[VariantResult], mds: Sequence[int]) -> None:
    baseline = results[0]
    smallest = results[1] if len(results) > 1 else None
    for variant in results[1:]:
        variant.ratios_vs_idx1 = {
            "time": _ratio(baseline.avg_time_s, variant.avg_time_s),
            "bytes": _ratio(baseline.avg_bytes_read, variant.avg_bytes_read),
            "postings": _ratio(baseline.avg_postings, variant.avg_postings),
        }
        if smallest is not None and variant is not smallest:
            variant.ratios_vs_smallest = {
                "time": _ratio(variant.avg_time_s, smallest.avg_time_s),
                "bytes": _ratio(variant.avg_bytes_read, smallest.avg_bytes_read),
                "postings": _ratio(variant.avg_postings, smallest.avg_postings),
            }
