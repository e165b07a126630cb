"""Command line entry point.

Exit codes: 0 success (an empty result is a success), 1 usage error,
2 operational error (missing index, unreadable corpus, bad files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .builder import MODE_FULL, MODE_IDX1, TextCorpus, build_index
from .engine import SearchEngine
from .errors import QueryError, SearchError
from .index import Index
from .lexicon import FlList, LemmaDictionary, LexiconConfig

USAGE_EXIT = 1
OPERATIONAL_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser) -> None:
    parser.add_argument("--max-distance", type=int, default=5,
                        help="proximity radius in word positions (default 5)")
    parser.add_argument("--sw-count", type=int, default=700,
                        help="number of stop-lemma ranks (default 700)")
    parser.add_argument("--fu-count", type=int, default=2100,
                        help="number of frequently-used ranks (default 2100)")
    parser.add_argument("--min-count", type=int, default=2,
                        help="occurrences needed for a lemma to be ranked (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="proxsearch",
                     description="proximity full-text search over a document corpus")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="index a corpus directory")
    p_build.add_argument("--corpus", required=True, help="directory of UTF-8 text files")
    p_build.add_argument("--index", required=True, help="output index directory")
    p_build.add_argument("--mode", choices=[MODE_IDX1, MODE_FULL], default=MODE_FULL)
    p_build.add_argument("--dictionary", help="lemma dictionary file (word<TAB>lemma1,lemma2)")
    p_build.add_argument("--fl-list", help="reuse a previously saved ranked lemma list")
    p_build.add_argument("--overwrite", action="store_true")
    _add_config_flags(p_build)

    p_search = sub.add_parser("search", help="run a query against an index")
    p_search.add_argument("--index", required=True)
    p_search.add_argument("--output", choices=["text", "json"], default="text")
    p_search.add_argument("query", nargs="+", help="query words (at most 9)")

    p_stats = sub.add_parser("stats", help="describe an index")
    p_stats.add_argument("--index", required=True)
    p_stats.add_argument("--output", choices=["text", "json"], default="text")

    p_bench = sub.add_parser("bench", help="compare idx1 against full indexes")
    p_bench.add_argument("--corpus", required=True)
    p_bench.add_argument("--queries", required=True, help="file with one query per line")
    p_bench.add_argument("--work-dir", required=True, help="where variant indexes are built")
    p_bench.add_argument("--max-distances", default="5,7,9",
                         help="comma list of radii for the full variants")
    p_bench.add_argument("--repetitions", type=int, default=3)
    p_bench.add_argument("--dictionary")
    p_bench.add_argument("--report", help="also write the report as JSON to this path")
    p_bench.add_argument("--output", choices=["text", "json"], default="text")
    _add_config_flags(p_bench)

    p_gen = sub.add_parser("gen-corpus", help="write a synthetic Zipf corpus")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--docs", type=int, default=1000)
    p_gen.add_argument("--vocab", type=int, default=10000)
    p_gen.add_argument("--zipf", type=float, default=1.0)
    p_gen.add_argument("--doc-len", type=int, default=500)
    return parser


def _config(args) -> LexiconConfig:
    try:
        return LexiconConfig(
            sw_count=args.sw_count,
            fu_count=args.fu_count,
            max_distance=args.max_distance,
            min_count=args.min_count,
        )
    except ValueError as exc:
        raise QueryError(str(exc))


def cmd_build(args) -> int:
    config = _config(args)
    corpus = TextCorpus(args.corpus)
    dictionary = (
        LemmaDictionary.load(args.dictionary)
        if args.dictionary
        else LemmaDictionary.identity()
    )
    fl_list = FlList.load(args.fl_list, config) if args.fl_list else None
    manifest = build_index(
        corpus,
        args.index,
        config,
        dictionary=dictionary,
        fl_list=fl_list,
        mode=args.mode,
        overwrite=args.overwrite,
    )
    print(f"indexed {manifest['doc_count']} documents into {args.index}")
    for family, summary in sorted(manifest["families"].items()):
        print(
            f"  {family}: {summary['keys']} keys, {summary['records']} records, "
            f"{summary['data_bytes']} data bytes"
        )
    return 0


def cmd_search(args) -> int:
    index = Index(args.index)
    engine = SearchEngine(index)
    query = " ".join(args.query)
    fragments = engine.search(query)
    if args.output == "json":
        print(
            json.dumps(
                {
                    "query": query,
                    "fragments": [
                        {
                            "doc_id": f.doc_id,
                            "doc_name": index.doc_names[f.doc_id],
                            "start": f.start,
                            "end": f.end,
                            "relevance": f.relevance,
                        }
                        for f in fragments
                    ],
                },
                sort_keys=True,
            )
        )
    else:
        for f in fragments:
            print(f"{f.doc_id}\t{f.start}\t{f.end}\t{f.relevance:.6f}")
    return 0


def cmd_stats(args) -> int:
    stats = Index(args.index).stats()
    if args.output == "json":
        print(json.dumps(stats, sort_keys=True))
        return 0
    print(f"index {stats['path']} (mode {stats['mode']})")
    config = stats["config"]
    print(
        f"  config: max_distance={config['max_distance']} sw_count={config['sw_count']} "
        f"fu_count={config['fu_count']} min_count={config['min_count']}"
    )
    print(f"  documents: {stats['doc_count']}")
    classes = stats["lemma_classes"]
    print(
        f"  lemma classes: stop={classes['stop']} "
        f"frequently_used={classes['frequently_used']} ordinary={classes['ordinary']} "
        f"(ranked {stats['ranked_lemmas']})"
    )
    for family, summary in sorted(stats["families"].items()):
        print(
            f"  {family}: {summary['keys']} keys, {summary['records']} records, "
            f"{summary['data_bytes']} data bytes"
        )
    return 0


def cmd_bench(args) -> int:
    config = _config(args)
    try:
        mds = [int(part) for part in args.max_distances.split(",") if part.strip()]
    except ValueError:
        raise QueryError(f"bad --max-distances value: {args.max_distances!r}")
    if not mds:
        raise QueryError("--max-distances must list at least one radius")
    queries_path = Path(args.queries)
    if not queries_path.exists():
        raise SearchError(f"query file not found: {queries_path}")
    queries = [
        line.strip()
        for line in queries_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    dictionary = LemmaDictionary.load(args.dictionary) if args.dictionary else None
    report = bench_mod.run_bench(
        args.corpus,
        queries,
        args.work_dir,
        config,
        max_distances=mds,
        repetitions=args.repetitions,
        dictionary=dictionary,
    )
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n",
            encoding="utf-8",
        )
    if args.output == "json":
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(report.format_table())
    return 0


def cmd_gen_corpus(args) -> int:
    bench_mod.generate_corpus(
        seed=args.seed,
        doc_count=args.docs,
        vocab_size=args.vocab,
        zipf_exponent=args.zipf,
        doc_len=args.doc_len,
        out_dir=args.out,
    )
    print(f"wrote {args.docs} documents to {args.out}")
    return 0


_COMMANDS = {
    "build": cmd_build,
    "search": cmd_search,
    "stats": cmd_stats,
    "bench": cmd_bench,
    "gen-corpus": cmd_gen_corpus,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except QueryError as exc:
        print(f"proxsearch: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except SearchError as exc:
        print(f"proxsearch: {exc}", file=sys.stderr)
        return OPERATIONAL_EXIT
    except OSError as exc:
        print(f"proxsearch: {exc}", file=sys.stderr)
        return OPERATIONAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
