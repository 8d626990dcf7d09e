"""Command-line surface: gen, build, search, eval."""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from .baselines import BallTree, build_ball_tree, mip_search
from .corpus_io import load_index, load_queries, parse_corpus, save_index, write_raw_corpus
from .errors import PivotSearchError
from .evaluation import METHODS, generate_corpus_counts, run_sweep, write_report_csv
from .search import BoundVariant, search_tree
from .tree import BuildConfig, PivotTree, build_tree
from .vectors import Corpus, SparseVector, normalize, weigh_counts


def _cmd_gen(args) -> int:
    docs = generate_corpus_counts(args.docs, args.vocab, args.avg_len, args.seed, args.zipf)
    meta = {
        "generator": f"docs={args.docs} vocab={args.vocab} avg_len={args.avg_len} "
        f"seed={args.seed} zipf={args.zipf:g}"
    }
    write_raw_corpus(args.out, docs, meta)
    print(f"wrote {args.docs} documents to {args.out}")
    return 0


def _cmd_build(args) -> int:
    corpus = parse_corpus(args.corpus)
    if args.type == "mta":
        cfg = BuildConfig(
            leaf_capacity=args.leaf,
            candidate_count=args.candidates,
            rng_seed=args.seed,
            max_depth=args.max_depth,
            selector=args.selector,
        )
        index: PivotTree | BallTree = build_tree(corpus, cfg)
        index.bound_default = args.bound
    else:
        index = build_ball_tree(corpus, args.leaf, args.seed)
    save_index(args.out, index)
    print(f"built {args.type} index over {len(corpus)} documents (dim {corpus.dim}) -> {args.out}")
    return 0


def _parse_weighted_pair(token: str) -> tuple[int, float] | None:
    idx_text, colon, weight_text = token.partition(":")
    if not colon:
        return None
    try:
        return int(idx_text), float(weight_text)
    except ValueError:
        return None


def _resolve_query(index: PivotTree | BallTree, corpus: Corpus, text: str) -> SparseVector:
    """Interpret --query as a doc_id, a weighted line, or free text."""
    if text in corpus.doc_ids:
        return corpus.vector(corpus.position(text))
    tokens = text.split()
    if not tokens:
        raise ValueError("empty query")
    pairs = [_parse_weighted_pair(t) for t in tokens]
    if all(p is not None for p in pairs):
        acc: dict[int, float] = {}
        for idx, weight in pairs:
            if idx < 0 or idx >= corpus.dim:
                raise ValueError(f"query index {idx} out of range for dim {corpus.dim}")
            acc[idx] = acc.get(idx, 0.0) + weight
        return normalize(SparseVector.from_pairs(acc.items(), corpus.dim))
    # free text: weight with the index's persisted tables when it has them
    if isinstance(index, PivotTree) and index.vocab and index.idf is not None:
        vocab, idf = index.vocab, index.idf
    else:
        vocab, idf = corpus.vocab, corpus.idf
    return weigh_counts(vocab, idf, corpus.dim, sorted(Counter(tokens).items()))


def _cmd_search(args) -> int:
    corpus = parse_corpus(args.corpus)
    index = load_index(args.index, corpus)
    q = _resolve_query(index, corpus, args.query)
    if isinstance(index, PivotTree):
        variant = BoundVariant(args.bound or index.bound_default, args.gamma)
        results, stats = search_tree(index, q, args.k, variant)
    else:
        if args.bound is not None:
            raise ValueError("--bound applies only to mta indexes")
        results, stats = mip_search(index, q, args.k, args.gamma)
    for doc_id, sim in results:
        print(f"{doc_id}\t{sim:.9f}")
    print(f"scored={stats.scored} pruned={stats.pruned}")
    return 0


def _cmd_eval(args) -> int:
    corpus = parse_corpus(args.corpus)
    queries = load_queries(args.queries, corpus)
    gammas = [float(g) for g in args.gammas.split(",") if g.strip()]
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    report = run_sweep(
        corpus,
        queries,
        args.k,
        gammas,
        methods=methods,
        seed=args.seed,
        leaf_capacity=args.leaf,
        candidate_count=args.candidates,
    )
    rows_path = Path(args.out)
    agg_path = rows_path.with_suffix(".agg" + rows_path.suffix) if rows_path.suffix else rows_path.with_name(rows_path.name + ".agg")
    write_report_csv(report, rows_path, agg_path)
    print(f"wrote {len(report.rows)} rows to {rows_path} and {len(report.aggregates)} aggregates to {agg_path}")
    print(f"heuristic_violation_rate={report.heuristic_violation_rate:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotsearch",
        description="Pivot-tree and ball-tree top-k cosine retrieval over sparse tf-idf corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic Zipf corpus file")
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--vocab", type=int, required=True)
    p.add_argument("--avg-len", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zipf", type=float, default=1.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("build", help="build and persist an index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--type", choices=("mta", "mip"), default="mta")
    p.add_argument("--leaf", type=int, default=32)
    p.add_argument("--candidates", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--selector", choices=("trace", "literal"), default="trace")
    p.add_argument("--bound", choices=("safe", "heuristic"), default="safe")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("search", help="run one query against a persisted index")
    p.add_argument("--index", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--query", required=True, help="doc_id, 'idx:weight ...' line, or free text")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--bound", choices=("safe", "heuristic"), default=None)
    p.add_argument("--gamma", type=float, default=1.0)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("eval", help="run the gamma sweep and emit CSV reports")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--gammas", default="1.0,0.95,0.9,0.8,0.7,0.6,0.5")
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--leaf", type=int, default=32)
    p.add_argument("--candidates", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PivotSearchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
