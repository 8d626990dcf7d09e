"""Retrieval-quality harness: precision/rank metrics, the gamma sweep, and
the heuristic-bound audit, plus the synthetic Zipf corpus generator."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .baselines import build_ball_tree, brute_force_topk, mip_search
from .basis import empty_proj_state
from .search import BoundVariant, compute_bound, query_descend_update, search_tree
from .tree import BuildConfig, PivotTree, build_tree
from .vectors import Corpus, SparseVector

METHODS = ("MTA-safe", "MTA-heuristic", "MIP")


def precision_at_k(retrieved: list[str], truth: list[str]) -> float:
    """Fraction of the truth set present in the retrieved list."""
    if not truth:
        raise ValueError("truth list must be non-empty")
    return len(set(retrieved) & set(truth)) / len(truth)


def spearman_distance(retrieved: list[str], truth: list[str]) -> float:
    """Footrule distance between the two rankings over the truth ids.

    A truth id absent from the retrieved list takes rank k+1, so the
    distance is 0 exactly when content and order both match.
    """
    if not truth:
        raise ValueError("truth list must be non-empty")
    if len(set(retrieved)) != len(retrieved):
        raise ValueError("duplicate ids in retrieved list")
    if len(set(truth)) != len(truth):
        raise ValueError("duplicate ids in truth list")
    k = len(truth)
    rank = {doc_id: i + 1 for i, doc_id in enumerate(retrieved)}
    return float(sum(abs(rank.get(doc_id, k + 1) - (i + 1)) for i, doc_id in enumerate(truth)))


def generate_corpus_counts(
    n_docs: int,
    vocab_size: int,
    avg_len: int,
    seed: int,
    zipf_exponent: float = 1.5,
    id_prefix: str = "doc",
) -> list[tuple[str, list[tuple[str, int]]]]:
    """Synthetic raw term counts with Zipf-distributed term popularity.

    Document lengths are Poisson around ``avg_len`` (at least one draw).
    The default exponent of 1.5 yields enough shared head mass that
    bound tightening in (0.5, 1] actually moves the prune/precision
    tradeoff; lighter tails leave every bound far above the k-th
    similarity.
    """
    if n_docs < 1 or vocab_size < 1 or avg_len < 1:
        raise ValueError("n_docs, vocab_size, and avg_len must all be >= 1")
    rng = np.random.default_rng(seed)
    probs = np.arange(1, vocab_size + 1, dtype=np.float64) ** -zipf_exponent
    probs /= probs.sum()
    width = max(5, len(str(n_docs - 1)))
    docs = []
    for i in range(n_docs):
        length = max(1, int(rng.poisson(avg_len)))
        draws = rng.choice(vocab_size, size=length, p=probs)
        terms, counts = np.unique(draws, return_counts=True)
        docs.append(
            (f"{id_prefix}{i:0{width}d}", [(f"t{t}", int(c)) for t, c in zip(terms, counts)])
        )
    return docs


@dataclass(frozen=True)
class QueryOutcome:
    method: str
    gamma: float
    query_id: str
    precision: float
    spearman: float
    prune_fraction: float
    scored: int


@dataclass(frozen=True)
class SweepAggregate:
    method: str
    gamma: float
    mean_precision: float
    mean_spearman: float
    mean_prune_fraction: float
    mean_scored: float
    n_queries: int


@dataclass
class EvalReport:
    """Sweep results: per-query rows, per-cell aggregates, run metadata."""

    header: list[tuple[str, str]]
    rows: list[QueryOutcome]
    aggregates: list[SweepAggregate]
    heuristic_violation_rate: float


def audit_heuristic_bound(
    corpus: Corpus,
    queries: list[tuple[str, SparseVector]],
    tree: PivotTree,
    tol: float = 1e-9,
) -> float:
    """Measured under-bounding rate of the heuristic node bound.

    Every (query, node) pair reachable by full descent is checked against
    the exact subtree maximum similarity; a pair counts as violated when
    the bound falls more than ``tol`` short.  Returns the violated
    fraction (0.0 for a single-leaf tree).
    """
    variant = BoundVariant("heuristic", 1.0)
    pairs = 0
    violations = 0
    for _, q in queries:
        sims = corpus.score_all(q)

        def walk(node, qs):
            nonlocal pairs, violations
            if node.is_leaf:
                return float(sims[node.doc_positions].max())
            qs_next = query_descend_update(qs, node, q)
            best = -np.inf
            for child in (node.left, node.right):
                bound = compute_bound(child, qs_next, variant)
                child_max = walk(child, qs_next)
                pairs += 1
                if bound < child_max - tol:
                    violations += 1
                best = max(best, child_max)
            return best

        walk(tree.root, empty_proj_state())
    return violations / pairs if pairs else 0.0


def run_sweep(
    corpus: Corpus,
    queries: list[tuple[str, SparseVector]],
    k: int,
    gammas: list[float],
    methods: tuple[str, ...] = METHODS,
    seed: int = 0,
    leaf_capacity: int = 32,
    candidate_count: int = 10,
    max_depth: int = 64,
) -> EvalReport:
    """Run every (method, gamma, query) cell against the brute-force truth.

    Both indexes are built once; truth is computed once per query.  The
    whole report is a pure function of its inputs.
    """
    if not queries:
        raise ValueError("need at least one query")
    if k < 1:
        raise ValueError("k must be >= 1")
    if any(not 0.0 < g <= 1.0 for g in gammas):
        raise ValueError("gammas must lie in (0, 1]")
    if any(a < b for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gammas must be non-increasing")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")

    n_docs = len(corpus)
    cfg = BuildConfig(leaf_capacity, candidate_count, seed, max_depth)
    pivot_tree = build_tree(corpus, cfg)
    ball_tree = build_ball_tree(corpus, leaf_capacity, seed) if "MIP" in methods else None
    truth = {qid: [doc for doc, _ in brute_force_topk(corpus, q, k)] for qid, q in queries}

    rows: list[QueryOutcome] = []
    aggregates: list[SweepAggregate] = []
    for method in methods:
        for gamma in gammas:
            cell: list[QueryOutcome] = []
            for qid, q in queries:
                if method == "MIP":
                    results, stats = mip_search(ball_tree, q, k, gamma)
                else:
                    tag = "safe" if method == "MTA-safe" else "heuristic"
                    results, stats = search_tree(pivot_tree, q, k, BoundVariant(tag, gamma))
                ids = [doc for doc, _ in results]
                cell.append(
                    QueryOutcome(
                        method,
                        gamma,
                        qid,
                        precision_at_k(ids, truth[qid]),
                        spearman_distance(ids, truth[qid]),
                        stats.pruned / n_docs,
                        stats.scored,
                    )
                )
            rows.extend(cell)
            aggregates.append(
                SweepAggregate(
                    method,
                    gamma,
                    float(np.mean([r.precision for r in cell])),
                    float(np.mean([r.spearman for r in cell])),
                    float(np.mean([r.prune_fraction for r in cell])),
                    float(np.mean([r.scored for r in cell])),
                    len(cell),
                )
            )

    violation_rate = audit_heuristic_bound(corpus, queries, pivot_tree)
    header = [
        ("n_docs", str(n_docs)),
        ("dim", str(corpus.dim)),
        ("n_queries", str(len(queries))),
        ("k", str(k)),
        ("methods", ",".join(methods)),
        ("gammas", ",".join(_fmt(g) for g in gammas)),
        ("seed", str(seed)),
        ("leaf_capacity", str(leaf_capacity)),
        ("candidate_count", str(candidate_count)),
        ("max_depth", str(max_depth)),
        ("heuristic_violation_rate", f"{violation_rate:.4f}"),
    ]
    if "generator" in corpus.meta:
        header.append(("generator", corpus.meta["generator"]))
    return EvalReport(header, rows, aggregates, violation_rate)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


ROW_COLUMNS = ["method", "gamma", "query_id", "precision", "spearman", "prune_fraction", "scored"]
AGG_COLUMNS = [
    "method",
    "gamma",
    "mean_precision",
    "mean_spearman",
    "mean_prune_fraction",
    "mean_scored",
    "n_queries",
]


def write_report_csv(report: EvalReport, rows_path, agg_path) -> None:
    """Emit the per-query and aggregate CSVs with fixed columns and formats."""
    with open(rows_path, "w", newline="") as fh:
        for key, value in report.header:
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROW_COLUMNS)
        for r in report.rows:
            writer.writerow(
                [r.method, _fmt(r.gamma), r.query_id, _fmt(r.precision), _fmt(r.spearman),
                 _fmt(r.prune_fraction), r.scored]
            )
    with open(agg_path, "w", newline="") as fh:
        for key, value in report.header:
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_COLUMNS)
        for a in report.aggregates:
            writer.writerow(
                [a.method, _fmt(a.gamma), _fmt(a.mean_precision), _fmt(a.mean_spearman),
                 _fmt(a.mean_prune_fraction), _fmt(a.mean_scored), a.n_queries]
            )
