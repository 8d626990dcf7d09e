"""Top-k cosine retrieval for sparse tf-idf corpora via an orthogonal
pivot tree, with a brute-force oracle, a ball-tree inner-product baseline,
and a precision-versus-prunes evaluation harness."""

from .baselines import BallNode, BallTree, brute_force_topk, build_ball_tree, mip_bound, mip_search
from .basis import (
    Basis,
    ExtensionRecord,
    ProjState,
    empty_basis,
    empty_proj_state,
    extend,
    materialize,
    residual_norm_sq,
    update_proj,
)
from .corpus_io import (
    load_index,
    load_queries,
    parse_corpus,
    save_index,
    write_raw_corpus,
    write_weighted_corpus,
)
from .errors import (
    CorpusFormatError,
    DegeneratePivot,
    DimensionMismatch,
    IndexFormatError,
    NumericalDrift,
    PivotSearchError,
    UnsplittableNode,
)
from .estimators import BallTreeIndex, BruteForceIndex, PivotTreeIndex
from .evaluation import (
    METHODS,
    EvalReport,
    audit_heuristic_bound,
    generate_corpus_counts,
    precision_at_k,
    run_sweep,
    spearman_distance,
    write_report_csv,
)
from .search import BoundVariant, SearchStats, TopKQueue, compute_bound, query_descend_update, search_tree
from .tree import (
    BuildConfig,
    DocProjections,
    PivotNode,
    PivotTree,
    build_tree,
    make_split,
    select_pivot,
    update_projections,
)
from .vectors import Corpus, SparseVector, dot, norm_sq, normalize, tfidf_weigh, weigh_query

__version__ = "0.1.0"

__all__ = [
    "BallNode",
    "BallTree",
    "BallTreeIndex",
    "Basis",
    "BoundVariant",
    "BruteForceIndex",
    "BuildConfig",
    "Corpus",
    "CorpusFormatError",
    "DegeneratePivot",
    "DimensionMismatch",
    "DocProjections",
    "EvalReport",
    "ExtensionRecord",
    "IndexFormatError",
    "METHODS",
    "NumericalDrift",
    "PivotNode",
    "PivotSearchError",
    "PivotTree",
    "PivotTreeIndex",
    "ProjState",
    "SearchStats",
    "SparseVector",
    "TopKQueue",
    "UnsplittableNode",
    "audit_heuristic_bound",
    "brute_force_topk",
    "build_ball_tree",
    "build_tree",
    "compute_bound",
    "dot",
    "empty_basis",
    "empty_proj_state",
    "extend",
    "generate_corpus_counts",
    "load_index",
    "load_queries",
    "make_split",
    "materialize",
    "mip_bound",
    "mip_search",
    "norm_sq",
    "normalize",
    "parse_corpus",
    "precision_at_k",
    "query_descend_update",
    "residual_norm_sq",
    "run_sweep",
    "save_index",
    "search_tree",
    "select_pivot",
    "spearman_distance",
    "tfidf_weigh",
    "update_proj",
    "update_projections",
    "weigh_query",
    "write_raw_corpus",
    "write_report_csv",
    "write_weighted_corpus",
]
