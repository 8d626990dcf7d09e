"""File formats: line-oriented corpora and the JSON index container.

Corpus files are one document per line, ``doc_id<TAB>pairs``, where pairs
are ``term:count`` (raw mode) or ``index:weight`` (weighted mode).  Header
lines start with ``#``; ``#format raw|weighted`` is mandatory, ``#dim`` is
optional in weighted mode, any other ``#key value`` line is kept as
metadata.

Indexes persist as a single JSON document with a sha256 footer checksum.
Floats are written with Python's shortest round-trip repr, so statistics
and coefficients survive save/load bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .baselines import BallNode, BallTree
from .basis import ExtensionRecord
from .errors import CorpusFormatError, IndexFormatError
from .tree import BuildConfig, PivotNode, PivotTree
from .vectors import Corpus, SparseVector, normalize, tfidf_weigh, weigh_query

INDEX_MAGIC = "pivotsearch-index"
INDEX_VERSION = 1


# ----------------------------------------------------------------------
# corpus files


def _read_lines(path) -> tuple[dict[str, str], list[tuple[int, str, list[str]]]]:
    """Split a corpus file into header metadata and raw data rows."""
    meta: dict[str, str] = {}
    rows: list[tuple[int, str, list[str]]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                if rows:
                    raise CorpusFormatError(f"line {lineno}: header line after data began")
                body = line[1:].strip()
                if not body:
                    continue
                key, _, value = body.partition(" ")
                meta[key] = value.strip()
                continue
            doc_id, tab, rest = line.partition("\t")
            if not tab or not doc_id:
                raise CorpusFormatError(f"line {lineno}: expected 'doc_id<TAB>pairs'")
            rows.append((lineno, doc_id, rest.split()))
    if "format" not in meta:
        raise CorpusFormatError("missing '#format raw|weighted' header line")
    if meta["format"] not in ("raw", "weighted"):
        raise CorpusFormatError(f"unknown format {meta['format']!r}")
    return meta, rows


def _parse_raw_rows(rows) -> list[tuple[str, list[tuple[str, int]]]]:
    seen: set[str] = set()
    out = []
    for lineno, doc_id, pairs in rows:
        if doc_id in seen:
            raise CorpusFormatError(f"line {lineno}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        counts = []
        for pair in pairs:
            term, colon, count_text = pair.rpartition(":")
            if not colon or not term:
                raise CorpusFormatError(f"line {lineno}: malformed pair {pair!r}")
            try:
                count = int(count_text)
            except ValueError:
                raise CorpusFormatError(f"line {lineno}: count {count_text!r} is not an integer") from None
            if count <= 0:
                raise CorpusFormatError(f"line {lineno}: count for term {term!r} must be positive")
            counts.append((term, count))
        if not counts:
            raise CorpusFormatError(f"line {lineno}: document {doc_id!r} has no terms")
        out.append((doc_id, counts))
    return out


def _parse_weighted_rows(rows, declared_dim: int | None) -> list[tuple[str, list[tuple[int, float]]]]:
    seen: set[str] = set()
    out = []
    for lineno, doc_id, pairs in rows:
        if doc_id in seen:
            raise CorpusFormatError(f"line {lineno}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        entries = []
        for pair in pairs:
            idx_text, colon, weight_text = pair.partition(":")
            if not colon:
                raise CorpusFormatError(f"line {lineno}: malformed pair {pair!r}")
            try:
                idx = int(idx_text)
                weight = float(weight_text)
            except ValueError:
                raise CorpusFormatError(f"line {lineno}: malformed pair {pair!r}") from None
            if idx < 0:
                raise CorpusFormatError(f"line {lineno}: negative term index {idx}")
            if declared_dim is not None and idx >= declared_dim:
                raise CorpusFormatError(f"line {lineno}: index {idx} exceeds declared dim {declared_dim}")
            if not np.isfinite(weight):
                raise CorpusFormatError(f"line {lineno}: non-finite weight {weight_text!r}")
            if weight != 0.0:
                entries.append((idx, weight))
        if not entries:
            raise CorpusFormatError(f"line {lineno}: document {doc_id!r} has no nonzero weights")
        out.append((doc_id, entries))
    return out


def parse_corpus(path) -> Corpus:
    """Read a corpus file; raw mode applies tf-idf, weighted only normalizes."""
    meta, rows = _read_lines(path)
    if not rows:
        raise CorpusFormatError("corpus file contains no documents")
    if meta["format"] == "raw":
        corpus = tfidf_weigh(_parse_raw_rows(rows))
        corpus.meta = meta
        return corpus
    declared_dim = None
    if "dim" in meta:
        try:
            declared_dim = int(meta["dim"])
        except ValueError:
            raise CorpusFormatError(f"bad '#dim' value {meta['dim']!r}") from None
    docs = _parse_weighted_rows(rows, declared_dim)
    dim = declared_dim
    if dim is None:
        dim = 1 + max(idx for _, entries in docs for idx, _ in entries)
    vectors = [(doc_id, normalize(SparseVector.from_pairs(entries, dim))) for doc_id, entries in docs]
    return Corpus.from_vectors(vectors, meta=meta)


def load_queries(path, corpus: Corpus) -> list[tuple[str, SparseVector]]:
    """Read a query file and place every query in the corpus term space."""
    meta, rows = _read_lines(path)
    if not rows:
        raise CorpusFormatError("query file contains no queries")
    if meta["format"] == "raw":
        return [
            (qid, weigh_query(corpus, counts, label=f"query {qid!r}"))
            for qid, counts in _parse_raw_rows(rows)
        ]
    docs = _parse_weighted_rows(rows, corpus.dim)
    return [(qid, normalize(SparseVector.from_pairs(entries, corpus.dim))) for qid, entries in docs]


def write_raw_corpus(path, raw_counts, meta: dict[str, str] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#format raw\n")
        for key, value in (meta or {}).items():
            fh.write(f"#{key} {value}\n")
        for doc_id, counts in raw_counts:
            pairs = " ".join(f"{term}:{count}" for term, count in counts)
            fh.write(f"{doc_id}\t{pairs}\n")


def write_weighted_corpus(path, corpus: Corpus) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#format weighted\n")
        fh.write(f"#dim {corpus.dim}\n")
        for pos, doc_id in enumerate(corpus.doc_ids):
            vec = corpus.vector(pos)
            pairs = " ".join(f"{i}:{v!r}" for i, v in zip(vec.indices.tolist(), vec.values.tolist()))
            fh.write(f"{doc_id}\t{pairs}\n")


# ----------------------------------------------------------------------
# index files


def _doc_hash(corpus: Corpus) -> str:
    return hashlib.sha256("\n".join(corpus.doc_ids).encode("utf-8")).hexdigest()


def _checksum(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _dump_pivot_node(node: PivotNode, out: list[dict]) -> None:
    if node.is_leaf:
        out.append(
            {
                "kind": "leaf",
                "min": node.min_proj_sq,
                "max": node.max_proj_sq,
                "size": node.size,
                "docs": node.doc_positions.tolist(),
            }
        )
        return
    out.append(
        {
            "kind": "internal",
            "min": node.min_proj_sq,
            "max": node.max_proj_sq,
            "size": node.size,
            "pivot": node.pivot_pos,
            "alpha": node.ext.alpha,
            "w": node.ext.w.tolist(),
            "pivot_dots": node.ext.pivot_dots.tolist(),
            "split": node.split_threshold,
        }
    )
    _dump_pivot_node(node.left, out)
    _dump_pivot_node(node.right, out)


def _load_pivot_node(records, corpus: Corpus) -> PivotNode:
    rec = next(records)
    if rec["kind"] == "leaf":
        return PivotNode(
            min_proj_sq=rec["min"],
            max_proj_sq=rec["max"],
            size=rec["size"],
            doc_positions=np.array(rec["docs"], dtype=np.int64),
        )
    node = PivotNode(
        min_proj_sq=rec["min"],
        max_proj_sq=rec["max"],
        size=rec["size"],
        pivot_pos=rec["pivot"],
        pivot=corpus.vector(rec["pivot"]),
        ext=ExtensionRecord(
            rec["alpha"],
            np.array(rec["w"], dtype=np.float64),
            np.array(rec["pivot_dots"], dtype=np.float64),
        ),
        split_threshold=rec["split"],
    )
    node.left = _load_pivot_node(records, corpus)
    node.right = _load_pivot_node(records, corpus)
    return node


def _dump_ball_node(node: BallNode, out: list[dict]) -> None:
    nz = np.nonzero(node.centroid)[0]
    record = {
        "kind": "leaf" if node.is_leaf else "internal",
        "radius": node.radius,
        "size": node.size,
        "cent_idx": nz.tolist(),
        "cent_val": node.centroid[nz].tolist(),
    }
    if node.is_leaf:
        record["docs"] = node.doc_positions.tolist()
        out.append(record)
        return
    out.append(record)
    _dump_ball_node(node.left, out)
    _dump_ball_node(node.right, out)


def _load_ball_node(records, dim: int) -> BallNode:
    rec = next(records)
    centroid = np.zeros(dim, dtype=np.float64)
    centroid[np.array(rec["cent_idx"], dtype=np.int64)] = rec["cent_val"]
    node = BallNode(centroid, rec["radius"], rec["size"])
    if rec["kind"] == "leaf":
        node.doc_positions = np.array(rec["docs"], dtype=np.int64)
        return node
    node.left = _load_ball_node(records, dim)
    node.right = _load_ball_node(records, dim)
    return node


def save_index(path, index: PivotTree | BallTree) -> None:
    """Serialize a built index (either kind) with a footer checksum."""
    corpus = index.corpus
    if isinstance(index, PivotTree):
        nodes: list[dict] = []
        _dump_pivot_node(index.root, nodes)
        vocab = None
        if index.vocab:
            ordered = sorted(index.vocab.items(), key=lambda kv: kv[1])
            vocab = [term for term, _ in ordered]
        body = {
            "magic": INDEX_MAGIC,
            "version": INDEX_VERSION,
            "type": "mta",
            "dim": corpus.dim,
            "n_docs": len(corpus),
            "doc_hash": _doc_hash(corpus),
            "config": {
                "leaf_capacity": index.config.leaf_capacity,
                "candidate_count": index.config.candidate_count,
                "rng_seed": index.config.rng_seed,
                "max_depth": index.config.max_depth,
                "selector": index.config.selector,
            },
            "bound_default": index.bound_default,
            "vocab": vocab,
            "idf": index.idf.tolist() if index.idf is not None else None,
            "nodes": nodes,
        }
    elif isinstance(index, BallTree):
        nodes = []
        _dump_ball_node(index.root, nodes)
        body = {
            "magic": INDEX_MAGIC,
            "version": INDEX_VERSION,
            "type": "mip",
            "dim": corpus.dim,
            "n_docs": len(corpus),
            "doc_hash": _doc_hash(corpus),
            "config": {"leaf_capacity": index.leaf_capacity, "rng_seed": index.seed},
            "bound_default": None,
            "vocab": None,
            "idf": None,
            "nodes": nodes,
        }
    else:
        raise TypeError(f"cannot serialize {type(index).__name__}")
    payload = dict(body)
    payload["checksum"] = _checksum(body)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"), allow_nan=False)
        fh.write("\n")


def load_index(path, corpus: Corpus) -> PivotTree | BallTree:
    """Load an index and attach it to the corpus it was built from."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"not a valid index file: {exc}") from None
    if not isinstance(payload, dict) or payload.get("magic") != INDEX_MAGIC:
        raise IndexFormatError("not a pivotsearch index file")
    if payload.get("version") != INDEX_VERSION:
        raise IndexFormatError(f"unsupported index version {payload.get('version')!r}")
    stored_checksum = payload.pop("checksum", None)
    if stored_checksum != _checksum(payload):
        raise IndexFormatError("index checksum mismatch; file is corrupt")
    if payload["dim"] != corpus.dim or payload["n_docs"] != len(corpus):
        raise IndexFormatError(
            f"index was built on a corpus with n_docs={payload['n_docs']} dim={payload['dim']}, "
            f"got n_docs={len(corpus)} dim={corpus.dim}"
        )
    if payload["doc_hash"] != _doc_hash(corpus):
        raise IndexFormatError("index doc-id hash does not match the corpus")

    records = iter(payload["nodes"])
    if payload["type"] == "mta":
        cfg = BuildConfig(
            leaf_capacity=payload["config"]["leaf_capacity"],
            candidate_count=payload["config"]["candidate_count"],
            rng_seed=payload["config"]["rng_seed"],
            max_depth=payload["config"]["max_depth"],
            selector=payload["config"]["selector"],
        )
        root = _load_pivot_node(records, corpus)
        vocab = {term: i for i, term in enumerate(payload["vocab"])} if payload["vocab"] else {}
        idf = np.array(payload["idf"], dtype=np.float64) if payload["idf"] is not None else None
        return PivotTree(corpus, root, cfg, payload["bound_default"], vocab, idf)
    if payload["type"] == "mip":
        root = _load_ball_node(records, corpus.dim)
        return BallTree(corpus, root, payload["config"]["leaf_capacity"], payload["config"]["rng_seed"])
    raise IndexFormatError(f"unknown index type {payload['type']!r}")
