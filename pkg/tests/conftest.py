import pytest

from pivotsearch import (
    BuildConfig,
    build_ball_tree,
    build_tree,
    generate_corpus_counts,
    tfidf_weigh,
    weigh_query,
)

# The desk-scale reference setup: 2000 docs, vocab 5000, average length 60,
# corpus seed 7, 100 queries from a disjoint seed.
STD_DOCS = 2000
STD_VOCAB = 5000
STD_AVG_LEN = 60
STD_SEED = 7
STD_QUERY_SEED = 8
STD_N_QUERIES = 100


@pytest.fixture(scope="session")
def std_corpus():
    return tfidf_weigh(generate_corpus_counts(STD_DOCS, STD_VOCAB, STD_AVG_LEN, STD_SEED))


@pytest.fixture(scope="session")
def std_queries(std_corpus):
    counts = generate_corpus_counts(
        STD_N_QUERIES, STD_VOCAB, STD_AVG_LEN, STD_QUERY_SEED, id_prefix="q"
    )
    return [(qid, weigh_query(std_corpus, terms)) for qid, terms in counts]


@pytest.fixture(scope="session")
def std_tree(std_corpus):
    return build_tree(std_corpus, BuildConfig(leaf_capacity=32, candidate_count=10, rng_seed=STD_SEED))


@pytest.fixture(scope="session")
def std_ball_tree(std_corpus):
    return build_ball_tree(std_corpus, leaf_capacity=32, seed=STD_SEED)


@pytest.fixture(scope="session")
def small_corpus():
    return tfidf_weigh(generate_corpus_counts(300, 800, 40, seed=11))


@pytest.fixture(scope="session")
def small_queries(small_corpus):
    counts = generate_corpus_counts(20, 800, 40, seed=12, id_prefix="q")
    return [(qid, weigh_query(small_corpus, terms)) for qid, terms in counts]


@pytest.fixture(scope="session")
def small_tree(small_corpus):
    return build_tree(small_corpus, BuildConfig(leaf_capacity=8, candidate_count=6, rng_seed=11))


@pytest.fixture(scope="session")
def small_ball_tree(small_corpus):
    return build_ball_tree(small_corpus, leaf_capacity=8, seed=11)
