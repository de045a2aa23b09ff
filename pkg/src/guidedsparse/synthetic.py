"""Seeded synthetic corpora: small random ones for property campaigns and a
large Zipf corpus for pruning-effort experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bm25 import Bm25Params
from .index import AlignmentMode, DualIndex, FillMode, build_index_arrays
from .traversal import Query


@dataclass
class Instance:
    index: DualIndex
    queries: list[Query]
    # flat posting arrays the index was built from (doc, term, tf, w_L)
    postings: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def _zipf_probs(n: int, s: float) -> np.ndarray:
    p = 1.0 / np.arange(1, n + 1, dtype=np.float64) ** s
    return p / p.sum()


def random_postings(rng: np.random.Generator, num_docs: int, vocab: int, mean_len: float,
                    zipf_s: float = 1.0, expansion_rate: float = 0.2, learned_zero_rate: float = 0.1,
                    quantized: bool = False):
    """Distinct (doc, term) postings with raw tf and learned weights.

    A fraction of postings are learned-only (tf = 0) and a fraction carry a
    zero learned weight, so every alignment path is exercised.
    """
    probs = _zipf_probs(vocab, zipf_s)
    lengths = np.minimum(1 + rng.poisson(mean_len, size=num_docs), vocab)
    docs, terms = [], []
    for d, m in enumerate(lengths.tolist()):
        t = rng.choice(vocab, size=m, replace=False, p=probs)
        docs.append(np.full(m, d, dtype=np.int64))
        terms.append(t)
    p_doc = np.concatenate(docs) if docs else np.empty(0, np.int64)
    p_term = np.concatenate(terms).astype(np.int64) if terms else np.empty(0, np.int64)
    n = len(p_doc)
    tf = 1 + rng.geometric(0.5, size=n) - 1
    expand = rng.random(n) < expansion_rate
    tf[expand] = 0
    if quantized:
        w_l = rng.integers(1, 8, size=n).astype(np.float64)
    else:
        w_l = rng.lognormal(0.0, 0.7, size=n) * (1.0 + 0.3 * np.log1p(tf))
    zero = (rng.random(n) < learned_zero_rate) & ~expand
    w_l[zero] = 0.0
    return p_doc, p_term, tf.astype(np.int64), w_l


def random_instance(rng: np.random.Generator, max_docs: int = 2000, max_terms: int = 50,
                    max_query_len: int = 8, num_queries: int = 1) -> Instance:
    """A small random index with random build options and a few queries."""
    num_docs = int(rng.integers(1, max_docs + 1))
    vocab = int(rng.integers(1, max_terms + 1))
    mean_len = float(rng.uniform(0.5, 8.0))
    quantized = bool(rng.random() < 0.3)
    postings = random_postings(rng, num_docs, vocab, mean_len, zipf_s=float(rng.uniform(0.3, 1.3)),
                               quantized=quantized)
    fill = [FillMode.ZERO, FillMode.ONE, FillMode.SCALED][int(rng.integers(3))]
    alignment = AlignmentMode(fill, include_learned_zero=bool(rng.random() < 0.5))
    block_size = int(rng.choice([1, 2, 3, 8, 64]))
    try:
        index = build_index_arrays(num_docs, *postings, Bm25Params(), block_size, alignment)
    except ValueError:
        # scaled fill without nonzero weights on one side; zero fill always works
        alignment = AlignmentMode(FillMode.ZERO, alignment.include_learned_zero)
        index = build_index_arrays(num_docs, *postings, Bm25Params(), block_size, alignment)
    queries = []
    for qi in range(num_queries):
        qlen = int(rng.integers(1, max_query_len + 1))
        terms = tuple(int(t) for t in rng.integers(0, vocab, size=qlen))
        queries.append(Query(str(qi), terms))
    return Instance(index, queries, postings)


@dataclass(frozen=True)
class ZipfCorpusConfig:
    """Knobs for the large effort-experiment corpus.

    Learned weights scale with term rarity like BM25 does, but carry a
    lognormal per-posting factor. Long lists then reach far into that tail,
    so learned-only list maxima are loose bounds while BM25 saturates.
    """

    num_docs: int = 100_000
    vocab: int = 20_000
    mean_doc_len: float = 30.0
    zipf_s: float = 1.05
    expansion_rate: float = 0.2
    learned_sigma: float = 0.6
    rarity_power: float = 0.6
    block_size: int = 64
    num_queries: int = 20
    query_len: tuple[int, int] = (4, 10)
    seed: int = 7


def zipf_postings(rng: np.random.Generator, cfg: ZipfCorpusConfig):
    """Vectorized (doc, term, tf, w_L) arrays; duplicates merged by summing tf."""
    lengths = 1 + rng.poisson(cfg.mean_doc_len, size=cfg.num_docs)
    p_doc = np.repeat(np.arange(cfg.num_docs, dtype=np.int64), lengths)
    p_term = rng.choice(cfg.vocab, size=len(p_doc), p=_zipf_probs(cfg.vocab, cfg.zipf_s)).astype(np.int64)
    key = p_doc * cfg.vocab + p_term
    key, tf = np.unique(key, return_counts=True)
    p_doc, p_term = key // cfg.vocab, key % cfg.vocab
    tf = tf.astype(np.int64)
    n = len(key)
    df = np.bincount(p_term, minlength=cfg.vocab)
    rarity = np.log1p(cfg.num_docs / np.maximum(df, 1)) ** cfg.rarity_power
    w_l = rarity[p_term] * rng.lognormal(0.0, cfg.learned_sigma, size=n) * (1.0 + 0.5 * np.log1p(tf))
    # expansion terms: learned-only postings on other words
    n_exp = int(cfg.expansion_rate * n)
    e_doc = rng.integers(0, cfg.num_docs, size=n_exp)
    e_term = rng.choice(cfg.vocab, size=n_exp, p=_zipf_probs(cfg.vocab, cfg.zipf_s * 0.8)).astype(np.int64)
    e_key = np.setdiff1d(np.unique(e_doc * cfg.vocab + e_term), key, assume_unique=True)
    e_w = rarity[e_key % cfg.vocab] * rng.lognormal(-0.7, cfg.learned_sigma, size=len(e_key))
    p_doc = np.concatenate([p_doc, e_key // cfg.vocab])
    p_term = np.concatenate([p_term, e_key % cfg.vocab])
    tf = np.concatenate([tf, np.zeros(len(e_key), np.int64)])
    w_l = np.concatenate([w_l, e_w])
    return p_doc, p_term, tf, w_l


def zipf_instance(cfg: ZipfCorpusConfig = ZipfCorpusConfig(),
                  alignment: AlignmentMode = AlignmentMode(FillMode.ONE)) -> Instance:
    """Large seeded corpus with queries mixing frequent and rare terms."""
    rng = np.random.default_rng(cfg.seed)
    postings = zipf_postings(rng, cfg)
    index = build_index_arrays(cfg.num_docs, *postings, Bm25Params(), cfg.block_size, alignment)
    # draw query terms from the head of the vocabulary, rank-uniform in log space
    lo, hi = cfg.query_len
    queries = []
    for qi in range(cfg.num_queries):
        qlen = int(rng.integers(lo, hi + 1))
        ranks = np.exp(rng.uniform(np.log(1), np.log(cfg.vocab / 4), size=qlen)).astype(np.int64)
        terms = tuple(sorted({int(t) for t in ranks if int(t) in index}))
        queries.append(Query(str(qi), terms))
    return Instance(index, queries, postings)
