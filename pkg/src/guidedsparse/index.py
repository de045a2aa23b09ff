"""Dual-weight inverted index: every posting carries a BM25 weight and a learned weight.

Postings live in flat numpy arrays per term. Traversal code works on plain
Python lists (cheaper scalar access), exposed through cached properties.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .bm25 import Bm25Params, bm25_weights

DEFAULT_BLOCK_SIZE = 64


class IndexBuildError(ValueError):
    pass


class AlignmentError(IndexBuildError):
    pass


class FillMode(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    SCALED = "scaled"


@dataclass(frozen=True)
class AlignmentMode:
    """How missing BM25 weights (tf = 0, w_L > 0) are filled in."""

    fill: FillMode = FillMode.SCALED
    # keep postings with a BM25 weight but zero learned weight
    include_learned_zero: bool = False

    @classmethod
    def parse(cls, name: str, include_learned_zero: bool = False) -> "AlignmentMode":
        return cls(FillMode(name), include_learned_zero)


@dataclass(frozen=True)
class AlignmentStats:
    mean_B: float
    mean_L: float
    scale_ratio: float
    filled_count: int = 0


@dataclass(frozen=True)
class PostingRecord:
    doc_id: int
    tf: int
    w_B: float
    w_L: float


@dataclass(frozen=True)
class BlockMeta:
    first_index: int
    last_index: int
    max_doc_id: int
    delta_B: float
    delta_L: float


class PostingList:
    """Postings of one term, sorted by doc id, with list and block maxima."""

    def __init__(self, term_id: int, docs, tf, w_B, w_L, block_size: int = DEFAULT_BLOCK_SIZE,
                 block_last=None, block_delta_B=None, block_delta_L=None,
                 sigma_B: float | None = None, sigma_L: float | None = None):
        self.term_id = int(term_id)
        self.docs = np.ascontiguousarray(docs, dtype=np.int64)
        self.tf = np.ascontiguousarray(tf, dtype=np.int64)
        self.w_B = np.ascontiguousarray(w_B, dtype=np.float64)
        self.w_L = np.ascontiguousarray(w_L, dtype=np.float64)
        n = len(self.docs)
        if block_last is None:
            starts = np.arange(0, n, block_size, dtype=np.int64)
            block_last = np.minimum(starts + block_size, n) - 1
            block_delta_B = np.maximum.reduceat(self.w_B, starts) if n else np.empty(0)
            block_delta_L = np.maximum.reduceat(self.w_L, starts) if n else np.empty(0)
        self.block_last = np.ascontiguousarray(block_last, dtype=np.int64)
        self.block_delta_B = np.ascontiguousarray(block_delta_B, dtype=np.float64)
        self.block_delta_L = np.ascontiguousarray(block_delta_L, dtype=np.float64)
        self.sigma_B = float(self.w_B.max()) if sigma_B is None and n else float(sigma_B or 0.0)
        self.sigma_L = float(self.w_L.max()) if sigma_L is None and n else float(sigma_L or 0.0)

    def __len__(self):
        return len(self.docs)

    def __eq__(self, other):
        if not isinstance(other, PostingList):
            return NotImplemented
        return (
            self.term_id == other.term_id
            and self.sigma_B == other.sigma_B
            and self.sigma_L == other.sigma_L
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("docs", "tf", "w_B", "w_L", "block_last", "block_delta_B", "block_delta_L")
            )
        )

    def __repr__(self):
        return f"PostingList(term_id={self.term_id}, n={len(self)}, blocks={len(self.block_last)})"

    @property
    def block_first(self) -> np.ndarray:
        first = np.empty_like(self.block_last)
        if len(first):
            first[0] = 0
            first[1:] = self.block_last[:-1] + 1
        return first

    @property
    def block_max_doc(self) -> np.ndarray:
        return self.docs[self.block_last]

    @property
    def records(self) -> list[PostingRecord]:
        return [
            PostingRecord(int(d), int(t), float(b), float(l))
            for d, t, b, l in zip(self.docs, self.tf, self.w_B, self.w_L)
        ]

    @property
    def blocks(self) -> list[BlockMeta]:
        return [
            BlockMeta(int(f), int(l), int(m), float(db), float(dl))
            for f, l, m, db, dl in zip(
                self.block_first, self.block_last, self.block_max_doc, self.block_delta_B, self.block_delta_L
            )
        ]

    # list views for the traversal loops

    @cached_property
    def doc_list(self) -> list[int]:
        return self.docs.tolist()

    @cached_property
    def wb_list(self) -> list[float]:
        return self.w_B.tolist()

    @cached_property
    def wl_list(self) -> list[float]:
        return self.w_L.tolist()

    @cached_property
    def block_last_list(self) -> list[int]:
        return self.block_last.tolist()

    @cached_property
    def block_max_doc_list(self) -> list[int]:
        return self.block_max_doc.tolist()

    @cached_property
    def block_dB_list(self) -> list[float]:
        return self.block_delta_B.tolist()

    @cached_property
    def block_dL_list(self) -> list[float]:
        return self.block_delta_L.tolist()


@dataclass(eq=False)
class DualIndex:
    num_docs: int
    doc_lengths: np.ndarray
    avg_doc_length: float
    lists: dict[int, PostingList]
    alignment: AlignmentMode = field(default_factory=AlignmentMode)
    bm25: Bm25Params = field(default_factory=Bm25Params)
    block_size: int = DEFAULT_BLOCK_SIZE
    stats: AlignmentStats | None = None
    filled_count: int = 0

    def __eq__(self, other):
        if not isinstance(other, DualIndex):
            return NotImplemented
        return (
            self.num_docs == other.num_docs
            and np.array_equal(self.doc_lengths, other.doc_lengths)
            and self.avg_doc_length == other.avg_doc_length
            and self.alignment == other.alignment
            and self.bm25 == other.bm25
            and self.block_size == other.block_size
            and self.stats == other.stats
            and self.filled_count == other.filled_count
            and self.lists.keys() == other.lists.keys()
            and all(self.lists[t] == other.lists[t] for t in self.lists)
        )

    @property
    def num_postings(self) -> int:
        return sum(len(pl) for pl in self.lists.values())

    def __contains__(self, term_id) -> bool:
        return term_id in self.lists

    def __getitem__(self, term_id) -> PostingList:
        return self.lists[term_id]


# A corpus is a sequence of (doc_id, [(term_id, tf, w_L), ...]).
Corpus = Sequence[tuple[int, Sequence[tuple[int, int, float]]]]


def _flatten(corpus: Corpus):
    doc_ids = []
    rows_doc, rows_term, rows_tf, rows_wl = [], [], [], []
    for doc_id, postings in corpus:
        doc_ids.append(doc_id)
        for term_id, tf, w_l in postings:
            rows_doc.append(doc_id)
            rows_term.append(term_id)
            rows_tf.append(tf)
            rows_wl.append(w_l)
    return (
        np.asarray(doc_ids, dtype=np.int64),
        np.asarray(rows_doc, dtype=np.int64),
        np.asarray(rows_term, dtype=np.int64),
        np.asarray(rows_tf, dtype=np.int64),
        np.asarray(rows_wl, dtype=np.float64),
    )


def compute_alignment_stats(w_b: Iterable[float], w_l: Iterable[float]) -> AlignmentStats:
    """Means of the nonzero BM25 and nonzero learned weights over all postings."""
    w_b = np.asarray(w_b, dtype=np.float64)
    w_l = np.asarray(w_l, dtype=np.float64)
    nz_b = w_b[w_b != 0]
    nz_l = w_l[w_l != 0]
    if len(nz_b) == 0 or len(nz_l) == 0:
        raise AlignmentError(
            f"scaled alignment needs nonzero weights on both sides "
            f"(nonzero BM25: {len(nz_b)}, nonzero learned: {len(nz_l)})"
        )
    mean_b = float(nz_b.mean())
    mean_l = float(nz_l.mean())
    return AlignmentStats(mean_b, mean_l, mean_b / mean_l)


def build_index(
    corpus: Corpus,
    bm25: Bm25Params = Bm25Params(),
    block_size: int = DEFAULT_BLOCK_SIZE,
    alignment: AlignmentMode = AlignmentMode(),
) -> DualIndex:
    """Build the merged dual-weight index from a pre-tokenized corpus.

    Document length is the sum of raw term frequencies. Postings with
    ``tf = 0`` are learned-only expansion terms whose BM25 weight is filled
    according to ``alignment``; postings with both ``tf = 0`` and ``w_L = 0``
    carry nothing and are ignored.
    """
    doc_ids, p_doc, p_term, p_tf, p_wl = _flatten(corpus)
    if len(doc_ids) and not np.array_equal(np.sort(doc_ids), np.arange(len(doc_ids))):
        raise IndexBuildError("document ids must be unique and dense in [0, num_docs)")
    return build_index_arrays(len(doc_ids), p_doc, p_term, p_tf, p_wl, bm25, block_size, alignment)


def build_index_arrays(
    num_docs: int,
    p_doc,
    p_term,
    p_tf,
    p_wl,
    bm25: Bm25Params = Bm25Params(),
    block_size: int = DEFAULT_BLOCK_SIZE,
    alignment: AlignmentMode = AlignmentMode(),
) -> DualIndex:
    """:func:`build_index` over flat posting arrays (one row per posting)."""
    if block_size < 1:
        raise IndexBuildError(f"block_size must be >= 1, got {block_size}")
    p_doc = np.asarray(p_doc, dtype=np.int64)
    p_term = np.asarray(p_term, dtype=np.int64)
    p_tf = np.asarray(p_tf, dtype=np.int64)
    p_wl = np.asarray(p_wl, dtype=np.float64)
    if len(p_doc) and (p_doc.min() < 0 or p_doc.max() >= num_docs):
        raise IndexBuildError("posting doc id outside [0, num_docs)")
    if np.any(p_tf < 0):
        raise IndexBuildError("negative term frequency")
    if np.any(p_wl < 0) or np.any(~np.isfinite(p_wl)):
        raise IndexBuildError("learned weights must be finite and non-negative")
    if len(p_term) and p_term.min() < 0:
        raise IndexBuildError("negative term id")

    order = np.lexsort((p_doc, p_term))
    p_doc, p_term, p_tf, p_wl = p_doc[order], p_term[order], p_tf[order], p_wl[order]
    dup = (p_doc[1:] == p_doc[:-1]) & (p_term[1:] == p_term[:-1])
    if np.any(dup):
        i = int(np.flatnonzero(dup)[0])
        raise IndexBuildError(f"duplicate posting for doc {p_doc[i]} term {p_term[i]}")

    doc_lengths = np.zeros(num_docs, dtype=np.int64)
    np.add.at(doc_lengths, p_doc, p_tf)
    avg_doc_length = float(doc_lengths.mean()) if num_docs else 0.0
    # zero-length documents (learned-only) are scored as if they held one token
    bm25_len = np.maximum(doc_lengths, 1).astype(np.float64)
    bm25_avg = avg_doc_length if avg_doc_length > 0 else 1.0

    # BM25 document frequency counts only real occurrences (tf > 0)
    present = p_tf > 0
    terms, term_start = np.unique(p_term, return_index=True)
    df_per_term = np.add.reduceat(present.astype(np.int64), term_start) if len(terms) else np.empty(0, np.int64)
    term_index = np.searchsorted(terms, p_term)
    df = df_per_term[term_index]

    w_b = np.zeros(len(p_doc), dtype=np.float64)
    if np.any(present):
        w_b[present] = bm25_weights(
            p_tf[present], df[present], bm25_len[p_doc[present]], bm25_avg, num_docs, bm25
        )

    missing = (~present) & (p_wl > 0)
    filled_count = int(missing.sum())
    stats = None
    if alignment.fill is FillMode.SCALED:
        stats = compute_alignment_stats(w_b, p_wl)
        w_b[missing] = stats.scale_ratio * p_wl[missing]
    elif alignment.fill is FillMode.ONE and filled_count:
        w_b[missing] = bm25_weights(
            np.ones(filled_count), np.maximum(df[missing], 1), bm25_len[p_doc[missing]],
            bm25_avg, num_docs, bm25,
        )
    if stats is not None:
        stats = AlignmentStats(stats.mean_B, stats.mean_L, stats.scale_ratio, filled_count)

    keep = (w_b > 0) | (p_wl > 0)
    if not alignment.include_learned_zero:
        keep &= p_wl > 0
    p_doc, p_term, p_tf, w_b, p_wl = p_doc[keep], p_term[keep], p_tf[keep], w_b[keep], p_wl[keep]

    lists: dict[int, PostingList] = {}
    if len(p_term):
        terms, starts = np.unique(p_term, return_index=True)
        bounds = list(starts) + [len(p_term)]
        for j, t in enumerate(terms.tolist()):
            s, e = bounds[j], bounds[j + 1]
            lists[t] = PostingList(t, p_doc[s:e], p_tf[s:e], w_b[s:e], p_wl[s:e], block_size)

    return DualIndex(
        num_docs=num_docs,
        doc_lengths=doc_lengths,
        avg_doc_length=avg_doc_length,
        lists=lists,
        alignment=alignment,
        bm25=bm25,
        block_size=block_size,
        stats=stats,
        filled_count=filled_count,
    )
