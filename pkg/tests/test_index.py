import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from guidedsparse.bm25 import Bm25Params, bm25_weight
from guidedsparse.index import (
    AlignmentError,
    AlignmentMode,
    FillMode,
    IndexBuildError,
    build_index,
    compute_alignment_stats,
)

from conftest import alignments, corpora, safe_build


def weight_of(index, term, doc):
    pl = index.lists[term]
    i = int(np.searchsorted(pl.docs, doc))
    assert pl.docs[i] == doc
    return pl.w_B[i], pl.w_L[i]


def test_single_posting_zero_fill():
    index = build_index([(0, [(5, 1, 2.0)])], alignment=AlignmentMode(FillMode.ZERO))
    pl = index.lists[5]
    assert pl.w_B[0] == bm25_weight(1, 1, 1, 1.0, 1)
    assert pl.sigma_L == 2.0
    assert pl.sigma_B == pl.w_B[0]


def test_hand_counts(tiny_corpus):
    index = build_index(tiny_corpus, alignment=AlignmentMode(FillMode.ZERO))
    assert index.num_docs == 4
    assert list(index.doc_lengths) == [3, 1, 4, 4]
    assert index.avg_doc_length == 3.0
    assert index.filled_count == 1
    # doc 2 / term 2 has w_L = 0 and is dropped by default
    assert index.num_postings == 8
    assert 2 not in index.lists[2].docs.tolist()
    keep = build_index(tiny_corpus, alignment=AlignmentMode(FillMode.ZERO, include_learned_zero=True))
    assert keep.num_postings == 9
    assert weight_of(index, 2, 1) == (0.0, 0.9)


def test_one_fill_uses_tf_one(tiny_corpus):
    index = build_index(tiny_corpus, alignment=AlignmentMode(FillMode.ONE))
    # term 2 occurs (tf > 0) in docs 2 and 3; doc 1 has length 1, average 3
    want = bm25_weight(1, 2, 1, 3.0, 4)
    got, _ = weight_of(index, 2, 1)
    assert got == pytest.approx(want, rel=1e-12)


def test_scaled_fill_uses_global_ratio(tiny_corpus):
    index = build_index(tiny_corpus, alignment=AlignmentMode(FillMode.SCALED))
    # recompute the ratio by hand over every posting, dropped ones included
    df = {0: 3, 1: 3, 2: 2}
    lengths = [3, 1, 4, 4]
    w_b, w_l = [], []
    for d, ps in tiny_corpus:
        for t, tf, wl in ps:
            if tf > 0:
                w_b.append(bm25_weight(tf, df[t], lengths[d], 3.0, 4))
            if wl != 0:
                w_l.append(wl)
    ratio = (sum(w_b) / len(w_b)) / (sum(w_l) / len(w_l))
    assert index.stats.scale_ratio == pytest.approx(ratio, rel=1e-12)
    got, wl = weight_of(index, 2, 1)
    assert got == pytest.approx(index.stats.scale_ratio * wl, rel=1e-12)


def test_alignment_stats_example():
    s = compute_alignment_stats([1.0, 3.0, 0.0], [2.0, 6.0, 0.0])
    assert (s.mean_B, s.mean_L, s.scale_ratio) == (2.0, 4.0, 0.5)


def test_alignment_stats_errors():
    with pytest.raises(AlignmentError):
        compute_alignment_stats([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(AlignmentError):
        compute_alignment_stats([1.0], [0.0])


def test_scaled_fill_without_learned_weights_fails():
    corpus = [(0, [(0, 1, 0.0)]), (1, [(1, 2, 0.0)])]
    with pytest.raises(AlignmentError):
        build_index(corpus, alignment=AlignmentMode(FillMode.SCALED))


@pytest.mark.parametrize("corpus", [
    [(0, [(1, 1, 1.0), (1, 2, 0.5)])],    # duplicate (doc, term)
    [(0, [(1, 1, -1.0)])],                # negative weight
    [(0, [(1, -1, 1.0)])],                # negative tf
    [(0, [(1, 1, float("nan"))])],
    [(1, [(1, 1, 1.0)])],                 # ids not dense
    [(0, []), (0, [])],                   # duplicate doc id
])
def test_build_errors(corpus):
    with pytest.raises(IndexBuildError):
        build_index(corpus)


def test_bad_block_size():
    with pytest.raises(IndexBuildError):
        build_index([(0, [(0, 1, 1.0)])], block_size=0)


def test_posting_with_nothing_is_ignored():
    index = build_index([(0, [(0, 0, 0.0), (1, 1, 1.0)])], alignment=AlignmentMode(FillMode.ONE))
    assert 0 not in index.lists
    assert index.filled_count == 0


@given(corpora(), alignments, st.sampled_from([1, 2, 3, 7, 64]))
def test_maxima_and_order_invariants(corpus, alignment, block_size):
    index = safe_build(corpus, block_size, alignment)
    for pl in index.lists.values():
        assert len(pl) > 0
        assert np.all(np.diff(pl.docs) > 0)
        assert pl.sigma_B == pl.w_B.max()
        assert pl.sigma_L == pl.w_L.max()
        first = pl.block_first
        assert first[0] == 0 and pl.block_last[-1] == len(pl) - 1
        for j, (a, b) in enumerate(zip(first, pl.block_last)):
            assert b - a + 1 <= block_size
            assert pl.block_delta_B[j] == pl.w_B[a:b + 1].max()
            assert pl.block_delta_L[j] == pl.w_L[a:b + 1].max()
        if not index.alignment.include_learned_zero:
            assert np.all(pl.w_L > 0)


@given(corpora())
def test_scaled_fill_relation(corpus):
    try:
        index = build_index(corpus, alignment=AlignmentMode(FillMode.SCALED))
    except AlignmentError:
        return
    tf_of = {(d, t): tf for d, ps in corpus for t, tf, _ in ps}
    ratio = index.stats.scale_ratio
    for t, pl in index.lists.items():
        for d, wb, wl in zip(pl.docs.tolist(), pl.w_B.tolist(), pl.w_L.tolist()):
            if tf_of[(d, t)] == 0:
                assert math.isclose(wb, ratio * wl, rel_tol=1e-12)


@given(corpora())
def test_filled_count_and_one_fill(corpus):
    index = build_index(corpus, alignment=AlignmentMode(FillMode.ONE))
    expected = sum(1 for _, ps in corpus for _, tf, wl in ps if tf == 0 and wl > 0)
    assert index.filled_count == expected
    lengths = [sum(tf for _, tf, _ in ps) for _, ps in corpus]
    avg = sum(lengths) / len(lengths) or 1.0
    df = {}
    for _, ps in corpus:
        for t, tf, _ in ps:
            df[t] = df.get(t, 0) + (tf > 0)
    for d, ps in corpus:
        for t, tf, wl in ps:
            if tf == 0 and wl > 0:
                wb, _ = weight_of(index, t, d)
                want = bm25_weight(1, max(df[t], 1), max(lengths[d], 1), avg, len(corpus), Bm25Params())
                assert math.isclose(wb, want, rel_tol=1e-12)


@given(corpora())
def test_scaled_stats_second_pass(corpus):
    """The ratio equals a naive recomputation from the built index with learned-zero kept."""
    try:
        index = build_index(corpus, alignment=AlignmentMode(FillMode.ZERO, include_learned_zero=True))
        scaled = build_index(corpus, alignment=AlignmentMode(FillMode.SCALED))
    except AlignmentError:
        return
    w_b = [w for pl in index.lists.values() for w in pl.w_B.tolist() if w != 0]
    w_l = [w for pl in index.lists.values() for w in pl.w_L.tolist() if w != 0]
    ratio = (sum(w_b) / len(w_b)) / (sum(w_l) / len(w_l))
    assert math.isclose(scaled.stats.scale_ratio, ratio, rel_tol=1e-12)
