import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from guidedsparse import maxscore
from guidedsparse.index import AlignmentMode, FillMode, build_index
from guidedsparse.maxscore import (
    local_prune_and_score,
    maxscore_2gti,
    next_pivot_doc,
    partition_terms,
    sort_states,
)
from guidedsparse.oracle import check_prop1, check_prop2, exhaustive_topk, score_all
from guidedsparse.scoring import MixCoefficients
from guidedsparse.traversal import END, Algorithm, Query, TraversalConfig, candidate_count, open_cursors

from conftest import instances


def states_with(maxima):
    return [SimpleNamespace(amax=m) for m in maxima]


def test_partition_example():
    # prefix sums 0, 1, 3: the largest p with prefix <= 2.5 is the second term (index 1)
    assert partition_terms(states_with([1.0, 2.0, 3.0, 4.0]), 2.5) == 1


def test_partition_unfilled_queue():
    assert partition_terms(states_with([1.0, 2.0]), -math.inf) == 0


def test_partition_keeps_last_term_essential():
    assert partition_terms(states_with([1.0, 1.0]), 100.0) == 1


def test_partition_empty():
    with pytest.raises(ValueError):
        partition_terms([], 1.0)


@given(st.lists(st.floats(0, 10), min_size=1, max_size=8), st.floats(-1, 40))
def test_partition_matches_scan(maxima, theta):
    maxima = sorted(maxima)
    thr = theta - abs(theta) * 1e-12
    want = max(p for p in range(len(maxima)) if sum(maxima[:p]) <= thr or p == 0)
    assert partition_terms(states_with(maxima), theta) == want


def test_next_pivot_doc():
    states = [SimpleNamespace(doc=d) for d in (1, 7, 3)]
    assert next_pivot_doc(states, 1) == 3
    assert next_pivot_doc([SimpleNamespace(doc=END)] * 2, 0) == END


@given(instances(), st.integers(0, 30))
def test_next_pivot_doc_matches_merge(inst, target):
    index, q = inst
    states = sort_states(open_cursors(q, index, MixCoefficients()))
    if not states:
        return
    for s in states:
        s.next_geq(target)
    for pivot in range(len(states)):
        merged = [d for s in states[pivot:] for d in s.docs if d >= target]
        assert next_pivot_doc(states, pivot) == (min(merged) if merged else END)


def single_term_states(weight):
    index = build_index([(0, [(0, 1, weight)])], alignment=AlignmentMode(FillMode.ZERO))
    coeffs = MixCoefficients(0.0, 0.0, 0.0)
    return sort_states(open_cursors(Query("q", (0,)), index, coeffs)), coeffs


def test_local_never_prunes_with_open_queue():
    states, coeffs = single_term_states(1.0)
    out = local_prune_and_score(0, states, 0, -math.inf, coeffs)
    assert not out.pruned and out.triple.local == 1.0


def test_local_single_term_below_threshold():
    states, coeffs = single_term_states(1.0)
    out = local_prune_and_score(0, states, 0, 2.0, coeffs)
    assert out.pruned


def true_scores(q, index, doc, coeffs):
    loc, _ = score_all(q, index, coeffs.beta)
    rk, _ = score_all(q, index, coeffs.gamma)
    return loc[doc], rk[doc]


coeff_st = st.builds(MixCoefficients, st.sampled_from([0.0, 0.3, 1.0]),
                     st.sampled_from([0.0, 0.3, 0.5, 1.0]), st.sampled_from([0.0, 0.05, 1.0]))


@given(instances(), coeff_st, st.floats(0, 20), st.floats(0, 20), st.integers(0, 25))
def test_local_pruning_is_safe(inst, coeffs, theta_gl, theta_lo, target):
    index, q = inst
    states = sort_states(open_cursors(q, index, coeffs))
    if not states:
        return
    for s in states:
        s.next_geq(target)
    pivot = partition_terms(states, theta_gl)
    doc = next_pivot_doc(states, pivot)
    if doc == END:
        return
    local, rank = true_scores(q, index, doc, coeffs)
    out = local_prune_and_score(doc, states, pivot, theta_lo, coeffs)
    if out.pruned:
        # a pruned document can never beat the threshold
        assert local <= theta_lo
    else:
        assert out.triple.local == local
        assert out.triple.rank == rank
    if out.complete:
        assert out.triple.rank == rank


@given(instances(), st.sampled_from([0.0, 0.3, 0.5, 1.0]), st.integers(1, 8))
def test_rank_safe_at_equal_coefficients(inst, x, k):
    index, q = inst
    run = maxscore_2gti(q, index, TraversalConfig(MixCoefficients.uniform(x), k))
    assert run.results == exhaustive_topk(q, index, x, k)


def three_doc_corpus():
    return [(0, [(0, 1, 1.0), (1, 2, 0.5)]), (1, [(0, 3, 2.0)]), (2, [(1, 1, 1.5)])]


@pytest.mark.parametrize("x", [0.0, 0.5])
def test_spec_small_corpus(x):
    index = build_index(three_doc_corpus(), alignment=AlignmentMode(FillMode.ZERO))
    q = Query("q", (0, 1))
    got = maxscore_2gti(q, index, TraversalConfig(MixCoefficients.uniform(x), 2)).results
    assert got == exhaustive_topk(q, index, x, 2)
    assert len(got) == 2


def test_repeated_terms_count_twice():
    index = build_index(three_doc_corpus(), alignment=AlignmentMode(FillMode.ZERO))
    once = maxscore_2gti(Query("q", (0,)), index, TraversalConfig(MixCoefficients.uniform(0.0), 3)).results
    twice = maxscore_2gti(Query("q", (0, 0)), index, TraversalConfig(MixCoefficients.uniform(0.0), 3)).results
    assert twice.docs == once.docs
    assert twice.scores == tuple(2 * s for s in once.scores)


def test_unknown_terms_are_ignored():
    index = build_index(three_doc_corpus(), alignment=AlignmentMode(FillMode.ZERO))
    run = maxscore_2gti(Query("q", (42,)), index, TraversalConfig(k=3))
    assert len(run.results) == 0 and run.counters.docs_examined == 0


@given(instances(), coeff_st, st.integers(1, 6))
def test_partial_scores_are_admitted_as_is(inst, coeffs, k):
    index, q = inst
    outcomes = {}
    original = maxscore.local_prune_and_score

    def spy(doc, *args, **kwargs):
        out = original(doc, *args, **kwargs)
        outcomes[doc] = out
        return out

    maxscore.local_prune_and_score = spy
    try:
        run = maxscore_2gti(q, index, TraversalConfig(coeffs, k))
    finally:
        maxscore.local_prune_and_score = original
    full_rank, _ = score_all(q, index, coeffs.gamma)
    for doc, score in run.results:
        out = outcomes[doc]
        assert score == out.triple.rank
        if not out.pruned:
            assert score == full_rank[doc]


@given(instances(), coeff_st, st.integers(1, 6))
def test_counters_are_consistent(inst, coeffs, k):
    index, q = inst
    run = maxscore_2gti(q, index, TraversalConfig(coeffs, k))
    c = run.counters
    assert c.docs_examined + c.docs_globally_skipped == c.candidate_docs == candidate_count(q, index)
    assert c.docs_globally_skipped >= 0
    again = maxscore_2gti(q, index, TraversalConfig(coeffs, k))
    assert again.results == run.results and again.counters == c


@given(instances(), st.sampled_from([0.05, 0.5]), st.integers(1, 6))
def test_gti_configuration(inst, gamma, k):
    """alpha = beta = 1 is plain BM25-guided traversal with interpolated ranking."""
    index, q = inst
    coeffs = MixCoefficients(1.0, 1.0, gamma)
    assert check_prop1(q, index, coeffs, k).verdict.value in ("holds", "assumption_unmet")
    assert check_prop2(q, index, coeffs, k).verdict.value in ("holds", "assumption_unmet")
