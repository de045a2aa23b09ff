"""MaxScore with two-level guidance.

Global pruning partitions query terms into non-essential and essential sets
using alpha-combined list maxima against the (scaled) global threshold.
Local pruning walks the non-essential terms of the pivot document from the
largest bound down, comparing partial local score plus beta-combined maxima
of the unvisited terms against the (scaled) local threshold. Final ranking
uses gamma-combined scores.
"""

from __future__ import annotations

from typing import Sequence

from .index import DualIndex
from .scoring import MixCoefficients, RankedList, TripleTopK, final_topk, prune_threshold
from .traversal import (
    END,
    Cursor,
    EffortCounters,
    LocalOutcome,
    Query,
    QueryRun,
    TraversalConfig,
    canonical_triple,
    candidate_count,
    open_cursors,
)


def sort_states(states: list[Cursor]) -> list[Cursor]:
    """Order term states by ascending alpha-combined list maximum and fill in
    the running sums of beta-combined maxima used as local bounds."""
    states = sorted(states, key=lambda s: (s.amax, s.position))
    acc = 0.0
    for s in states:
        acc += s.bmax
        s.bound_through = acc
    return states


def partition_terms(states: Sequence[Cursor], theta_gl: float) -> int:
    """Index of the first essential term (0-based).

    The largest ``p`` such that the alpha-combined maxima of the terms before
    ``p`` sum to at most ``theta_gl``; the last term is always essential.
    """
    if not states:
        raise ValueError("cannot partition an empty term list")
    thr = prune_threshold(theta_gl)
    prefix = 0.0
    pivot = 0
    for p in range(1, len(states)):
        prefix += states[p - 1].amax
        if prefix <= thr:
            pivot = p
        else:
            break
    return pivot


def next_pivot_doc(states: Sequence[Cursor], pivot: int) -> int:
    """Smallest current doc id among the essential cursors, or ``END``."""
    doc = END
    for i in range(pivot, len(states)):
        d = states[i].doc
        if d < doc:
            doc = d
    return doc


def local_prune_and_score(
    doc: int,
    states: Sequence[Cursor],
    pivot: int,
    theta_lo: float,
    coeffs: MixCoefficients,
) -> LocalOutcome:
    """Score ``doc`` unless its local bound falls to ``theta_lo`` or below.

    Essential cursors sitting on ``doc`` are consumed first. Then terms
    ``pivot - 1`` down to ``0`` are visited one by one; before each, the
    partial local score plus the beta-combined maxima of the terms not yet
    visited is compared with the threshold. A final comparison with no terms
    left covers the fully accumulated local score.
    """
    beta = coeffs.beta
    beta1 = 1.0 - beta
    thr = prune_threshold(theta_lo)
    hits: list[tuple[int, float, float]] = []
    local = 0.0
    touched = 0
    for i in range(pivot, len(states)):
        s = states[i]
        if s.doc == doc:
            wb = s.wb[s.pos]
            wl = s.wl[s.pos]
            hits.append((s.position, wb, wl))
            local += beta * wb + beta1 * wl
            touched += 1
            s.next()
    x = pivot - 1
    while True:
        bound = states[x].bound_through if x >= 0 else 0.0
        if local + bound <= thr:
            return LocalOutcome(True, canonical_triple(hits, coeffs), len(hits), touched, x < 0)
        if x < 0:
            break
        s = states[x]
        if s.doc < doc:
            s.next_geq(doc)
            touched += 1
        if s.doc == doc:
            wb = s.wb[s.pos]
            wl = s.wl[s.pos]
            hits.append((s.position, wb, wl))
            local += beta * wb + beta1 * wl
            touched += 1
        x -= 1
    return LocalOutcome(False, canonical_triple(hits, coeffs), len(hits), touched)


def maxscore_2gti(query: Query, index: DualIndex, config: TraversalConfig) -> QueryRun:
    """Top-k retrieval with the two-level guided MaxScore driver loop."""
    coeffs = config.coeffs
    counters = EffortCounters()
    queues = TripleTopK(config.k, config.factor_f)
    states = sort_states(open_cursors(query, index, coeffs))
    if not states:
        return QueryRun(query.query_id, RankedList(), counters)

    pivot = 0
    seen_theta = None
    while True:
        theta_gl = queues.skip_gl
        if theta_gl != seen_theta:
            if seen_theta is not None:
                counters.repartition_count += 1
            pivot = partition_terms(states, theta_gl)
            seen_theta = theta_gl
        doc = next_pivot_doc(states, pivot)
        if doc == END:
            break
        out = local_prune_and_score(doc, states, pivot, queues.skip_lo, coeffs)
        counters.postings_touched += out.touched
        if out.complete:
            counters.docs_fully_scored += 1
        else:
            counters.docs_locally_pruned += 1
        if out.pruned:
            if out.hits:
                queues.offer_rank(doc, out.triple.rank)
        else:
            queues.offer(doc, out.triple)

    if config.counters_enabled:
        counters.candidate_docs = candidate_count(query, index)
        counters.docs_globally_skipped = counters.candidate_docs - counters.docs_examined
    return QueryRun(
        query.query_id,
        final_topk(queues),
        counters,
        (queues.theta_gl, queues.theta_lo, queues.theta_rk),
    )
