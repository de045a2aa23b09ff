"""Block-max WAND traversal with two-level guidance.

Cursors are kept sorted by current doc id. The pivot is the first cursor at
which the alpha-combined list maxima exceed the global threshold; every
document before the pivot document is skipped by moving the preceding
cursors block-wise. When all cursors up to the pivot agree on the pivot
document, its local bound starts from beta-combined block maxima and is
tightened list by list with actual weights.
"""

from __future__ import annotations

from operator import attrgetter
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

_by_doc = attrgetter("doc")


def bmw_find_pivot(order: Sequence[Cursor], theta_gl: float) -> int | None:
    """Smallest cursor position whose alpha-combined prefix sum exceeds ``theta_gl``.

    ``order`` must be sorted by current doc id. Returns None when no live
    cursor reaches the threshold (traversal is finished).
    """
    assert all(order[i].doc <= order[i + 1].doc for i in range(len(order) - 1)), "cursor order violated"
    thr = prune_threshold(theta_gl)
    acc = 0.0
    for i, s in enumerate(order):
        if s.doc == END:
            return None
        acc += s.amax
        if acc > thr:
            return i
    return None


def bmw_local_check(
    doc: int,
    order: Sequence[Cursor],
    theta_lo: float,
    coeffs: MixCoefficients,
    counters: EffortCounters | None = None,
) -> LocalOutcome:
    """Decide whether ``doc`` needs full scoring, using block maxima first.

    Lists whose cursor is not on ``doc`` cannot contain it and contribute 0.
    The bound is compared with the threshold once from block maxima alone and
    again after each list's block maximum is replaced by its actual weight.
    Lists are inspected in ascending order of combined block maximum.
    """
    beta = coeffs.beta
    beta1 = 1.0 - beta
    thr = prune_threshold(theta_lo)
    present = []
    for s in order:
        if s.doc == doc:
            db, dl = s.dB[s.blk], s.dL[s.blk]
            present.append((beta * db + beta1 * dl, s.position, s))
    present.sort(key=lambda e: (e[0], e[1]))
    m = len(present)
    suffix = [0.0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + present[i][0]

    hits: list[tuple[int, float, float]] = []
    if suffix[0] <= thr:
        return LocalOutcome(True, canonical_triple(hits, coeffs), 0, 0, False)
    actual = 0.0
    for i, (_, _, s) in enumerate(present):
        if counters is not None and s.opened != s.blk:
            counters.blocks_opened += 1
            s.opened = s.blk
        wb = s.wb[s.pos]
        wl = s.wl[s.pos]
        hits.append((s.position, wb, wl))
        actual += beta * wb + beta1 * wl
        if actual + suffix[i + 1] <= thr:
            return LocalOutcome(True, canonical_triple(hits, coeffs), len(hits), len(hits), i == m - 1)
    return LocalOutcome(False, canonical_triple(hits, coeffs), len(hits), len(hits))


def bmw_2gti(query: Query, index: DualIndex, config: TraversalConfig) -> QueryRun:
    """Top-k retrieval with the two-level guided block-max WAND driver loop."""
    coeffs = config.coeffs
    counters = EffortCounters()
    queues = TripleTopK(config.k, config.factor_f)
    order = open_cursors(query, index, coeffs)
    if not order:
        return QueryRun(query.query_id, RankedList(), counters)

    while True:
        order.sort(key=_by_doc)
        p = bmw_find_pivot(order, queues.skip_gl)
        if p is None:
            break
        doc = order[p].doc
        if order[0].doc == doc:
            out = bmw_local_check(doc, order, queues.skip_lo, coeffs, counters)
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
            for s in order:
                if s.doc != doc:
                    break
                s.next()
        else:
            for i in range(p):
                s = order[i]
                if s.doc < doc:
                    s.next_geq(doc)
                    counters.postings_touched += 1

    if config.counters_enabled:
        counters.candidate_docs = candidate_count(query, index)
        counters.docs_globally_skipped = counters.candidate_docs - counters.docs_examined
    return QueryRun(
        query.query_id,
        final_topk(queues),
        counters,
        (queues.theta_gl, queues.theta_lo, queues.theta_rk),
    )
