"""Brute-force references and falsification checks for the relevance guarantees.

``exhaustive_topk`` scores every matching document and is the ground truth
for rank-safety. The ``check_prop*`` functions compare a guided traversal
against the exhaustive rankings R_x and the two-stage baseline (retrieve by
one mix, re-rank by another).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .index import DualIndex
from .scoring import MixCoefficients, RankedList
from .traversal import Algorithm, EffortCounters, Query, QueryRun, TraversalConfig

TIE_TOL = 1e-12


@dataclass(frozen=True)
class FullRanking:
    """Every matching document of a query, ranked under one mix coefficient."""

    docs: np.ndarray
    scores: np.ndarray
    num_docs: int

    def top(self, k: int) -> RankedList:
        return RankedList(tuple(self.docs[:k].tolist()), tuple(self.scores[:k].tolist()))

    def positions(self) -> dict[int, int]:
        return {d: i for i, d in enumerate(self.docs.tolist())}

    def topk_unique(self, k: int) -> bool:
        """Whether the top-k document set survives arbitrary swaps of tied scores.

        Non-matching documents sit below every matching one with score 0.
        Scores within a relative 1e-12 count as tied.
        """
        if k >= self.num_docs:
            return True
        n = len(self.scores)
        kth = float(self.scores[k - 1]) if k - 1 < n else 0.0
        nxt = float(self.scores[k]) if k < n else 0.0
        return kth - nxt > TIE_TOL * max(abs(kth), abs(nxt))


def score_all(query: Query, index: DualIndex, x: float) -> tuple[np.ndarray, np.ndarray]:
    """x-combined scores of all documents, accumulated term by term in query order.

    Returns (scores over all doc ids, boolean mask of matching docs).
    """
    scores = np.zeros(index.num_docs, dtype=np.float64)
    matched = np.zeros(index.num_docs, dtype=bool)
    x1 = 1.0 - x
    for t in query.known_terms(index):
        pl = index.lists[t]
        scores[pl.docs] += x * pl.w_B + x1 * pl.w_L
        matched[pl.docs] = True
    return scores, matched


def full_ranking(query: Query, index: DualIndex, x: float) -> FullRanking:
    scores, matched = score_all(query, index, x)
    docs = np.flatnonzero(matched)
    s = scores[docs]
    order = np.lexsort((docs, -s))
    return FullRanking(docs[order], s[order], index.num_docs)


def exhaustive_topk(query: Query, index: DualIndex, x: float, k: int) -> RankedList:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return full_ranking(query, index, x).top(k)


def exhaustive_run(query: Query, index: DualIndex, config: TraversalConfig) -> QueryRun:
    """Exhaustive scoring under the final-ranking coefficient gamma."""
    ranking = full_ranking(query, index, config.coeffs.gamma)
    counters = EffortCounters(docs_fully_scored=len(ranking.docs), candidate_docs=len(ranking.docs))
    return QueryRun(query.query_id, ranking.top(config.k), counters)


def rescore(query: Query, index: DualIndex, docs, x: float) -> np.ndarray:
    scores, _ = score_all(query, index, x)
    return scores[np.asarray(docs, dtype=np.int64)]


def two_stage(query: Query, index: DualIndex, alpha: float, gamma: float, k: int) -> RankedList:
    """Top-k by the alpha mix, re-ranked by the gamma mix."""
    first = exhaustive_topk(query, index, alpha, k)
    docs = np.asarray(first.docs, dtype=np.int64)
    s = rescore(query, index, docs, gamma)
    order = np.lexsort((docs, -s))
    return RankedList(tuple(docs[order].tolist()), tuple(s[order].tolist()))


# ---------------------------------------------------------------------------
# relevance guarantee checks


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    ASSUMPTION_UNMET = "assumption_unmet"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class CheckResult:
    verdict: Verdict
    detail: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS


def _rankings(query, index, xs, cache: dict | None) -> list[FullRanking]:
    if cache is None:
        cache = {}
    out = []
    for x in xs:
        if x not in cache:
            cache[x] = full_ranking(query, index, x)
        out.append(cache[x])
    return out


def _guided(query, index, coeffs, k, algorithm) -> QueryRun:
    from .traversal import run_query

    return run_query(query, index, TraversalConfig(coeffs=coeffs, k=k, algorithm=algorithm))


def check_prop1(query, index, coeffs: MixCoefficients, k: int,
                algorithm: Algorithm = Algorithm.MAXSCORE, cache: dict | None = None) -> CheckResult:
    """Documents in the top-k of all three exhaustive rankings must be returned.

    ``cache`` (x -> FullRanking) lets callers share rankings across checks
    of the same query.
    """
    rankings = _rankings(query, index, (coeffs.alpha, coeffs.beta, coeffs.gamma), cache)
    if not all(r.topk_unique(k) for r in rankings):
        return CheckResult(Verdict.ASSUMPTION_UNMET)
    common = set(rankings[0].docs[:k].tolist())
    for r in rankings[1:]:
        common &= set(r.docs[:k].tolist())
    got = _guided(query, index, coeffs, k, algorithm).results.doc_set
    missing = sorted(common - got)
    if missing:
        return CheckResult(Verdict.VIOLATED, {"witness": missing[0], "common": sorted(common)})
    return CheckResult(Verdict.HOLDS, {"common": len(common), "nontrivial": bool(common)})


def check_prop2(query, index, coeffs: MixCoefficients, k: int,
                algorithm: Algorithm = Algorithm.MAXSCORE, cache: dict | None = None) -> CheckResult:
    """With alpha == beta or beta == gamma, the guided top-k has a gamma-score
    mean no lower than the two-stage baseline."""
    if not (coeffs.alpha == coeffs.beta or coeffs.beta == coeffs.gamma):
        return CheckResult(Verdict.NOT_APPLICABLE)
    rankings = _rankings(query, index, (coeffs.alpha, coeffs.beta, coeffs.gamma), cache)
    if not all(r.topk_unique(k) for r in rankings):
        return CheckResult(Verdict.ASSUMPTION_UNMET)
    guided = _guided(query, index, coeffs, k, algorithm).results
    first = rankings[0].docs[:k]
    s = rescore(query, index, first, coeffs.gamma)
    order = np.lexsort((first, -s))
    baseline = RankedList(tuple(first[order].tolist()), tuple(s[order].tolist()))
    if len(guided) != len(baseline):
        return CheckResult(Verdict.VIOLATED, {"reason": "result sizes differ",
                                               "guided": len(guided), "two_stage": len(baseline)})
    if not len(baseline):
        return CheckResult(Verdict.HOLDS, {"gap": 0.0, "nontrivial": False})
    mean_guided = float(rescore(query, index, guided.docs, coeffs.gamma).mean())
    mean_two = float(np.mean(baseline.scores))
    gap = mean_guided - mean_two
    if gap < -1e-9:
        return CheckResult(Verdict.VIOLATED, {"gap": gap})
    return CheckResult(Verdict.HOLDS, {"gap": gap, "nontrivial": guided.doc_set != baseline.doc_set})


def outmatches(better: FullRanking, worse: FullRanking, relevant: set[int]) -> bool:
    """Whether every relevant/irrelevant pair ordered correctly by ``worse`` is
    also ordered correctly by ``better`` (both rank the same matching docs)."""
    docs = worse.docs
    rel_mask = np.fromiter((d in relevant for d in docs.tolist()), dtype=bool, count=len(docs))
    if not rel_mask.any() or rel_mask.all():
        return True
    pos_w = np.arange(len(docs))
    pos_b_map = better.positions()
    pos_b = np.array([pos_b_map[d] for d in docs.tolist()])
    rw, iw = pos_w[rel_mask], pos_w[~rel_mask]
    rb, ib = pos_b[rel_mask], pos_b[~rel_mask]
    correct_w = rw[:, None] < iw[None, :]
    correct_b = rb[:, None] < ib[None, :]
    return bool(np.all(correct_b | ~correct_w))


def check_prop3(query, index, coeffs: MixCoefficients, k: int, relevant: set[int],
                algorithm: Algorithm = Algorithm.MAXSCORE, cache: dict | None = None) -> CheckResult:
    """Under R_gamma outmatching R_beta outmatching R_alpha, the guided top-k
    holds at least as many relevant documents as the two-stage baseline."""
    r_a, r_b, r_g = _rankings(query, index, (coeffs.alpha, coeffs.beta, coeffs.gamma), cache)
    if not (outmatches(r_b, r_a, relevant) and outmatches(r_g, r_b, relevant)):
        return CheckResult(Verdict.ASSUMPTION_UNMET)
    guided = _guided(query, index, coeffs, k, algorithm).results
    baseline = r_a.top(k)  # re-ranking keeps the document set
    c_guided = len(guided.doc_set & relevant)
    c_two = len(baseline.doc_set & relevant)
    detail = {"guided": c_guided, "two_stage": c_two, "nontrivial": guided.doc_set != baseline.doc_set}
    if c_guided < c_two:
        return CheckResult(Verdict.VIOLATED, detail)
    return CheckResult(Verdict.HOLDS, detail)
