"""Linear BM25/learned score mixing and the three bounded top-k queues."""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

NEG_INF = -math.inf


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class MixCoefficients:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.05

    def __post_init__(self):
        _check_unit("alpha", self.alpha)
        _check_unit("beta", self.beta)
        _check_unit("gamma", self.gamma)

    @classmethod
    def uniform(cls, x: float) -> "MixCoefficients":
        return cls(x, x, x)


def combine(score_b: float, score_l: float, coeff: float) -> float:
    """``coeff * score_b + (1 - coeff) * score_l``."""
    _check_unit("coeff", coeff)
    return coeff * score_b + (1.0 - coeff) * score_l


@dataclass(frozen=True)
class ScoreTriple:
    """Global / local / rank scores of one document, plus the raw per-model sums."""

    global_: float
    local: float
    rank: float
    score_b: float = 0.0
    score_l: float = 0.0


class Eligibility(enum.Enum):
    ALL = "all"
    RANK_ONLY = "rank_only"


@dataclass(frozen=True)
class RankedList:
    """(doc, score) pairs sorted by descending score, ascending doc id on ties."""

    docs: tuple[int, ...] = ()
    scores: tuple[float, ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]], presorted: bool = False) -> "RankedList":
        pairs = list(pairs)
        if not presorted:
            pairs.sort(key=lambda p: (-p[1], p[0]))
        return cls(tuple(d for d, _ in pairs), tuple(s for _, s in pairs))

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return iter(zip(self.docs, self.scores))

    def __getitem__(self, i):
        return self.docs[i], self.scores[i]

    @property
    def doc_set(self) -> set[int]:
        return set(self.docs)


class TopKQueue:
    """Keeps the k best (score, doc) entries; ties prefer the smaller doc id.

    The heap key is ``(score, -doc)`` so the heap root is the entry that would
    be evicted next.
    """

    __slots__ = ("k", "heap", "theta")

    def __init__(self, k: int):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = k
        self.heap: list[tuple[float, int]] = []
        self.theta = NEG_INF

    def offer(self, doc: int, score: float) -> bool:
        heap = self.heap
        if len(heap) < self.k:
            heapq.heappush(heap, (score, -doc))
            if len(heap) == self.k:
                self.theta = heap[0][0]
            return True
        if (score, -doc) > heap[0]:
            heapq.heapreplace(heap, (score, -doc))
            self.theta = heap[0][0]
            return True
        return False

    def __len__(self) -> int:
        return len(self.heap)

    def entries(self) -> list[tuple[int, float]]:
        return sorted(((-nd, s) for s, nd in self.heap), key=lambda p: (-p[1], p[0]))


class TripleTopK:
    """Global, local and rank queues with independently rising thresholds.

    ``skip_gl`` / ``skip_lo`` are the thresholds traversal compares bounds
    against: the queue thresholds scaled by ``factor_f``. The rank queue is
    never scaled.
    """

    def __init__(self, k: int, factor_f: float = 1.0):
        if not factor_f > 0:
            raise ValueError(f"factor_f must be positive, got {factor_f}")
        self.q_gl = TopKQueue(k)
        self.q_lo = TopKQueue(k)
        self.q_rk = TopKQueue(k)
        self.factor_f = factor_f

    @property
    def theta_gl(self) -> float:
        return self.q_gl.theta

    @property
    def theta_lo(self) -> float:
        return self.q_lo.theta

    @property
    def theta_rk(self) -> float:
        return self.q_rk.theta

    @property
    def skip_gl(self) -> float:
        return self.factor_f * self.q_gl.theta

    @property
    def skip_lo(self) -> float:
        return self.factor_f * self.q_lo.theta

    def offer(self, doc: int, triple: ScoreTriple, eligibility: Eligibility = Eligibility.ALL) -> tuple[float, float]:
        if eligibility is Eligibility.ALL:
            self.q_gl.offer(doc, triple.global_)
            self.q_lo.offer(doc, triple.local)
        self.q_rk.offer(doc, triple.rank)
        return self.skip_gl, self.skip_lo

    def offer_rank(self, doc: int, rank_score: float) -> None:
        self.q_rk.offer(doc, rank_score)


def final_topk(queues: TripleTopK) -> RankedList:
    return RankedList.from_pairs(queues.q_rk.entries(), presorted=True)


def prune_threshold(theta: float) -> float:
    """Threshold lowered by a relative 1e-12 so float noise in bounds never prunes a winner."""
    return theta - abs(theta) * 1e-12
