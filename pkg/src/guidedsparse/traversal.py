"""Query, configuration and bookkeeping types shared by the traversal algorithms."""

from __future__ import annotations

import enum
import time
from bisect import bisect_left
from dataclasses import asdict, dataclass, field

import numpy as np

from .index import DualIndex, PostingList
from .scoring import MixCoefficients, RankedList, ScoreTriple

END = 1 << 62  # cursor doc id once a list is exhausted


class Algorithm(enum.Enum):
    MAXSCORE = "maxscore-2gti"
    BMW = "bmw-2gti"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class Query:
    query_id: str
    # repeated term ids weight a term by its number of occurrences
    terms: tuple[int, ...]

    def known_terms(self, index: DualIndex) -> list[int]:
        return [t for t in self.terms if t in index.lists]


@dataclass(frozen=True)
class TraversalConfig:
    coeffs: MixCoefficients = field(default_factory=MixCoefficients)
    k: int = 10
    factor_f: float = 1.0
    algorithm: Algorithm = Algorithm.MAXSCORE
    counters_enabled: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.factor_f > 0:
            raise ValueError(f"factor_f must be positive, got {self.factor_f}")


@dataclass
class EffortCounters:
    docs_fully_scored: int = 0
    docs_locally_pruned: int = 0
    docs_globally_skipped: int = 0
    postings_touched: int = 0
    repartition_count: int = 0
    blocks_opened: int = 0
    candidate_docs: int = 0

    @property
    def docs_examined(self) -> int:
        return self.docs_fully_scored + self.docs_locally_pruned

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass
class QueryRun:
    query_id: str
    results: RankedList
    counters: EffortCounters
    # end-of-query thresholds of the global, local and rank queues
    thresholds: tuple[float, float, float] = (float("-inf"),) * 3
    elapsed_ms: float = 0.0


@dataclass
class LocalOutcome:
    """Result of local pruning for one pivot document.

    When ``pruned`` is set, ``triple`` holds the partial sums gathered before
    scoring stopped; ``hits`` counts the lists that contributed to them.
    ``complete`` says every list that could hold the document was read, which
    is what the effort counters call fully scored, even if the finished local
    score then lost to the threshold.
    """

    pruned: bool
    triple: ScoreTriple
    hits: int
    touched: int = 0
    complete: bool = True


class Cursor:
    """Position in one posting list for one query-term occurrence."""

    __slots__ = (
        "term_id", "position", "docs", "wb", "wl", "n", "pos", "doc", "blk",
        "blast", "bmd", "dB", "dL", "amax", "bmax", "bound_through", "opened",
    )

    def __init__(self, pl: PostingList, position: int, coeffs: MixCoefficients):
        self.term_id = pl.term_id
        self.position = position
        self.docs = pl.doc_list
        self.wb = pl.wb_list
        self.wl = pl.wl_list
        self.n = len(self.docs)
        self.blast = pl.block_last_list
        self.bmd = pl.block_max_doc_list
        self.dB = pl.block_dB_list
        self.dL = pl.block_dL_list
        a, b = coeffs.alpha, coeffs.beta
        self.amax = a * pl.sigma_B + (1.0 - a) * pl.sigma_L
        self.bmax = b * pl.sigma_B + (1.0 - b) * pl.sigma_L
        self.bound_through = 0.0
        self.pos = 0
        self.blk = 0
        self.opened = -1
        self.doc = self.docs[0] if self.n else END

    def next(self) -> None:
        pos = self.pos + 1
        self.pos = pos
        if pos >= self.n:
            self.doc = END
            return
        if pos > self.blast[self.blk]:
            self.blk += 1
        self.doc = self.docs[pos]

    def next_geq(self, target: int) -> None:
        """Move to the first posting with doc id >= target, skipping whole blocks."""
        if self.doc >= target:
            return
        blk = self.blk
        bmd = self.bmd
        if bmd[blk] < target:
            blk = bisect_left(bmd, target, blk + 1)
            if blk == len(bmd):
                self.pos = self.n
                self.doc = END
                return
            self.blk = blk
            self.pos = self.blast[blk - 1] + 1
        pos = bisect_left(self.docs, target, self.pos, self.blast[blk] + 1)
        self.pos = pos
        self.doc = self.docs[pos]

    @property
    def block_delta(self) -> tuple[float, float]:
        return self.dB[self.blk], self.dL[self.blk]

    def __repr__(self):
        return f"Cursor(term={self.term_id}, pos={self.pos}, doc={self.doc})"


def open_cursors(query: Query, index: DualIndex, coeffs: MixCoefficients) -> list[Cursor]:
    """One cursor per known query-term occurrence, in query order."""
    return [Cursor(index.lists[t], i, coeffs) for i, t in enumerate(query.known_terms(index))]


def canonical_triple(hits: list[tuple[int, float, float]], coeffs: MixCoefficients) -> ScoreTriple:
    """Sum per-term combined weights in query-term order.

    Every code path (traversals and the exhaustive oracle) accumulates in the
    same order, so equal documents get bit-identical scores.
    """
    if len(hits) > 1:
        hits.sort()
    a, b, c = coeffs.alpha, coeffs.beta, coeffs.gamma
    a1, b1, c1 = 1.0 - a, 1.0 - b, 1.0 - c
    g = lo = r = sb = sl = 0.0
    for _, wb, wl in hits:
        g += a * wb + a1 * wl
        lo += b * wb + b1 * wl
        r += c * wb + c1 * wl
        sb += wb
        sl += wl
    return ScoreTriple(g, lo, r, sb, sl)


def candidate_count(query: Query, index: DualIndex) -> int:
    """Number of distinct documents containing at least one query term."""
    terms = set(query.known_terms(index))
    if not terms:
        return 0
    return int(np.unique(np.concatenate([index.lists[t].docs for t in terms])).size)


def run_query(query: Query, index: DualIndex, config: TraversalConfig) -> QueryRun:
    """Dispatch on ``config.algorithm`` and time the traversal call."""
    from .blockmax import bmw_2gti
    from .maxscore import maxscore_2gti
    from .oracle import exhaustive_run

    fn = {
        Algorithm.MAXSCORE: maxscore_2gti,
        Algorithm.BMW: bmw_2gti,
        Algorithm.EXHAUSTIVE: exhaustive_run,
    }[config.algorithm]
    start = time.perf_counter()
    run = fn(query, index, config)
    run.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return run
