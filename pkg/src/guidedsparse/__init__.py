"""Two-level guided top-k traversal over dual BM25/learned sparse indexes."""

from .bm25 import Bm25Params, bm25_weight, idf
from .blockmax import bmw_2gti
from .evaluation import evaluate, mrr_at_k, ndcg_at_10, ndcg_at_k, recall_at_k
from .index import AlignmentMode, DualIndex, FillMode, build_index, build_index_arrays
from .maxscore import maxscore_2gti
from .oracle import exhaustive_topk, two_stage
from .scoring import MixCoefficients, RankedList, TripleTopK
from .storage import load_index, serialize_index
from .traversal import Algorithm, EffortCounters, Query, QueryRun, TraversalConfig, run_query

__all__ = [
    "Algorithm", "AlignmentMode", "Bm25Params", "DualIndex", "EffortCounters", "FillMode",
    "MixCoefficients", "Query", "QueryRun", "RankedList", "TraversalConfig", "TripleTopK",
    "bm25_weight", "bmw_2gti", "build_index", "build_index_arrays", "evaluate", "exhaustive_topk",
    "idf", "load_index", "maxscore_2gti", "mrr_at_k", "ndcg_at_10", "ndcg_at_k", "recall_at_k",
    "run_query", "serialize_index", "two_stage",
]
