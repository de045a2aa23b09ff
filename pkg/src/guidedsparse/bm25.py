"""Okapi BM25 term weights for the lexical side of the dual index."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must lie in [0, 1], got {self.b}")


def idf(df: int, num_docs: int) -> float:
    return math.log(1.0 + (num_docs - df + 0.5) / (df + 0.5))


def bm25_weight(
    tf: int,
    df: int,
    doc_len: float,
    avg_doc_len: float,
    num_docs: int,
    params: Bm25Params = Bm25Params(),
) -> float:
    """Weight of one term occurrence pattern in one document.

    ``idf(df) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * doc_len / avg_doc_len))``
    with ``idf = ln(1 + (N - df + 0.5) / (df + 0.5))``. Query-side weights
    are fixed to 1, so this is the full per-term contribution.
    """
    if tf < 1:
        raise ValueError(f"tf must be >= 1, got {tf}")
    if df < 1 or doc_len <= 0 or avg_doc_len <= 0 or num_docs < 1:
        raise ValueError(
            f"bm25 domain error: df={df} doc_len={doc_len} "
            f"avg_doc_len={avg_doc_len} num_docs={num_docs}"
        )
    if df > num_docs:
        raise ValueError(f"df={df} exceeds num_docs={num_docs}")
    k1, b = params.k1, params.b
    norm = k1 * (1.0 - b + b * doc_len / avg_doc_len)
    return idf(df, num_docs) * tf * (k1 + 1.0) / (tf + norm)


def bm25_weights(tf, df, doc_len, avg_doc_len: float, num_docs: int, params: Bm25Params = Bm25Params()):
    """Vectorized :func:`bm25_weight` over aligned arrays (no domain checks)."""
    tf = np.asarray(tf, dtype=np.float64)
    df = np.asarray(df, dtype=np.float64)
    doc_len = np.asarray(doc_len, dtype=np.float64)
    k1, b = params.k1, params.b
    idf_ = np.log(1.0 + (num_docs - df + 0.5) / (df + 0.5))
    norm = k1 * (1.0 - b + b * doc_len / avg_doc_len)
    return idf_ * tf * (k1 + 1.0) / (tf + norm)
