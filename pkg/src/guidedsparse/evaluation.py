"""Relevance metrics, latency summaries and TREC run/qrels files."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

# qid -> {docid -> grade}
Qrels = dict[str, dict[str, int]]
# qid -> [(docid, score), ...] in rank order
Run = dict[str, list[tuple[str, float]]]


class TrecFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


def mrr_at_k(ranked: Sequence, relevant: set, k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    for rank, doc in enumerate(ranked[:k], start=1):
        if doc in relevant:
            return 1.0 / rank
    return 0.0


def recall_at_k(ranked: Sequence, relevant: set, k: int) -> float:
    if not relevant:
        raise ValueError("recall is undefined without relevant documents")
    return len(set(ranked[:k]) & set(relevant)) / len(relevant)


def dcg(grades: Iterable[int]) -> float:
    return sum((2.0 ** g - 1.0) / math.log2(i + 2) for i, g in enumerate(grades))


def ndcg_at_k(ranked: Sequence, graded: Mapping, k: int = 10) -> float:
    """Exponential-gain nDCG; the ideal ordering uses every judged document."""
    ideal = sorted((g for g in graded.values() if g > 0), reverse=True)[:k]
    if not ideal:
        raise ValueError("nDCG is undefined without a positively graded document")
    got = dcg(graded.get(doc, 0) for doc in ranked[:k])
    return got / dcg(ideal)


def ndcg_at_10(ranked: Sequence, graded: Mapping) -> float:
    return ndcg_at_k(ranked, graded, 10)


def latency_stats(samples: Sequence[float]) -> tuple[float, float]:
    """(mean, p99) with p99 the nearest-rank order statistic ceil(0.99 n)."""
    if len(samples) == 0:
        raise ValueError("latency_stats needs at least one sample")
    arr = np.sort(np.asarray(samples, dtype=np.float64))
    rank = math.ceil(0.99 * len(arr))
    return float(arr.mean()), float(arr[rank - 1])


# ---------------------------------------------------------------------------
# metric names like "mrr@10", "recall@1000", "ndcg@10"


def parse_metric(name: str) -> tuple[str, int]:
    kind, sep, k = name.lower().partition("@")
    if not sep or kind not in ("mrr", "recall", "ndcg") or not k.isdigit() or int(k) < 1:
        raise ValueError(f"unknown metric {name!r}; expected mrr@K, recall@K or ndcg@K")
    return kind, int(k)


def metric_value(name: str, ranked: Sequence, graded: Mapping) -> float | None:
    """Per-query value, or None when the query is not evaluable for this metric."""
    kind, k = parse_metric(name)
    relevant = {d for d, g in graded.items() if g > 0}
    if not relevant:
        return None
    if kind == "mrr":
        return mrr_at_k(ranked, relevant, k)
    if kind == "recall":
        return recall_at_k(ranked, relevant, k)
    return ndcg_at_k(ranked, graded, k)


@dataclass
class EvalReport:
    metrics: dict[str, float]
    per_query: dict[str, dict[str, float]]
    latency_mean_ms: float | None = None
    latency_p99_ms: float | None = None
    counters: dict[str, float] = field(default_factory=dict)

    def table(self) -> str:
        lines = [f"{'metric':<14}{'value':>10}"]
        for name, value in self.metrics.items():
            lines.append(f"{name:<14}{value:>10.4f}")
        if self.latency_mean_ms is not None:
            lines.append(f"{'MRT (ms)':<14}{self.latency_mean_ms:>10.3f}")
            lines.append(f"{'P99 (ms)':<14}{self.latency_p99_ms:>10.3f}")
        for name, value in self.counters.items():
            lines.append(f"{name:<24}{value:>12.1f}")
        return "\n".join(lines)

    def per_query_csv(self) -> str:
        names = list(self.metrics)
        rows = ["qid," + ",".join(names)]
        for qid, vals in self.per_query.items():
            rows.append(qid + "," + ",".join("" if n not in vals else f"{vals[n]:.6f}" for n in names))
        return "\n".join(rows) + "\n"


class NoEvaluableQueries(ValueError):
    pass


def evaluate(run: Run, qrels: Qrels, metrics: Sequence[str]) -> EvalReport:
    """Average each metric over the queries that appear in both run and qrels
    and have at least one relevant judgment."""
    for m in metrics:
        parse_metric(m)
    per_query: dict[str, dict[str, float]] = {}
    for qid, graded in qrels.items():
        if qid not in run:
            continue
        ranked = [d for d, _ in run[qid]]
        vals = {}
        for m in metrics:
            v = metric_value(m, ranked, graded)
            if v is not None:
                vals[m] = v
        if vals:
            per_query[qid] = vals
    if not per_query:
        raise NoEvaluableQueries("no evaluable queries: run and qrels share no query with relevant judgments")
    agg = {}
    for m in metrics:
        vals = [v[m] for v in per_query.values() if m in v]
        agg[m] = float(np.mean(vals)) if vals else 0.0
    return EvalReport(agg, per_query)


# ---------------------------------------------------------------------------
# TREC files


def read_qrels(path) -> Qrels:
    qrels: Qrels = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise TrecFormatError(path, lineno, f"expected 'qid 0 docid grade', got {line.rstrip()!r}")
            qid, _, docid, grade = parts
            try:
                g = int(grade)
            except ValueError:
                raise TrecFormatError(path, lineno, f"grade {grade!r} is not an integer") from None
            if g < 0:
                # negative grades mark judged-nonrelevant in some collections
                g = 0
            qrels.setdefault(qid, {})[docid] = g
    return qrels


def write_qrels(qrels: Qrels, path) -> None:
    with open(path, "w") as fh:
        for qid, docs in qrels.items():
            for docid, grade in docs.items():
                fh.write(f"{qid} 0 {docid} {grade}\n")


def read_run(path) -> Run:
    run: Run = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise TrecFormatError(path, lineno, f"expected 'qid Q0 docid rank score tag', got {line.rstrip()!r}")
            qid, _, docid, rank, score, _tag = parts
            try:
                int(rank)
                s = float(score)
            except ValueError:
                raise TrecFormatError(path, lineno, "rank must be an integer and score a number") from None
            run.setdefault(qid, []).append((docid, s))
    return run


def format_run_lines(qid: str, ranked: Iterable[tuple[str, float]], tag: str) -> list[str]:
    return [f"{qid} Q0 {doc} {rank} {score:.17g} {tag}" for rank, (doc, score) in enumerate(ranked, start=1)]


def write_run(run: Run, path, tag: str = "guidedsparse") -> None:
    with open(path, "w") as fh:
        for qid, ranked in run.items():
            for line in format_run_lines(qid, ranked, tag):
                fh.write(line + "\n")
