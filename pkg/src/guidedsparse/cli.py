"""Command line: build an index, search it, evaluate runs, verify guarantees.

    guidedsparse build corpus.tsv index.2gti --alignment scaled
    guidedsparse search index.2gti queries.tsv --alpha 1 --beta 0.3 --gamma 0.05 --runs-out run.trec
    guidedsparse eval run.trec qrels.txt --metric mrr@10 --metric recall@1000
    guidedsparse verify --trials 500 --seed 0

Exit status is 0 on success, 1 when ``verify`` finds a violation and 2 on any
input, parse or domain error.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from pathlib import Path

from .bm25 import Bm25Params
from .campaigns import CampaignSettings, run_all
from .evaluation import evaluate, format_run_lines, read_qrels, read_run
from .index import AlignmentMode, build_index
from .scoring import MixCoefficients
from .storage import load_index, serialize_index
from .textio import read_corpus, read_queries
from .traversal import Algorithm, TraversalConfig, run_query

DEFAULT_METRICS = ("mrr@10", "recall@1000", "ndcg@10")


class UsageError(Exception):
    pass


def _natural_key(qid: str):
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", qid) if p]


def cmd_build(args) -> int:
    alignment = AlignmentMode.parse(args.alignment, include_learned_zero=args.keep_learned_zero)
    corpus = read_corpus(args.corpus)
    index = build_index(corpus, Bm25Params(args.bm25_k1, args.bm25_b), args.block_size, alignment)
    serialize_index(index, args.index)
    print(f"docs\t{index.num_docs}")
    print(f"terms\t{len(index.lists)}")
    print(f"postings\t{index.num_postings}")
    print(f"filled_count\t{index.filled_count}")
    if index.stats is not None:
        print(f"scale_ratio\t{index.stats.scale_ratio!r}")
    return 0


def cmd_search(args) -> int:
    coeffs = MixCoefficients(args.alpha, args.beta, args.gamma)
    config = TraversalConfig(coeffs, args.k, args.factor_f, Algorithm(args.algorithm))
    index = load_index(args.index)
    queries = sorted(read_queries(args.queries), key=lambda q: _natural_key(q.query_id))
    runs = [run_query(q, index, config) for q in queries]

    out = open(args.runs_out, "w") if args.runs_out else sys.stdout
    try:
        for r in runs:
            ranked = [(str(d), s) for d, s in r.results]
            for line in format_run_lines(r.query_id, ranked, args.tag):
                out.write(line + "\n")
    finally:
        if out is not sys.stdout:
            out.close()

    if args.counters_out:
        with open(args.counters_out, "w", newline="") as fh:
            w = csv.writer(fh)
            names = list(runs[0].counters.as_dict()) if runs else []
            w.writerow(["qid", *names, "latency_ms"])
            for r in runs:
                c = r.counters.as_dict()
                w.writerow([r.query_id, *(c[n] for n in names), f"{r.elapsed_ms:.3f}"])
    return 0


def cmd_eval(args) -> int:
    metrics = args.metric or list(DEFAULT_METRICS)
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    report = evaluate(run, qrels, metrics)
    print(report.table())
    print(f"queries\t{len(report.per_query)}")
    if args.per_query_out:
        Path(args.per_query_out).write_text(report.per_query_csv())
    return 0


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError(f"--trials must be >= 1, got {args.trials}")
    if args.max_docs < 1:
        raise UsageError(f"--max-docs must be >= 1, got {args.max_docs}")
    settings = CampaignSettings(seed=args.seed, max_docs=args.max_docs)
    report = run_all(args.trials, settings)
    print(report.text())
    if report.passed:
        return 0
    for t in report.tallies:
        if t.first_failure:
            f = t.first_failure
            print(f"reproduce {t.name}: seed={f['seed']} trial={f['trial']}", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="guidedsparse", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a dual-weight index from a corpus file")
    b.add_argument("corpus")
    b.add_argument("index")
    b.add_argument("--alignment", choices=["zero", "one", "scaled"], default="scaled")
    b.add_argument("--block-size", type=int, default=64)
    b.add_argument("--bm25-k1", type=float, default=0.9)
    b.add_argument("--bm25-b", type=float, default=0.4)
    b.add_argument("--keep-learned-zero", action="store_true",
                   help="keep postings whose learned weight is zero")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("search", help="run queries against an index")
    s.add_argument("index")
    s.add_argument("queries")
    s.add_argument("--algorithm", choices=[a.value for a in Algorithm], default=Algorithm.MAXSCORE.value)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--gamma", type=float, default=0.05)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--factor-f", type=float, default=1.0)
    s.add_argument("--runs-out", help="TREC run file (default: stdout)")
    s.add_argument("--counters-out", help="per-query effort counters and latency as CSV")
    s.add_argument("--tag", default="guidedsparse")
    s.set_defaults(func=cmd_search)

    e = sub.add_parser("eval", help="score a TREC run against qrels")
    e.add_argument("run")
    e.add_argument("qrels")
    e.add_argument("--metric", action="append", help="mrr@K, recall@K or ndcg@K (repeatable)")
    e.add_argument("--per-query-out")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="randomized rank-safety and guarantee campaigns")
    v.add_argument("--trials", type=int, default=500)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-docs", type=int, default=2000)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        # covers TextFormatError, TrecFormatError, IndexFormatError, IndexBuildError,
        # NoEvaluableQueries and coefficient domain errors
        print(f"guidedsparse {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
