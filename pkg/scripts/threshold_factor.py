"""Threshold factor sweep: effort and recall against the exhaustive top-k.

    python scripts/threshold_factor.py --factors 0.8 1 1.2 1.5 2
"""

import argparse

import numpy as np

from guidedsparse.oracle import exhaustive_topk
from guidedsparse.scoring import MixCoefficients
from guidedsparse.synthetic import ZipfCorpusConfig, zipf_instance
from guidedsparse.traversal import Algorithm, TraversalConfig, run_query


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--num-docs", type=int, default=100_000)
    p.add_argument("--num-queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--x", type=float, default=0.0, help="alpha = beta = gamma")
    p.add_argument("--factors", type=float, nargs="+", default=[0.8, 1.0, 1.2, 1.5, 2.0])
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm if a is not Algorithm.EXHAUSTIVE],
                   default=Algorithm.MAXSCORE.value)
    args = p.parse_args()

    inst = zipf_instance(ZipfCorpusConfig(num_docs=args.num_docs, num_queries=args.num_queries, seed=args.seed))
    coeffs = MixCoefficients.uniform(args.x)
    oracle = [exhaustive_topk(q, inst.index, args.x, args.k).doc_set for q in inst.queries]
    print("F\tfully_scored\tlocally_pruned\trecall_vs_exhaustive")
    for f in args.factors:
        cfg = TraversalConfig(coeffs, args.k, f, Algorithm(args.algorithm))
        fully = pruned = 0
        recalls = []
        for q, want in zip(inst.queries, oracle):
            run = run_query(q, inst.index, cfg)
            fully += run.counters.docs_fully_scored
            pruned += run.counters.docs_locally_pruned
            if want:
                recalls.append(len(run.results.doc_set & want) / len(want))
        print(f"{f:g}\t{fully}\t{pruned}\t{np.mean(recalls):.4f}")


if __name__ == "__main__":
    main()
