"""Fully-scored document counts of guided vs unguided traversal across k.

    python scripts/effort_trends.py --num-docs 100000 --ks 10 100 1000
"""

import argparse
import time

from guidedsparse.scoring import MixCoefficients
from guidedsparse.synthetic import ZipfCorpusConfig, zipf_instance
from guidedsparse.traversal import Algorithm, TraversalConfig, run_query


def totals(inst, coeffs, k, algorithm):
    cfg = TraversalConfig(coeffs, k, 1.0, algorithm)
    fully = pruned = 0
    start = time.perf_counter()
    for q in inst.queries:
        c = run_query(q, inst.index, cfg).counters
        fully += c.docs_fully_scored
        pruned += c.docs_locally_pruned
    return fully, pruned, (time.perf_counter() - start) * 1000 / len(inst.queries)


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--num-docs", type=int, default=100_000)
    p.add_argument("--num-queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--ks", type=int, nargs="+", default=[10, 100, 1000])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.3)
    p.add_argument("--gamma", type=float, default=0.05)
    args = p.parse_args()

    inst = zipf_instance(ZipfCorpusConfig(num_docs=args.num_docs, num_queries=args.num_queries, seed=args.seed))
    print(f"corpus: {inst.index.num_docs} docs, {inst.index.num_postings} postings, "
          f"{inst.index.filled_count} filled, {len(inst.queries)} queries")
    guided = MixCoefficients(args.alpha, args.beta, args.gamma)
    plain = MixCoefficients.uniform(0.0)
    print("algorithm\tk\tguided_full\tplain_full\tratio\tguided_pruned\tguided_ms\tplain_ms")
    for alg in (Algorithm.MAXSCORE, Algorithm.BMW):
        for k in args.ks:
            g, gp, gms = totals(inst, guided, k, alg)
            u, _, ums = totals(inst, plain, k, alg)
            print(f"{alg.value}\t{k}\t{g}\t{u}\t{g / max(u, 1):.3f}\t{gp}\t{gms:.1f}\t{ums:.1f}")


if __name__ == "__main__":
    main()
