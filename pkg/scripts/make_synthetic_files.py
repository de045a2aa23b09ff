"""Write a seeded Zipf corpus, its queries and synthetic qrels as text files.

The qrels label the top documents of the learned-only ranking (grade 2 for
the first, 1 for the next few), so metric values are only a sanity check.

    python scripts/make_synthetic_files.py data/ --num-docs 20000
"""

import argparse
from pathlib import Path

from guidedsparse.evaluation import write_qrels
from guidedsparse.oracle import exhaustive_topk
from guidedsparse.synthetic import ZipfCorpusConfig, zipf_instance
from guidedsparse.textio import write_queries


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("out_dir")
    p.add_argument("--num-docs", type=int, default=20_000)
    p.add_argument("--vocab", type=int, default=8_000)
    p.add_argument("--num-queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args()

    cfg = ZipfCorpusConfig(num_docs=args.num_docs, vocab=args.vocab, num_queries=args.num_queries, seed=args.seed)
    inst = zipf_instance(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    docs, terms, tf, w_l = inst.postings
    by_doc = [[] for _ in range(cfg.num_docs)]
    for d, t, f, w in zip(docs.tolist(), terms.tolist(), tf.tolist(), w_l.tolist()):
        by_doc[d].append(f"{t}:{f}:{w!r}")
    with open(out / "corpus.tsv", "w") as fh:
        for d, items in enumerate(by_doc):
            fh.write(f"{d}\t{' '.join(items)}\n")

    write_queries(inst.queries, out / "queries.tsv")
    qrels = {}
    for q in inst.queries:
        top = exhaustive_topk(q, inst.index, 0.0, 5).docs
        if top:
            qrels[q.query_id] = {str(d): (2 if i == 0 else 1) for i, d in enumerate(top)}
    write_qrels(qrels, out / "qrels.txt")
    print(f"wrote {cfg.num_docs} docs, {len(inst.queries)} queries, {len(qrels)} judged queries to {out}")


if __name__ == "__main__":
    main()
