"""Line-oriented corpus and query files.

Corpus: ``doc_id<TAB>term:tf:w_L term:tf:w_L ...`` (one document per line).
Queries: ``qid<TAB>term term ...`` (repeated terms weight the term).
"""

from __future__ import annotations

from pathlib import Path

from .index import Corpus
from .traversal import Query


class TextFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


def parse_corpus_line(line: str, path="<corpus>", lineno: int = 0):
    head, _, rest = line.rstrip("\n").partition("\t")
    try:
        doc_id = int(head)
    except ValueError:
        raise TextFormatError(path, lineno, f"bad document id {head!r}") from None
    postings = []
    for item in rest.split():
        fields = item.split(":")
        if len(fields) != 3:
            raise TextFormatError(path, lineno, f"posting {item!r} is not term:tf:weight")
        try:
            postings.append((int(fields[0]), int(fields[1]), float(fields[2])))
        except ValueError:
            raise TextFormatError(path, lineno, f"posting {item!r} has a non-numeric field") from None
    return doc_id, postings


def read_corpus(path) -> list:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                out.append(parse_corpus_line(line, path, lineno))
    return out


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w") as fh:
        for doc_id, postings in corpus:
            items = " ".join(f"{t}:{tf}:{w!r}" for t, tf, w in postings)
            fh.write(f"{doc_id}\t{items}\n")


def read_queries(path) -> list[Query]:
    queries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            qid, sep, rest = line.rstrip("\n").partition("\t")
            if not sep:
                raise TextFormatError(path, lineno, "expected 'qid<TAB>term term ...'")
            try:
                terms = tuple(int(t) for t in rest.split())
            except ValueError:
                raise TextFormatError(path, lineno, "query terms must be integer ids") from None
            queries.append(Query(qid.strip(), terms))
    return queries


def write_queries(queries, path) -> None:
    Path(path).write_text("".join(f"{q.query_id}\t{' '.join(map(str, q.terms))}\n" for q in queries))
