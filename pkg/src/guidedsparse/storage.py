"""Single-file binary index format. Field layout is documented in FORMATS.md."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .bm25 import Bm25Params
from .index import AlignmentMode, AlignmentStats, DualIndex, FillMode, PostingList

MAGIC = b"2GTI"
FORMAT_VERSION = 1

_FILL_CODES = {FillMode.ZERO: 0, FillMode.ONE: 1, FillMode.SCALED: 2}
_FILL_FROM_CODE = {v: k for k, v in _FILL_CODES.items()}

# num_docs, avg_doc_length, fill, include_learned_zero, k1, b, block_size,
# has_stats, mean_B, mean_L, scale_ratio, stats_filled, filled_count, num_terms, num_postings, num_blocks
_HEAD = struct.Struct("<QdBBddIBdddQQQQQ")
_SECTIONS = (b"HEAD", b"DLEN", b"TERM", b"POST", b"BLKS")


class IndexFormatError(ValueError):
    def __init__(self, section: str, message: str):
        super().__init__(f"[{section}] {message}")
        self.section = section


class IndexVersionError(IndexFormatError):
    def __init__(self, found: int):
        super().__init__("version", f"unsupported format version {found} (expected {FORMAT_VERSION})")
        self.found = found


def _section(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack("<Q", len(payload)) + payload


def dumps(index: DualIndex) -> bytes:
    terms = sorted(index.lists)
    lists = [index.lists[t] for t in terms]
    num_postings = sum(len(pl) for pl in lists)
    num_blocks = sum(len(pl.block_last) for pl in lists)
    stats = index.stats
    head = _HEAD.pack(
        index.num_docs,
        index.avg_doc_length,
        _FILL_CODES[index.alignment.fill],
        int(index.alignment.include_learned_zero),
        index.bm25.k1,
        index.bm25.b,
        index.block_size,
        int(stats is not None),
        stats.mean_B if stats else 0.0,
        stats.mean_L if stats else 0.0,
        stats.scale_ratio if stats else 0.0,
        stats.filled_count if stats else 0,
        index.filled_count,
        len(terms),
        num_postings,
        num_blocks,
    )
    term_table = np.zeros(len(terms), dtype=[("term", "<i8"), ("n", "<u8"), ("nblocks", "<u8"),
                                              ("sigma_B", "<f8"), ("sigma_L", "<f8")])
    for i, pl in enumerate(lists):
        term_table[i] = (pl.term_id, len(pl), len(pl.block_last), pl.sigma_B, pl.sigma_L)

    def cat(name, dtype):
        if not lists:
            return b""
        return np.concatenate([getattr(pl, name) for pl in lists]).astype(dtype).tobytes()

    post = cat("docs", "<i8") + cat("tf", "<i8") + cat("w_B", "<f8") + cat("w_L", "<f8")
    blks = cat("block_last", "<i8") + cat("block_delta_B", "<f8") + cat("block_delta_L", "<f8")
    return b"".join([
        MAGIC,
        struct.pack("<I", FORMAT_VERSION),
        _section(b"HEAD", head),
        _section(b"DLEN", np.asarray(index.doc_lengths, dtype="<i8").tobytes()),
        _section(b"TERM", term_table.tobytes()),
        _section(b"POST", post),
        _section(b"BLKS", blks),
    ])


def serialize_index(index: DualIndex, path) -> None:
    Path(path).write_bytes(dumps(index))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, section: str) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexFormatError(section, f"truncated: need {n} bytes at offset {self.pos}, file has {len(self.data)}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def section(self, tag: bytes) -> bytes:
        name = tag.decode()
        found = self.take(4, name)
        if found != tag:
            raise IndexFormatError(name, f"expected section tag {tag!r}, found {found!r}")
        (length,) = struct.unpack("<Q", self.take(8, name))
        return self.take(length, name)


def _array(buf: bytes, dtype: str, count: int, offset: int, section: str) -> np.ndarray:
    size = np.dtype(dtype).itemsize * count
    if offset + size > len(buf):
        raise IndexFormatError(section, f"payload too short for {count} x {dtype}")
    return np.frombuffer(buf, dtype=dtype, count=count, offset=offset).astype(dtype[1:], copy=True)


def loads(data: bytes) -> DualIndex:
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise IndexFormatError("magic", "not a 2GTI index file")
    (version,) = struct.unpack("<I", r.take(4, "version"))
    if version != FORMAT_VERSION:
        raise IndexVersionError(version)

    head = r.section(b"HEAD")
    if len(head) != _HEAD.size:
        raise IndexFormatError("HEAD", f"expected {_HEAD.size} bytes, found {len(head)}")
    (num_docs, avg_len, fill, keep_zero, k1, b, block_size, has_stats, mean_b, mean_l, ratio,
     stats_filled, filled_count, num_terms, num_postings, num_blocks) = _HEAD.unpack(head)
    if fill not in _FILL_FROM_CODE:
        raise IndexFormatError("HEAD", f"unknown alignment code {fill}")

    dlen = r.section(b"DLEN")
    if len(dlen) != 8 * num_docs:
        raise IndexFormatError("DLEN", f"expected {num_docs} document lengths")
    doc_lengths = _array(dlen, "<i8", num_docs, 0, "DLEN")

    term_dtype = np.dtype([("term", "<i8"), ("n", "<u8"), ("nblocks", "<u8"), ("sigma_B", "<f8"), ("sigma_L", "<f8")])
    tbuf = r.section(b"TERM")
    if len(tbuf) != term_dtype.itemsize * num_terms:
        raise IndexFormatError("TERM", f"expected {num_terms} term entries")
    table = np.frombuffer(tbuf, dtype=term_dtype, count=num_terms)
    if int(table["n"].sum()) != num_postings or int(table["nblocks"].sum()) != num_blocks:
        raise IndexFormatError("TERM", "posting/block counts disagree with header")

    pbuf = r.section(b"POST")
    if len(pbuf) != 32 * num_postings:
        raise IndexFormatError("POST", f"expected {num_postings} postings")
    docs = _array(pbuf, "<i8", num_postings, 0, "POST")
    tf = _array(pbuf, "<i8", num_postings, 8 * num_postings, "POST")
    w_b = _array(pbuf, "<f8", num_postings, 16 * num_postings, "POST")
    w_l = _array(pbuf, "<f8", num_postings, 24 * num_postings, "POST")

    bbuf = r.section(b"BLKS")
    if len(bbuf) != 24 * num_blocks:
        raise IndexFormatError("BLKS", f"expected {num_blocks} blocks")
    blast = _array(bbuf, "<i8", num_blocks, 0, "BLKS")
    bdb = _array(bbuf, "<f8", num_blocks, 8 * num_blocks, "BLKS")
    bdl = _array(bbuf, "<f8", num_blocks, 16 * num_blocks, "BLKS")
    if r.pos != len(data):
        raise IndexFormatError("trailer", f"{len(data) - r.pos} unexpected trailing bytes")

    lists = {}
    p = q = 0
    for term, n, nb, sb, sl in table.tolist():
        lists[term] = PostingList(
            term, docs[p:p + n], tf[p:p + n], w_b[p:p + n], w_l[p:p + n],
            block_size=block_size, block_last=blast[q:q + nb],
            block_delta_B=bdb[q:q + nb], block_delta_L=bdl[q:q + nb], sigma_B=sb, sigma_L=sl,
        )
        p += n
        q += nb

    stats = AlignmentStats(mean_b, mean_l, ratio, stats_filled) if has_stats else None
    return DualIndex(
        num_docs=num_docs,
        doc_lengths=doc_lengths,
        avg_doc_length=avg_len,
        lists=lists,
        alignment=AlignmentMode(_FILL_FROM_CODE[fill], bool(keep_zero)),
        bm25=Bm25Params(k1, b),
        block_size=block_size,
        stats=stats,
        filled_count=filled_count,
    )


def load_index(path) -> DualIndex:
    return loads(Path(path).read_bytes())
