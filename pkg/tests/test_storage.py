import struct

import numpy as np
import pytest
from hypothesis import given

from guidedsparse.bm25 import Bm25Params
from guidedsparse.index import AlignmentMode, FillMode, build_index, build_index_arrays
from guidedsparse.storage import (
    FORMAT_VERSION,
    IndexFormatError,
    IndexVersionError,
    dumps,
    load_index,
    loads,
    serialize_index,
)
from guidedsparse.synthetic import random_postings

from conftest import alignments, corpora, safe_build


def assert_bit_identical(a, b):
    assert a == b
    for t in a.lists:
        for name in ("w_B", "w_L", "block_delta_B", "block_delta_L"):
            x, y = getattr(a.lists[t], name), getattr(b.lists[t], name)
            assert x.tobytes() == y.tobytes()


def test_empty_index_round_trip():
    index = build_index([], alignment=AlignmentMode(FillMode.ZERO))
    assert index.num_docs == 0
    assert_bit_identical(loads(dumps(index)), index)


def test_file_round_trip(tmp_path, tiny_corpus):
    index = build_index(tiny_corpus, alignment=AlignmentMode(FillMode.SCALED), block_size=2)
    path = tmp_path / "i.2gti"
    serialize_index(index, path)
    again = load_index(path)
    assert_bit_identical(again, index)
    assert again.stats == index.stats
    assert path.read_bytes()[:4] == b"2GTI"


def test_random_thousand_doc_round_trip(rng):
    postings = random_postings(rng, 1000, 300, 12.0)
    index = build_index_arrays(1000, *postings, Bm25Params(1.2, 0.75), 16, AlignmentMode(FillMode.SCALED, True))
    assert_bit_identical(loads(dumps(index)), index)


@given(corpora(), alignments)
def test_round_trip_property(corpus, alignment):
    index = safe_build(corpus, 3, alignment)
    assert_bit_identical(loads(dumps(index)), index)


def test_every_truncation_is_a_format_error(tiny_corpus):
    data = dumps(build_index(tiny_corpus, block_size=2))
    for cut in range(len(data)):
        with pytest.raises(IndexFormatError):
            loads(data[:cut])


def test_truncation_names_section(tiny_corpus):
    data = dumps(build_index(tiny_corpus))
    with pytest.raises(IndexFormatError) as err:
        loads(data[:-5])
    assert err.value.section == "BLKS"


def test_version_mismatch():
    data = bytearray(dumps(build_index([(0, [(0, 1, 1.0)])])))
    data[4:8] = struct.pack("<I", FORMAT_VERSION + 1)
    with pytest.raises(IndexVersionError) as err:
        loads(bytes(data))
    assert err.value.found == FORMAT_VERSION + 1


def test_bad_magic_and_trailing_bytes():
    data = dumps(build_index([(0, [(0, 1, 1.0)])]))
    with pytest.raises(IndexFormatError):
        loads(b"XXXX" + data[4:])
    with pytest.raises(IndexFormatError) as err:
        loads(data + b"\0")
    assert err.value.section == "trailer"


def test_corrupt_section_tag():
    data = bytearray(dumps(build_index([(0, [(0, 1, 1.0)])])))
    i = data.index(b"TERM")
    data[i:i + 4] = b"TERX"
    with pytest.raises(IndexFormatError) as err:
        loads(bytes(data))
    assert err.value.section == "TERM"
