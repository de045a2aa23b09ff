import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from guidedsparse.index import AlignmentMode, FillMode, build_index
from guidedsparse.traversal import Query

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# a few repeated values so that equal scores (and tie-breaks) actually happen
_weights = st.one_of(
    st.sampled_from([0.0, 0.5, 1.0, 2.0, 2.5]),
    st.floats(0.0, 10.0, allow_nan=False, allow_infinity=False),
)


@st.composite
def corpora(draw, max_docs=25, max_terms=6):
    """Pre-tokenized corpus: (doc_id, [(term, tf, w_L), ...]) with dense doc ids."""
    n = draw(st.integers(1, max_docs))
    vocab = draw(st.integers(1, max_terms))
    corpus = []
    for d in range(n):
        terms = draw(st.lists(st.integers(0, vocab - 1), unique=True, max_size=vocab))
        corpus.append((d, [(t, draw(st.integers(0, 4)), draw(_weights)) for t in terms]))
    return corpus


alignments = st.builds(
    AlignmentMode,
    st.sampled_from([FillMode.ZERO, FillMode.ONE, FillMode.SCALED]),
    st.booleans(),
)


def safe_build(corpus, block_size=2, alignment=AlignmentMode()):
    """build_index, falling back to zero fill when scaled stats are undefined."""
    try:
        return build_index(corpus, block_size=block_size, alignment=alignment)
    except ValueError:
        return build_index(corpus, block_size=block_size,
                           alignment=AlignmentMode(FillMode.ZERO, alignment.include_learned_zero))


@st.composite
def instances(draw, max_docs=25, max_terms=6, max_query_len=5):
    corpus = draw(corpora(max_docs, max_terms))
    vocab = 1 + max((t for _, ps in corpus for t, _, _ in ps), default=0)
    index = safe_build(corpus, draw(st.sampled_from([1, 2, 3, 64])), draw(alignments))
    terms = draw(st.lists(st.integers(0, vocab), min_size=1, max_size=max_query_len))
    return index, Query("q", tuple(terms))


@pytest.fixture
def tiny_corpus():
    # doc 1 has a learned-only expansion term (tf 0); doc 2 has a zero learned weight
    return [
        (0, [(0, 2, 0.5), (1, 1, 1.2)]),
        (1, [(0, 1, 0.3), (2, 0, 0.9)]),
        (2, [(1, 3, 2.0), (2, 1, 0.0)]),
        (3, [(0, 1, 1.5), (1, 1, 0.4), (2, 2, 0.7)]),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
