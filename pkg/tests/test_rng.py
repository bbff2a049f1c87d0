"""RngStream: reproducibility and exact stream positioning."""

import numpy as np
import pytest

from agora.core import ParameterError, RngStream


def test_same_seed_same_sequence():
    a = RngStream(123)
    b = RngStream(123)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]


def test_stream_matches_raw_numpy_output():
    # The k-th value is by construction the k-th raw output of PCG64(seed).
    raw = np.random.PCG64(99).random_raw(16)
    stream = RngStream(99)
    assert [stream.next_u64() for _ in range(16)] == [int(x) for x in raw]


def test_consumed_count_repositions_exactly():
    a = RngStream(7)
    for _ in range(1000):
        a.next_u64()
    b = RngStream(7, consumed=1000)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]


def test_repositioning_across_prefetch_boundary():
    # The internal prefetch buffer holds 4096 values; crossing it must not
    # shift the logical position.
    a = RngStream(11)
    for _ in range(4100):
        a.next_u64()
    b = RngStream(11, consumed=4100)
    assert a.next_u64() == b.next_u64()
    assert a.consumed == b.consumed == 4101


def test_skip_is_equivalent_to_drawing():
    a = RngStream(5)
    b = RngStream(5)
    for _ in range(137):
        b.next_u64()
    a.skip(137)
    assert a.consumed == b.consumed
    assert a.next_u64() == b.next_u64()


def test_randbelow_bounds_and_trivial_case():
    stream = RngStream(3)
    values = [stream.randbelow(10) for _ in range(500)]
    assert all(0 <= v < 10 for v in values)
    assert set(values) == set(range(10))
    before = stream.consumed
    assert stream.randbelow(1) == 0
    assert stream.consumed == before  # n <= 1 draws nothing


def test_permutation_is_a_permutation():
    stream = RngStream(4)
    perm = stream.permutation(20)
    assert sorted(perm) == list(range(20))
    assert RngStream(4).permutation(20) == perm


def test_sample_is_distinct_subset():
    stream = RngStream(8)
    pool = [3, 5, 9, 12, 20, 21, 30]
    picked = stream.sample(pool, 3)
    assert len(picked) == 3
    assert len(set(picked)) == 3
    assert set(picked) <= set(pool)
    # asking for more than the pool returns everything
    assert sorted(stream.sample(pool, 50)) == sorted(pool)
    # the pool itself is never mutated
    assert pool == [3, 5, 9, 12, 20, 21, 30]


def test_seed_and_consumed_validation():
    with pytest.raises(ParameterError):
        RngStream(-1)
    with pytest.raises(ParameterError):
        RngStream(2**64)
    with pytest.raises(ParameterError):
        RngStream(0, consumed=-5)
    with pytest.raises(ValueError):
        RngStream(0).skip(-1)
