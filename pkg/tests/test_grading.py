import math

import pytest
from hypothesis import given, strategies as st

from hardymod.grading import add_indices, degree, enumerate_monomials

small_index = st.tuples(*[st.integers(0, 6)] * 3)


def test_degree_examples():
    assert degree((0, 0)) == 0
    assert degree((2, 1)) == 3
    assert degree((0, 5, 0)) == 5


def test_add_indices_examples():
    assert add_indices((1, 0), (0, 1)) == (1, 1)
    assert add_indices((0, 0), (2, 3)) == (2, 3)
    assert add_indices((1, 1), (1, 1)) == (2, 2)


def test_add_indices_arity_mismatch():
    with pytest.raises(ValueError, match="arity"):
        add_indices((1, 0), (1, 0, 0))


@given(small_index, small_index)
def test_degree_additive(a, b):
    assert degree(add_indices(a, b)) == degree(a) + degree(b)


def test_enumeration_small_cases():
    order = enumerate_monomials(2, 1)
    assert order.indices == ((0, 0), (1, 0), (0, 1))
    assert len(enumerate_monomials(2, 2)) == 6
    assert enumerate_monomials(1, 4).indices == ((0,), (1,), (2,), (3,), (4,))


@pytest.mark.parametrize("n,N", [(1, 0), (1, 7), (2, 5), (3, 4), (4, 3)])
def test_enumeration_count(n, N):
    assert len(enumerate_monomials(n, N)) == math.comb(n + N, n)


@pytest.mark.parametrize("n,N", [(2, 5), (3, 4)])
def test_enumeration_is_graded_lex_and_bijective(n, N):
    order = enumerate_monomials(n, N)
    seen = set()
    previous_key = None
    for i, m in enumerate(order.indices):
        assert order.index_of(m) == i
        assert order.multi_index(i) == m
        key = (degree(m), tuple(-e for e in m))
        if previous_key is not None:
            assert key > previous_key
        previous_key = key
        seen.add(m)
    assert len(seen) == len(order)


def test_blocks_are_contiguous_degree_ranges():
    order = enumerate_monomials(2, 4)
    for k in range(5):
        block = order.block(k)
        degs = {degree(order.multi_index(i)) for i in range(block.start, block.stop)}
        assert degs == {k}
        assert block.stop - block.start == k + 1  # two variables
    assert order.upto(2).stop == order.block(2).stop


def test_enumeration_cached_and_stable():
    assert enumerate_monomials(2, 3) is enumerate_monomials(2, 3)


def test_shift_tables():
    order = enumerate_monomials(1, 3)
    src, dst, dropped = order.shift((1,))
    assert list(src) == [0, 1, 2]
    assert list(dst) == [1, 2, 3]
    assert list(dropped) == [3]
    with pytest.raises(ValueError, match="outside"):
        order.index_of((4,))
