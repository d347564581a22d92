"""Multi-index arithmetic and the graded-lex monomial enumeration.

Every other module indexes coefficients through the bijection built here, so
the ordering is load-bearing: monomials are sorted by total degree first and
lexicographically within a degree (z1 before z2, so ``(1, 0)`` precedes
``(0, 1)``).  Degree blocks are therefore contiguous index ranges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator

import numpy as np

MultiIndex = tuple  # tuple[int, ...]; kept as plain tuples throughout


def degree(m: MultiIndex) -> int:
    """Total degree of a multi-index (sum of its entries)."""
    return sum(m)


def add_indices(m1: MultiIndex, m2: MultiIndex) -> MultiIndex:
    """Componentwise sum; the exponent of a monomial product."""
    if len(m1) != len(m2):
        raise ValueError(f"multi-index arity mismatch: {len(m1)} vs {len(m2)}")
    return tuple(a + b for a, b in zip(m1, m2))


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    # Yields compositions of `total` into `parts` slots in lex order with the
    # first variable dominant: (2,0), (1,1), (0,2).
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class MonomialOrder:
    """Bijection between multi-indices of degree <= max_degree and 0..size-1."""

    n: int
    max_degree: int
    indices: tuple[MultiIndex, ...]
    position: dict = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    block_starts: tuple[int, ...] = field(repr=False)  # len max_degree + 2
    _shift_cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.indices)

    def index_of(self, m: MultiIndex) -> int:
        try:
            return self.position[tuple(m)]
        except KeyError:
            raise ValueError(f"multi-index {m} outside enumeration "
                             f"(n={self.n}, max degree {self.max_degree})") from None

    def multi_index(self, i: int) -> MultiIndex:
        return self.indices[i]

    def block(self, k: int) -> slice:
        """Positions of the monomials of exact degree k."""
        if k < 0 or k > self.max_degree:
            return slice(len(self), len(self))
        return slice(self.block_starts[k], self.block_starts[k + 1])

    def upto(self, k: int) -> slice:
        """Positions of the monomials of degree <= k."""
        if k < 0:
            return slice(0, 0)
        k = min(k, self.max_degree)
        return slice(0, self.block_starts[k + 1])

    def shift(self, mu: MultiIndex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index tables for multiplication by z^mu.

        Returns ``(src, dst, dropped)``: positions such that coefficient
        ``src[i]`` lands at ``dst[i]``, and ``dropped`` lists the source
        positions pushed past the truncation degree.
        """
        mu = tuple(mu)
        cached = self._shift_cache.get(mu)
        if cached is not None:
            return cached
        if len(mu) != self.n:
            raise ValueError(f"multiplier arity {len(mu)} != {self.n}")
        src, dst, dropped = [], [], []
        shift_deg = degree(mu)
        for i, m in enumerate(self.indices):
            if self.degrees[i] + shift_deg <= self.max_degree:
                src.append(i)
                dst.append(self.position[add_indices(m, mu)])
            else:
                dropped.append(i)
        table = (np.asarray(src, dtype=np.intp),
                 np.asarray(dst, dtype=np.intp),
                 np.asarray(dropped, dtype=np.intp))
        self._shift_cache[mu] = table
        return table


@lru_cache(maxsize=None)
def enumerate_monomials(n: int, max_degree: int) -> MonomialOrder:
    """Canonical graded-lex enumeration of all monomials of degree <= max_degree.

    Deterministic and cached per (n, max_degree); the returned object is
    immutable apart from an internal shift-table cache and safe to share.
    """
    if n < 1:
        raise ValueError("need at least one variable")
    if max_degree < 0:
        raise ValueError("truncation degree must be nonnegative")
    indices: list[MultiIndex] = []
    block_starts = [0]
    for k in range(max_degree + 1):
        indices.extend(_compositions(k, n))
        block_starts.append(len(indices))
    assert len(indices) == comb(n + max_degree, n)
    position = {m: i for i, m in enumerate(indices)}
    degs = np.array([degree(m) for m in indices], dtype=np.int64)
    degs.setflags(write=False)
    return MonomialOrder(
        n=n,
        max_degree=max_degree,
        indices=tuple(indices),
        position=position,
        degrees=degs,
        block_starts=tuple(block_starts),
    )
