"""Degree-truncated vector-coefficient power series.

The coefficient model: an element is a finite table of coefficients in C^d
indexed by monomials of total degree <= N, with the l2 inner product in which
the monomial-times-unit-vector family is orthonormal.  The valuation
``order`` is the degree of the lowest nonzero term (infinity for the zero
element).  All values are immutable and every operation is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .grading import MonomialOrder, MultiIndex, degree, enumerate_monomials
from .tolerances import DEFAULT


class SpaceMismatchError(ValueError):
    """Operands live in different truncated spaces."""


@dataclass(frozen=True)
class Space:
    """Ambient truncated space: n variables, coefficient dimension d, degree cap N."""

    n: int
    d: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.d < 1 or self.N < 0:
            raise ValueError(f"invalid space parameters n={self.n} d={self.d} N={self.N}")

    @cached_property
    def monomials(self) -> MonomialOrder:
        return enumerate_monomials(self.n, self.N)

    @cached_property
    def degrees_flat(self) -> np.ndarray:
        """Degree of the monomial owning each flat coefficient slot."""
        degs = np.repeat(self.monomials.degrees, self.d)
        degs.setflags(write=False)
        return degs

    @property
    def num_monomials(self) -> int:
        return len(self.monomials)

    @property
    def flat_dim(self) -> int:
        return self.num_monomials * self.d

    def block_flat(self, k: int) -> slice:
        """Flat-coefficient slots of the degree-k block."""
        b = self.monomials.block(k)
        return slice(b.start * self.d, b.stop * self.d)

    def upto_flat(self, k: int) -> slice:
        b = self.monomials.upto(k)
        return slice(0, b.stop * self.d)


def _as_coeff_vector(space: Space, value) -> np.ndarray:
    vec = np.asarray(value, dtype=np.complex128)
    if vec.ndim == 0:
        if space.d != 1:
            raise ValueError("scalar coefficient given for a vector-valued space")
        vec = vec.reshape(1)
    if vec.shape != (space.d,):
        raise ValueError(f"coefficient vector has shape {vec.shape}, expected ({space.d},)")
    return vec


class Element:
    """Immutable element of a truncated space.

    Coefficients are stored densely as an (num_monomials, d) complex array in
    the canonical graded-lex order, which keeps degree blocks contiguous; the
    absent-means-zero coefficient table of the abstract model is recovered via
    :meth:`coeff` and :meth:`terms`.
    """

    __slots__ = ("space", "_coeffs", "_flat", "__weakref__")

    def __init__(self, space: Space, coeffs: np.ndarray, *, _copy: bool = True):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.shape != (space.num_monomials, space.d):
            raise ValueError(f"coefficient array has shape {arr.shape}, "
                             f"expected ({space.num_monomials}, {space.d})")
        if _copy:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "_coeffs", arr)
        object.__setattr__(self, "_flat", arr.reshape(-1))

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, space: Space) -> "Element":
        return cls(space, np.zeros((space.num_monomials, space.d)), _copy=False)

    @classmethod
    def from_terms(cls, space: Space, terms: Mapping[MultiIndex, object]) -> "Element":
        data = np.zeros((space.num_monomials, space.d), dtype=np.complex128)
        for m, value in terms.items():
            data[space.monomials.index_of(m)] += _as_coeff_vector(space, value)
        return cls(space, data, _copy=False)

    @classmethod
    def monomial(cls, space: Space, m: MultiIndex, channel: int = 0, value: complex = 1.0) -> "Element":
        data = np.zeros((space.num_monomials, space.d), dtype=np.complex128)
        data[space.monomials.index_of(m), channel] = value
        return cls(space, data, _copy=False)

    @classmethod
    def from_flat(cls, space: Space, flat: np.ndarray) -> "Element":
        return cls(space, np.asarray(flat, dtype=np.complex128).reshape(space.num_monomials, space.d))

    # -- coefficient access ------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def flat(self) -> np.ndarray:
        return self._flat

    def coeff(self, m: MultiIndex) -> np.ndarray:
        return self._coeffs[self.space.monomials.index_of(m)]

    def terms(self) -> Iterator[tuple[MultiIndex, np.ndarray]]:
        """Nonzero coefficient rows in graded-lex order."""
        for i in np.flatnonzero(np.any(self._coeffs != 0, axis=1)):
            yield self.space.monomials.multi_index(int(i)), self._coeffs[int(i)]

    # -- metric structure ----------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self._flat))

    @property
    def order(self) -> int | float:
        """Degree of the lowest nonzero term; infinity for the zero element.

        Coefficient rows below ``drop * norm`` are treated as absent so that
        numerically-zero cancellations do not fake a finite order.
        """
        total = np.linalg.norm(self._flat)
        if total == 0.0:
            return math.inf
        row_norms = np.linalg.norm(self._coeffs, axis=1)
        mask = row_norms > DEFAULT.drop * total
        if not mask.any():
            return math.inf
        return int(self.space.monomials.degrees[mask].min())

    @property
    def support_degree(self) -> int:
        """Highest degree carrying a (tolerated) nonzero coefficient; -1 if zero."""
        total = np.linalg.norm(self._flat)
        if total == 0.0:
            return -1
        row_norms = np.linalg.norm(self._coeffs, axis=1)
        mask = row_norms > DEFAULT.drop * total
        if not mask.any():
            return -1
        return int(self.space.monomials.degrees[mask].max())

    # -- linear structure ----------------------------------------------------

    def _require_same_space(self, other: "Element"):
        if self.space != other.space:
            raise SpaceMismatchError(f"space mismatch: {self.space} vs {other.space}")

    def __add__(self, other: "Element") -> "Element":
        self._require_same_space(other)
        return Element(self.space, self._coeffs + other._coeffs, _copy=False)

    def __sub__(self, other: "Element") -> "Element":
        self._require_same_space(other)
        return Element(self.space, self._coeffs - other._coeffs, _copy=False)

    def __neg__(self) -> "Element":
        return Element(self.space, -self._coeffs, _copy=False)

    def __mul__(self, scalar: complex) -> "Element":
        return Element(self.space, self._coeffs * complex(scalar), _copy=False)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        nterms = int(np.count_nonzero(np.any(self._coeffs != 0, axis=1)))
        return (f"Element(n={self.space.n}, d={self.space.d}, N={self.space.N}, "
                f"{nterms} terms, order={self.order})")


def inner(f: Element, g: Element) -> complex:
    """Coefficient inner product, linear in ``f`` and conjugate-linear in ``g``."""
    f._require_same_space(g)
    return complex(np.vdot(g._flat, f._flat))


def norm(f: Element) -> float:
    return f.norm()


def linear_combine(pairs: Iterable[tuple[complex, Element]]) -> Element:
    """Finite linear combination; all elements must share one space."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("linear_combine needs at least one (scalar, element) pair")
    space = pairs[0][1].space
    acc = np.zeros((space.num_monomials, space.d), dtype=np.complex128)
    for scalar, elem in pairs:
        pairs[0][1]._require_same_space(elem)
        acc += complex(scalar) * elem._coeffs
    return Element(space, acc, _copy=False)


class ProductResult(NamedTuple):
    element: Element
    exact: bool


def mul_poly(p, f: Element) -> ProductResult:
    """Multiply an element by a scalar polynomial, truncating past degree N.

    The ``exact`` flag is True iff no nonzero term was discarded; truncation
    is signalled, never raised.  For exact nonzero products the valuation is
    strict: order(p*f) = order(p) + order(f).
    """
    space = f.space
    if p.n != space.n:
        raise SpaceMismatchError(f"polynomial in {p.n} variables applied to n={space.n} space")
    order_table = space.monomials
    out = np.zeros_like(f._coeffs)
    exact = True
    src_nonzero = np.any(f._coeffs != 0, axis=1)
    for mu, c in p.items():
        if c == 0:
            continue
        if degree(mu) > space.N:
            if src_nonzero.any():
                exact = False
            continue
        src, dst, dropped = order_table.shift(mu)
        out[dst] += c * f._coeffs[src]
        if dropped.size and src_nonzero[dropped].any():
            exact = False
    return ProductResult(Element(space, out, _copy=False), exact)


def element_from_poly(space: Space, p, channel: int = 0) -> Element:
    """Embed a scalar polynomial of degree <= N along one coefficient channel."""
    data = np.zeros((space.num_monomials, space.d), dtype=np.complex128)
    for m, c in p.items():
        if degree(m) > space.N:
            raise ValueError(f"polynomial term {m} exceeds truncation degree {space.N}")
        data[space.monomials.index_of(m), channel] = c
    return Element(space, data, _copy=False)
