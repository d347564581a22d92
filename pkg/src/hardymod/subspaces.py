"""Finite-dimensional subspace linear algebra over truncated spaces.

Orthonormal bases via modified Gram-Schmidt with one re-orthogonalization
pass, orthogonal projections, relative complements, graded slices (the
order->k part of a span, computed as an SVD null space), and closure of a
generator list under multiplication by monomials up to the degree budget.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .elements import Element, Space, mul_poly
from .grading import MultiIndex, degree
from .tolerances import DEFAULT, Tolerances
from .algebra import Poly


class ContainmentError(ValueError):
    """Relative complement requested for a subspace that is not contained."""


class SubspaceBasis:
    """Orthonormal basis of a finite-dimensional subspace.

    ``gram_residual`` records the worst observed off-orthonormality of the
    constructed vectors so tests can assert construction quality.
    """

    __slots__ = ("space", "vectors", "rank_tol", "gram_residual", "_matrix")

    def __init__(self, space: Space, vectors: Sequence[Element], rank_tol: float,
                 gram_residual: float | None = None):
        self.space = space
        self.vectors = tuple(vectors)
        self.rank_tol = rank_tol
        if self.vectors:
            mat = np.vstack([v.flat for v in self.vectors])
        else:
            mat = np.zeros((0, space.flat_dim), dtype=np.complex128)
        mat.setflags(write=False)
        self._matrix = mat
        if gram_residual is None:
            gram_residual = self._compute_gram_residual()
        self.gram_residual = gram_residual

    def _compute_gram_residual(self) -> float:
        if not self.vectors:
            return 0.0
        gram = self._matrix @ self._matrix.conj().T
        return float(np.abs(gram - np.eye(self.dim)).max())

    @classmethod
    def empty(cls, space: Space, rank_tol: float = DEFAULT.rank) -> "SubspaceBasis":
        return cls(space, (), rank_tol, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        """Row-per-vector matrix of flattened coefficients, shape (dim, flat_dim)."""
        return self._matrix

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.vectors)

    def __repr__(self) -> str:
        return (f"SubspaceBasis(dim={self.dim}, n={self.space.n}, d={self.space.d}, "
                f"N={self.space.N}, gram_residual={self.gram_residual:.2e})")


class MemberResult(NamedTuple):
    verdict: bool
    residual: float


def _mgs_rows(rows: Iterable[np.ndarray], rank_tol: float,
              seed_rows: np.ndarray | None = None) -> list[np.ndarray]:
    """Modified Gram-Schmidt with a second pass; returns accepted unit rows.

    ``seed_rows`` are treated as an already-orthonormal prefix to project
    against but are not returned.  A candidate is discarded when its residual
    norm falls at or below ``rank_tol`` times its original norm (zero-norm
    inputs are discarded outright).
    """
    accepted: list[np.ndarray] = []

    def orthogonalize(w: np.ndarray) -> np.ndarray:
        for _ in range(2):
            if seed_rows is not None and seed_rows.shape[0]:
                w = w - seed_rows.T @ (seed_rows.conj() @ w)
            for q in accepted:
                w = w - np.vdot(q, w) * q
        return w

    for row in rows:
        original = np.linalg.norm(row)
        if original == 0.0 or original <= rank_tol:
            continue
        w = orthogonalize(row.astype(np.complex128, copy=True))
        nw = np.linalg.norm(w)
        if nw <= rank_tol * original:
            continue
        accepted.append(w / nw)
    return accepted


def orthonormalize(vectors: Sequence[Element], rank_tol: float | None = None,
                   tolerances: Tolerances = DEFAULT,
                   space: Space | None = None) -> SubspaceBasis:
    """Rank-revealing orthonormalization of a vector list, order-stable.

    Parameters
    ----------
    vectors : sequence of Element
        Spanning set; dependent or negligible vectors are dropped.
    rank_tol : float, optional
        Relative discard threshold; defaults to ``tolerances.rank``.
    space : Space, optional
        Required only when ``vectors`` is empty.
    """
    if rank_tol is None:
        rank_tol = tolerances.rank
    if not vectors:
        if space is None:
            raise ValueError("empty vector list needs an explicit space")
        return SubspaceBasis.empty(space, rank_tol)
    space = vectors[0].space
    for v in vectors:
        vectors[0]._require_same_space(v)
    rows = _mgs_rows((v.flat for v in vectors), rank_tol)
    basis = [Element.from_flat(space, r) for r in rows]
    return SubspaceBasis(space, basis, rank_tol)


def project(S: SubspaceBasis, f: Element) -> Element:
    """Orthogonal projection of ``f`` onto the span of ``S``."""
    if f.space != S.space:
        raise ValueError("element and subspace live in different spaces")
    if S.dim == 0:
        return Element.zero(S.space)
    coeffs = S.matrix.conj() @ f.flat
    return Element.from_flat(S.space, S.matrix.T @ coeffs)


def member(S: SubspaceBasis, f: Element, tol: float | None = None,
           tolerances: Tolerances = DEFAULT) -> MemberResult:
    """Membership test; residual is the distance from ``f`` to the span."""
    if tol is None:
        tol = tolerances.member
    residual = (f - project(S, f)).norm()
    return MemberResult(residual <= tol * max(f.norm(), 1.0), residual)


def complement_within(A: SubspaceBasis, B: SubspaceBasis,
                      tolerances: Tolerances = DEFAULT) -> SubspaceBasis:
    """Orthogonal complement of A inside B (requires A contained in B).

    Computed from the SVD of B's basis with its A-components removed: the
    mathematics fixes the complement dimension at dim B - dim A, so exactly
    that many principal directions are taken.  An energetic direction beyond
    them means the containment precondition failed.  Sequential
    accept-or-reject orthogonalization is deliberately avoided here: residuals
    barely above a threshold would pollute the basis and miscount.
    """
    if A.space != B.space:
        raise ValueError("complement across different spaces")
    for i, a in enumerate(A.vectors):
        verdict, residual = member(B, a, tolerances=tolerances)
        if not verdict:
            raise ContainmentError(
                f"vector {i} of A is not inside B (residual {residual:.3e})")
    expected = B.dim - A.dim
    if expected <= 0 or B.dim == 0:
        return SubspaceBasis.empty(B.space, B.rank_tol)
    if A.dim == 0:
        return B

    def strip_A(rows: np.ndarray) -> np.ndarray:
        return rows - (rows @ A.matrix.conj().T) @ A.matrix

    R = strip_A(strip_A(B.matrix))
    _, s, wh = np.linalg.svd(R, full_matrices=False)
    if s.size > expected and s[expected] > tolerances.member * max(1.0, float(s[0])):
        raise ContainmentError(
            f"complement of dim-{A.dim} inside dim-{B.dim} span has energy "
            f"{s[expected]:.3e} beyond the expected {expected} directions; "
            "containment is numerically inconsistent")
    rows = strip_A(wh[:expected])
    kept = _mgs_rows(rows, B.rank_tol)
    if len(kept) != expected:
        raise ContainmentError(
            f"complement dimension {len(kept)} != dim B - dim A = {expected}")
    basis = [Element.from_flat(B.space, r) for r in kept]
    result = SubspaceBasis(B.space, basis, B.rank_tol)
    cross = float(np.abs(A.matrix.conj() @ result.matrix.T).max())
    return SubspaceBasis(B.space, basis, B.rank_tol,
                         gram_residual=max(result.gram_residual, cross))


def graded_slice(S: SubspaceBasis, k: int, tolerances: Tolerances = DEFAULT) -> SubspaceBasis:
    """The subspace of span S with order >= k.

    Computed as the null space of the map sending a combination to its
    coefficients of degree < k, via a dense SVD; the slice at k <= 0 is S
    itself and the slice past the truncation degree is zero-dimensional.
    Coefficients below degree k are then zeroed outright: members of the slice
    vanish there by definition, and the zeroing removes sub-tolerance residue
    that would otherwise leak into order computations downstream.
    """
    if k <= 0 or S.dim == 0:
        return S
    space = S.space
    low = space.upto_flat(k - 1)
    if low.stop == 0:
        return S
    A = S.matrix[:, low]          # (dim, L); combination x has low part A.T @ x
    _, s, vh = np.linalg.svd(A.T, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tolerances.rank * smax)) if smax > tolerances.rank else 0
    null = vh[rank:]              # rows are null-space coordinates (conjugated)
    if null.shape[0] == 0:
        return SubspaceBasis.empty(space, S.rank_tol)
    rows = null.conj() @ S.matrix
    rows[:, low] = 0.0
    kept = _mgs_rows(rows, S.rank_tol)
    if len(kept) != null.shape[0]:
        raise RuntimeError(f"graded slice basis degenerated: kept {len(kept)} "
                           f"of {null.shape[0]} directions")
    basis = [Element.from_flat(space, r) for r in kept]
    return SubspaceBasis(space, basis, S.rank_tol)


@dataclass(frozen=True)
class GeneratorProduct:
    generator: int
    multiplier: MultiIndex
    exact: bool
    retained: bool


@dataclass(frozen=True)
class ClosureResult:
    basis: SubspaceBasis
    exact: bool
    generator_log: tuple[GeneratorProduct, ...]


def module_closure(generators: Sequence[Element], space: Space,
                   tolerances: Tolerances = DEFAULT) -> ClosureResult:
    """Span of all monomial multiples (degree 0..N) of the generators.

    Products are truncated at the degree budget.  The closure is flagged
    ``exact`` when every retained (nonzero) product was computed without
    truncation; products that truncate to zero add nothing to the span and do
    not spoil exactness.  Multiplier monomials are enumerated in graded-lex
    order so the construction is deterministic.
    """
    for g in generators:
        if g.space != space:
            raise ValueError("generator outside the target space")
    products: list[Element] = []
    log: list[GeneratorProduct] = []
    closure_exact = True
    for mu in space.monomials.indices:
        for gi, g in enumerate(generators):
            prod, exact = mul_poly(Poly.monomial(space.n, mu), g)
            retained = prod.norm() > 0.0
            log.append(GeneratorProduct(gi, mu, exact, retained))
            if retained:
                products.append(prod)
                if not exact:
                    closure_exact = False
    basis = orthonormalize(products, tolerances=tolerances, space=space)
    return ClosureResult(basis=basis, exact=closure_exact, generator_log=tuple(log))
