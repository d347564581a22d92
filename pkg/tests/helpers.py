"""Independent slow-path oracles used to cross-check production code.

Everything here works from raw coefficient dictionaries with hand-rolled
loops (plain Gaussian elimination, term-by-term convolution, dictionary inner
products) so that agreement with the vectorized production implementations is
meaningful evidence.
"""
from __future__ import annotations

import numpy as np

from hardymod import Element
from hardymod.grading import add_indices, degree


def slow_inner(f: Element, g: Element) -> complex:
    """Inner product summed term by term over coefficient dictionaries."""
    gf = dict((m, vec.copy()) for m, vec in g.terms())
    total = 0.0 + 0.0j
    for m, vec in f.terms():
        other = gf.get(m)
        if other is not None:
            total += sum(a * np.conj(b) for a, b in zip(vec, other))
    return complex(total)


def slow_monomial_multiply(mu, f: Element) -> Element:
    """Multiply by z^mu term by term, dropping terms past the cap."""
    space = f.space
    out: dict = {}
    for m, vec in f.terms():
        target = add_indices(m, mu)
        if degree(target) <= space.N:
            out[target] = out.get(target, 0) + vec
    return Element.from_terms(space, out) if out else Element.zero(space)


def rref_nullspace_dim(A: np.ndarray, tol: float = 1e-9) -> int:
    """Null-space dimension by explicit row reduction with partial pivoting."""
    A = np.array(A, dtype=np.complex128)
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        pivot = rank + int(np.argmax(np.abs(A[rank:, c])))
        if abs(A[pivot, c]) <= tol:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        A[rank] = A[rank] / A[rank, c]
        for r in range(rows):
            if r != rank:
                A[r] = A[r] - A[r, c] * A[rank]
        rank += 1
    return cols - rank


def slow_slice_dimension(vectors, k: int, tol: float = 1e-9) -> int:
    """Dimension of {f in span : order(f) >= k}, via row reduction.

    The constraint matrix sends a combination to its coefficients of degree
    below k; its null-space dimension is the slice dimension.
    """
    if not vectors:
        return 0
    space = vectors[0].space
    low = [i for i in range(space.num_monomials)
           if space.monomials.degrees[i] < k]
    if not low:
        return len(vectors)
    A = np.zeros((len(low) * space.d, len(vectors)), dtype=np.complex128)
    for j, v in enumerate(vectors):
        A[:, j] = v.coeffs[low].reshape(-1)
    return rref_nullspace_dim(A, tol)


def blaschke_by_division(a: complex, N: int) -> list[complex]:
    """Series of (a - z)/(1 - conj(a) z) by synthetic division.

    Writing B(z)(1 - conj(a) z) = a - z and matching coefficients gives
    b_0 = a, b_1 = conj(a) b_0 - 1, and b_k = conj(a) b_{k-1} afterwards.
    """
    abar = np.conj(a)
    coeffs = [complex(a)]
    coeffs.append(abar * coeffs[0] - 1)
    for _ in range(2, N + 1):
        coeffs.append(abar * coeffs[-1])
    return coeffs


def min_norm_feasible_point(V_vectors, rh: Element, kill_below: int):
    """Least-squares feasible point rh + g with coefficient blocks of degree
    < kill_below zeroed, built from scratch with numpy lstsq.

    Returns (point, feasibility_residual).
    """
    space = rh.space
    low = [i for i in range(space.num_monomials)
           if space.monomials.degrees[i] < kill_below]
    if not V_vectors:
        flat = rh.flat.copy()
        res = float(np.linalg.norm(flat.reshape(space.num_monomials, space.d)[low]))
        return rh, res
    A = np.zeros((len(low) * space.d, len(V_vectors)), dtype=np.complex128)
    for j, v in enumerate(V_vectors):
        A[:, j] = v.coeffs[low].reshape(-1)
    b = -rh.coeffs[low].reshape(-1)
    if len(low) == 0:
        return rh, 0.0
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = float(np.linalg.norm(A @ c - b))
    point = rh
    for coef, v in zip(c, V_vectors):
        point = point + complex(coef) * v
    return point, res
