"""Graded (near-homogeneous) decompositions of subspaces and elements.

A subspace V of the truncated space carries the decreasing valuation series
V = V_0 >= V_1 >= ... (V_k = members of order >= k) and the orthogonal
component ladder W_k = V_k minus V_{k+1}.  Every nonzero member of W_k has
order exactly k, the components are mutually orthogonal, and their dimensions
sum to dim V.  Elements of V decompose into their per-level projections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .elements import Element, Space, inner
from .subspaces import SubspaceBasis, complement_within, graded_slice, member, project
from .tolerances import DEFAULT, Tolerances


class NotAMemberError(ValueError):
    """Element fails the membership precondition for a subspace operation."""


@dataclass(frozen=True)
class GradedDecomposition:
    """Valuation series and near-homogeneous components of a subspace."""

    subspace: SubspaceBasis
    series: tuple[SubspaceBasis, ...]       # V_0 .. V_{N+1}; last is zero-dimensional
    components: tuple[SubspaceBasis, ...]   # W_0 .. W_N

    @property
    def space(self) -> Space:
        return self.subspace.space

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.components)

    def component(self, k: int) -> SubspaceBasis:
        return self.components[k]

    def series_at(self, k: int) -> SubspaceBasis:
        return self.series[k]

    @cached_property
    def component_rows(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stacked component basis rows with their (level, index) labels."""
        rows, levels, indices = [], [], []
        for k, w in enumerate(self.components):
            for i, v in enumerate(w.vectors):
                rows.append(v.flat)
                levels.append(k)
                indices.append(i)
        if rows:
            H = np.vstack(rows)
        else:
            H = np.zeros((0, self.space.flat_dim), dtype=np.complex128)
        H.setflags(write=False)
        return H, np.asarray(levels, dtype=np.int64), np.asarray(indices, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GradedDecomposition(dim={self.subspace.dim}, dims={self.dims})"


def decompose_subspace(V: SubspaceBasis, tolerances: Tolerances = DEFAULT) -> GradedDecomposition:
    """Compute the valuation series and component ladder of a subspace.

    The series is sliced directly out of V at each level; each component is
    the complement of the next slice inside the current one, which makes the
    pairwise orthogonality of components structural rather than incidental.
    """
    space = V.space
    series = [V]
    for k in range(1, space.N + 2):
        # slice the previous slice, not V: the nesting V_{k+1} inside V_k is
        # then structural, so the complement dimensions are always consistent
        series.append(graded_slice(series[-1], k, tolerances))
    if series[-1].dim != 0:
        raise RuntimeError("valuation series did not terminate at zero; "
                           "the truncated model admits no order beyond N")
    components = [complement_within(series[k + 1], series[k], tolerances)
                  for k in range(space.N + 1)]
    return GradedDecomposition(subspace=V, series=tuple(series), components=tuple(components))


@dataclass(frozen=True)
class ElementDecomposition:
    element: Element
    parts: tuple[Element, ...]
    reconstruction_residual: float

    def part_norms(self) -> tuple[float, ...]:
        return tuple(p.norm() for p in self.parts)


def decompose_element(D: GradedDecomposition, h: Element,
                      tolerances: Tolerances = DEFAULT) -> ElementDecomposition:
    """Split a member of V into its per-level components.

    Raises :class:`NotAMemberError` when ``h`` is not in V at the membership
    tolerance.  The parts are mutually orthogonal, part k lies in W_k, and
    they reconstruct ``h`` up to the recorded residual.
    """
    verdict, residual = member(D.subspace, h, tolerances=tolerances)
    if not verdict:
        raise NotAMemberError(f"element is not a member of V (residual {residual:.3e})")
    parts = tuple(project(w, h) for w in D.components)
    acc = Element.zero(D.space)
    for p in parts:
        acc = acc + p
    return ElementDecomposition(element=h, parts=parts,
                                reconstruction_residual=(h - acc).norm())


def order_from_components(D: GradedDecomposition, h: Element,
                          tolerances: Tolerances = DEFAULT) -> int | float:
    """Order of a member read off its decomposition: first non-vanishing level.

    Must agree exactly with the coefficient-level order; parts below
    ``part_drop`` times the norm of ``h`` count as vanished.
    """
    dec = decompose_element(D, h, tolerances)
    scale = h.norm()
    if scale == 0.0:
        return math.inf
    for k, p in enumerate(dec.parts):
        if p.norm() > tolerances.part_drop * scale:
            return k
    return math.inf


@dataclass(frozen=True)
class LeadingBlockAnalysis:
    """Diagnostics for the degree-m coefficient block map restricted to W.

    For a near-homogeneous subspace of common order m this map is injective;
    its smallest singular value quantifies the conditioning that the abstract
    theory leaves open.
    """

    constant_order: bool
    injective: bool
    smallest_singular_value: float


def analyze_leading_block(W: SubspaceBasis, level: int,
                          tolerances: Tolerances = DEFAULT,
                          combination_samples: int = 8,
                          seed: int = 0) -> LeadingBlockAnalysis:
    """Check constant order on W and the injectivity of its level-block map."""
    space = W.space
    if W.dim == 0:
        return LeadingBlockAnalysis(True, True, math.inf)
    constant = all(v.order == level for v in W.vectors)
    if constant and W.dim > 1:
        rng = np.random.default_rng(seed)
        for _ in range(combination_samples):
            x = rng.standard_normal(W.dim) + 1j * rng.standard_normal(W.dim)
            combo = Element.from_flat(space, W.matrix.T @ x)
            if combo.norm() > 0 and combo.order != level:
                constant = False
                break
    block = W.matrix[:, space.block_flat(level)]
    if W.dim > block.shape[1]:
        sigma_min = 0.0
    else:
        s = np.linalg.svd(block, compute_uv=False)
        sigma_min = float(s[W.dim - 1]) if s.size >= W.dim else 0.0
    return LeadingBlockAnalysis(constant_order=constant,
                                injective=sigma_min > tolerances.rank,
                                smallest_singular_value=sigma_min)
