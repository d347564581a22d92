"""Property checkers: near-inner, weakly near-inner, full projection, invariance.

Each checker enumerates triples (multiplier monomial r, component vector h,
level m), evaluates a numeric residual for the triple, and classifies it:

* residual > fail * scale        -> genuine violation (witness, verdict fail)
* residual in (clean, fail]      -> ambiguous band (verdict inconclusive)
* residual <= clean * scale      -> clean

Truncation accounting.  A product r*h that lost terms past the degree cap is
still evaluated: on the stored coefficients, inner products against stored
vectors and low-degree feasibility constraints are unaffected by the missing
tail, so a large residual is a genuine violation of the stored model
(truncation can hide mass, never create it).  A *clean* result on such a
product is weaker evidence, so clean boundary items are tallied in
``boundary_skips`` where the operation's contract calls for it.  Scenarios
that truncate an infinite object declare a ``boundary_level``: levels above
it reflect the cut generator ladder rather than the object itself, and all
triples there are skipped outright.

The multiplier quantifier is reduced to monomials z^mu with 1 <= |mu| <= N;
for the strict polynomial valuation the order of a combination is controlled
by its monomial parts, and ``extra_dense_r`` optionally adds seeded dense
multipliers as a safety net.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Poly
from .decomposition import GradedDecomposition
from .elements import Element
from .subspaces import SubspaceBasis
from .tolerances import DEFAULT, Tolerances

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

_R_REDUCTION_NOTE = ("multiplier quantifier reduced to monomials z^mu, 1 <= |mu| <= N; "
                     "valid because the polynomial valuation is strict")
_DEGREE_ONE_NOTE = ("coordinate monomials generate all positive-order multipliers "
                    "under the strict valuation, so degree-1 checks suffice")


@dataclass(frozen=True)
class Witness:
    kind: str
    r: object            # exponent tuple for monomials, string for dense multipliers
    k: int | None
    h_index: int | None
    m: int | None
    magnitude: float
    exact: bool
    detail: str = ""

    def sort_key(self):
        return (self.k if self.k is not None else -1,
                self.m if self.m is not None else -1,
                str(self.r),
                self.h_index if self.h_index is not None else -1,
                self.kind)

    def to_dict(self) -> dict:
        r = list(self.r) if isinstance(self.r, tuple) else self.r
        return {"kind": self.kind, "r": r, "k": self.k, "h_index": self.h_index,
                "m": self.m, "magnitude": self.magnitude, "exact": self.exact,
                "detail": self.detail}


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    verdict: str
    witnesses: tuple[Witness, ...]
    band: tuple[Witness, ...]
    checked: int
    vacuous: int
    boundary_skips: int
    inexact_evaluated: int
    tolerances: Tolerances
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def max_witness_magnitude(self) -> float:
        return max((w.magnitude for w in self.witnesses), default=0.0)

    def to_dict(self, witness_cap: int | None = None) -> dict:
        wits = list(self.witnesses)
        truncated = False
        if witness_cap is not None and len(wits) > witness_cap:
            wits = wits[:witness_cap]
            truncated = True
        return {
            "property": self.property_id,
            "verdict": self.verdict,
            "witness_count": len(self.witnesses),
            "witnesses": [w.to_dict() for w in wits],
            "witnesses_truncated": truncated,
            "band_count": len(self.band),
            "band": [w.to_dict() for w in self.band[:16]],
            "checked": self.checked,
            "vacuous": self.vacuous,
            "boundary_skips": self.boundary_skips,
            "inexact_evaluated": self.inexact_evaluated,
            "notes": list(self.notes),
        }


def _finalize(property_id: str, witnesses: list[Witness], band: list[Witness],
              checked: int, vacuous: int, skips: int, inexact: int,
              tol: Tolerances, notes: Sequence[str]) -> PropertyReport:
    if witnesses:
        verdict = FAIL
    elif band:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    frac = tol.skip_downgrade_fraction
    if verdict == PASS and frac is not None:
        total = checked + skips
        if total and skips > frac * total:
            verdict = INCONCLUSIVE
    return PropertyReport(
        property_id=property_id,
        verdict=verdict,
        witnesses=tuple(sorted(witnesses, key=Witness.sort_key)),
        band=tuple(sorted(band, key=Witness.sort_key)),
        checked=checked,
        vacuous=vacuous,
        boundary_skips=skips,
        inexact_evaluated=inexact,
        tolerances=tol,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Product table: every multiplier applied to every component basis vector
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProductTable:
    """All products r*h for component basis vectors h, computed once.

    Rows of ``products`` hold the flattened truncated product for multiplier
    ``r_labels[r_index[row]]`` applied to the component vector labelled by
    ``(levels[row], indices[row])``.
    """

    decomposition: GradedDecomposition
    r_labels: tuple
    products: np.ndarray      # (P, flat_dim)
    r_index: np.ndarray       # (P,)
    levels: np.ndarray        # (P,) component level of h
    indices: np.ndarray       # (P,) basis index of h inside its component
    inexact: np.ndarray       # (P,) bool: product lost nonzero terms
    norms: np.ndarray         # (P,)
    orders: np.ndarray        # (P,) float, inf for vanished products


def _shift_rows(space, H: np.ndarray, mu) -> tuple[np.ndarray, np.ndarray]:
    src, dst, dropped = space.monomials.shift(mu)
    P = H.shape[0]
    M, d = space.num_monomials, space.d
    Hm = H.reshape(P, M, d)
    out = np.zeros_like(Hm)
    out[:, dst, :] = Hm[:, src, :]
    if dropped.size:
        inexact = (np.abs(Hm[:, dropped, :]).max(axis=(1, 2)) > 0.0)
    else:
        inexact = np.zeros(P, dtype=bool)
    return out.reshape(P, M * d), inexact


def _row_orders(space, rows: np.ndarray, norms: np.ndarray, drop: float) -> np.ndarray:
    P = rows.shape[0]
    M, d = space.num_monomials, space.d
    mono = np.linalg.norm(rows.reshape(P, M, d), axis=2)
    present = mono > drop * norms[:, None]
    degs = np.broadcast_to(space.monomials.degrees, (P, M)).astype(float)
    masked = np.where(present, degs, np.inf)
    return masked.min(axis=1)


def product_table(D: GradedDecomposition, tolerances: Tolerances = DEFAULT,
                  max_r_degree: int | None = None,
                  extra_dense_r: int = 0, dense_r_seed: int = 0) -> ProductTable:
    """Build the shared (multiplier x component-vector) product table."""
    space = D.space
    cap = space.N if max_r_degree is None else min(max_r_degree, space.N)
    H, levels, indices = D.component_rows
    mons = space.monomials
    r_labels: list = [mons.multi_index(i) for i in range(len(mons))
                      if 1 <= mons.degrees[i] <= cap]
    blocks, flags = [], []
    for mu in r_labels:
        rows, inexact = _shift_rows(space, H, mu)
        blocks.append(rows)
        flags.append(inexact)
    if extra_dense_r:
        rng = np.random.default_rng(dense_r_seed)
        for _ in range(extra_dense_r):
            terms = {}
            for _ in range(int(rng.integers(2, 5))):
                deg = int(rng.integers(1, max(2, cap)))
                m = tuple(int(e) for e in rng.multinomial(deg, [1 / space.n] * space.n))
                terms[m] = complex(rng.standard_normal(), rng.standard_normal())
            r = Poly(space.n, terms)
            if r.is_zero():
                continue
            rows = np.zeros_like(H)
            inexact = np.zeros(H.shape[0], dtype=bool)
            for m, c in r.items():
                shifted, flag = _shift_rows(space, H, m)
                rows = rows + c * shifted
                inexact |= flag
            r_labels.append(r.to_string())
            blocks.append(rows)
            flags.append(inexact)
    count = len(r_labels)
    if count and H.shape[0]:
        products = np.vstack(blocks)
        inexact = np.concatenate(flags)
        r_index = np.repeat(np.arange(count), H.shape[0])
        lv = np.tile(levels, count)
        ix = np.tile(indices, count)
    else:
        products = np.zeros((0, space.flat_dim), dtype=np.complex128)
        inexact = np.zeros(0, dtype=bool)
        r_index = np.zeros(0, dtype=np.int64)
        lv = np.zeros(0, dtype=np.int64)
        ix = np.zeros(0, dtype=np.int64)
    norms = np.linalg.norm(products, axis=1)
    orders = _row_orders(space, products, np.maximum(norms, 1e-300), tolerances.drop)
    return ProductTable(decomposition=D, r_labels=tuple(r_labels), products=products,
                        r_index=r_index, levels=lv, indices=ix, inexact=inexact,
                        norms=norms, orders=orders)


@dataclass(frozen=True, eq=False)
class _LowBlockSolver:
    """Min-norm least squares for the low-degree coefficient constraints."""

    cols: slice
    U: np.ndarray        # (L, r)
    s: np.ndarray        # (r,)
    Vh: np.ndarray       # (r, Dv)

    @classmethod
    def build(cls, Vmat: np.ndarray, cols: slice, rank_tol: float) -> "_LowBlockSolver":
        A = Vmat[:, cols].T          # (L, Dv): low part of V.T @ x is A @ x
        if min(A.shape) == 0:
            q = 0
            return cls(cols, np.zeros((A.shape[0], 0)), np.zeros(0), np.zeros((0, A.shape[1])))
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
        rank = int(np.sum(s > rank_tol * s[0])) if s.size else 0
        return cls(cols, U[:, :rank], s[:rank], Vh[:rank])

    def solve(self, RH: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """For each row rh: min-norm x with low(V.T x) = -low(rh).

        Returns (X, feas) where X has one column per row of RH and feas is the
        least-squares residual norm (0 means exactly feasible).
        """
        B = RH[:, self.cols].T                     # (L, P)
        if self.s.size == 0:
            feas = np.linalg.norm(B, axis=0) if B.shape[0] else np.zeros(RH.shape[0])
            return np.zeros((self.Vh.shape[1], RH.shape[0]), dtype=np.complex128), feas
        C = self.U.conj().T @ B                    # (r, P)
        resid = B - self.U @ C
        feas = np.linalg.norm(resid, axis=0)
        X = -(self.Vh.conj().T @ (C / self.s[:, None]))
        return X, feas


def _component_matrices(D: GradedDecomposition) -> list[np.ndarray]:
    return [w.matrix for w in D.components]


def _direction_orthogonality(D: GradedDecomposition) -> list[float]:
    """max |<w, v>| between W_m and the next slice V_{m+1}, per level."""
    out = []
    for m, w in enumerate(D.components):
        nxt = D.series_at(m + 1)
        if w.dim and nxt.dim:
            out.append(float(np.abs(w.matrix.conj() @ nxt.matrix.T).max()))
        else:
            out.append(0.0)
    return out


def _resolve_boundary(D: GradedDecomposition, boundary_level: int | None) -> int:
    return D.space.N if boundary_level is None else min(boundary_level, D.space.N)


def is_near_inner_decomposition(D: GradedDecomposition, tolerances: Tolerances = DEFAULT,
                                boundary_level: int | None = None,
                                max_r_degree: int | None = None,
                                extra_dense_r: int = 0, dense_r_seed: int = 0,
                                _table: ProductTable | None = None) -> PropertyReport:
    """Near-inner check for the graded decomposition of V.

    For each triple (r, h in W_k, m) the admissible set {r h + g : g in V,
    order > m} is the affine set (r h + V) with the degree <= m coefficient
    blocks zeroed; the quantifier over g is eliminated exactly by solving for
    one least-squares feasible point p and checking p against W_m together
    with the direction space V_{m+1} (orthogonal to W_m by construction).
    Infeasible triples are vacuously satisfied.
    """
    space = D.space
    tol = tolerances
    bl = _resolve_boundary(D, boundary_level)
    table = _table or product_table(D, tol, max_r_degree, extra_dense_r, dense_r_seed)
    Vmat = D.subspace.matrix
    comp = _component_matrices(D)
    witnesses: list[Witness] = []
    band: list[Witness] = []
    checked = vacuous = skips = inexact_used = 0

    P = table.products.shape[0]
    scale = np.maximum(table.norms, 1.0)
    for m in range(space.N + 1):
        if m > bl:
            skips += P
            continue
        solver = _LowBlockSolver.build(Vmat, space.upto_flat(m), tol.rank)
        X, feas = solver.solve(table.products)
        feasible = feas <= tol.member * scale
        vacuous += int((~feasible).sum())
        pts = table.products.T + Vmat.T @ X          # (F, P)
        if comp[m].shape[0]:
            mags = np.linalg.norm(comp[m].conj() @ pts, axis=0)
        else:
            mags = np.zeros(P)
        checked += int(feasible.sum())
        inexact_used += int((feasible & table.inexact).sum())
        fail_mask = feasible & (mags > tol.fail * scale)
        band_mask = feasible & ~fail_mask & (mags > tol.clean * scale)
        for j in np.flatnonzero(fail_mask):
            witnesses.append(Witness("orthogonality", table.r_labels[table.r_index[j]],
                                     int(table.levels[j]), int(table.indices[j]), m,
                                     float(mags[j]), not bool(table.inexact[j]),
                                     "projection of the feasible point onto W_m"))
        for j in np.flatnonzero(band_mask):
            band.append(Witness("orthogonality", table.r_labels[table.r_index[j]],
                                int(table.levels[j]), int(table.indices[j]), m,
                                float(mags[j]), not bool(table.inexact[j])))

    for m, cross in enumerate(_direction_orthogonality(D)):
        if m > bl:
            continue
        if cross > tol.fail:
            witnesses.append(Witness("direction-orthogonality", None, None, None, m,
                                     cross, True, "V_{m+1} not orthogonal to W_m"))
        elif cross > tol.clean:
            band.append(Witness("direction-orthogonality", None, None, None, m, cross, True))

    return _finalize("near-inner", witnesses, band, checked, vacuous, skips,
                     inexact_used, tol, (_R_REDUCTION_NOTE,))


def has_full_projection(D: GradedDecomposition, tolerances: Tolerances = DEFAULT,
                        boundary_level: int | None = None,
                        max_r_degree: int | None = None,
                        extra_dense_r: int = 0, dense_r_seed: int = 0,
                        _table: ProductTable | None = None) -> PropertyReport:
    """Full projection check: degree-m blocks of admissible points stay in P_m(W_m).

    The admissible set for (r, h, m) zeroes the blocks strictly below m; one
    least-squares representative suffices because feasible points differ by
    members of V_m and P_m(V_m) = P_m(W_m).
    """
    space = D.space
    tol = tolerances
    bl = _resolve_boundary(D, boundary_level)
    table = _table or product_table(D, tol, max_r_degree, extra_dense_r, dense_r_seed)
    Vmat = D.subspace.matrix
    comp = _component_matrices(D)
    witnesses: list[Witness] = []
    band: list[Witness] = []
    checked = vacuous = skips = inexact_used = 0

    P = table.products.shape[0]
    scale = np.maximum(table.norms, 1.0)
    for m in range(space.N + 1):
        if m > bl:
            skips += P
            continue
        block = space.block_flat(m)
        solver = _LowBlockSolver.build(Vmat, space.upto_flat(m - 1), tol.rank)
        X, feas = solver.solve(table.products)
        feasible = feas <= tol.member * scale
        vacuous += int((~feasible).sum())
        pts = table.products.T + Vmat.T @ X
        PB = pts[block, :]                            # (Bd, P)
        wm_block = comp[m][:, block]                  # (w, Bd)
        if wm_block.shape[0]:
            U, s, Vh = np.linalg.svd(wm_block, full_matrices=False)
            rank = int(np.sum(s > tol.rank * s[0])) if s.size else 0
            Q = Vh[:rank]                             # ON rows spanning P_m(W_m)
            resid = PB - Q.T @ (Q.conj() @ PB)
        else:
            resid = PB
        mags = np.linalg.norm(resid, axis=0)
        checked += int(feasible.sum())
        inexact_used += int((feasible & table.inexact).sum())
        fail_mask = feasible & (mags > tol.fail * scale)
        band_mask = feasible & ~fail_mask & (mags > tol.clean * scale)
        for j in np.flatnonzero(fail_mask):
            witnesses.append(Witness("projection", table.r_labels[table.r_index[j]],
                                     int(table.levels[j]), int(table.indices[j]), m,
                                     float(mags[j]), not bool(table.inexact[j]),
                                     "degree-m block escapes P_m(W_m)"))
        for j in np.flatnonzero(band_mask):
            band.append(Witness("projection", table.r_labels[table.r_index[j]],
                                int(table.levels[j]), int(table.indices[j]), m,
                                float(mags[j]), not bool(table.inexact[j])))

    return _finalize("full-projection", witnesses, band, checked, vacuous, skips,
                     inexact_used, tol, (_R_REDUCTION_NOTE,))


def is_weakly_near_inner(D: GradedDecomposition, tolerances: Tolerances = DEFAULT,
                         boundary_level: int | None = None,
                         max_r_degree: int | None = None,
                         _table: ProductTable | None = None) -> PropertyReport:
    """Weak form (g = 0): whenever order(r h) > m, r h must be orthogonal to W_m.

    Only exactly-computed products provide evidence here; truncated ones are
    tallied as boundary skips.
    """
    space = D.space
    tol = tolerances
    bl = _resolve_boundary(D, boundary_level)
    table = _table or product_table(D, tol, max_r_degree)
    comp = _component_matrices(D)
    witnesses: list[Witness] = []
    band: list[Witness] = []
    checked = skips = 0

    scale = np.maximum(table.norms, 1.0)
    exact = ~table.inexact
    for m in range(space.N + 1):
        applicable = table.orders > m
        if m > bl:
            skips += int(applicable.sum())
            continue
        skips += int((applicable & ~exact).sum())
        use = np.flatnonzero(applicable & exact)
        if use.size == 0:
            continue
        if comp[m].shape[0]:
            mags = np.linalg.norm(comp[m].conj() @ table.products[use].T, axis=0)
        else:
            mags = np.zeros(use.size)
        checked += use.size
        for idx, j in enumerate(use):
            mag = float(mags[idx])
            if mag > tol.fail * scale[j]:
                witnesses.append(Witness("orthogonality", table.r_labels[table.r_index[j]],
                                         int(table.levels[j]), int(table.indices[j]), m,
                                         mag, True, "r h not orthogonal to W_m"))
            elif mag > tol.clean * scale[j]:
                band.append(Witness("orthogonality", table.r_labels[table.r_index[j]],
                                    int(table.levels[j]), int(table.indices[j]), m, mag, True))

    return _finalize("weak-near-inner", witnesses, band, checked, 0, skips, 0,
                     tol, (_R_REDUCTION_NOTE,))


def is_near_inner_subspace(W: SubspaceBasis, tolerances: Tolerances = DEFAULT,
                           max_r_degree: int | None = None) -> PropertyReport:
    """Single-subspace near-inner check: W orthogonal to z^mu W for |mu| >= 1.

    Products that truncate are skipped (boundary accounting), matching the
    behaviour expected for inner-function spans whose tails exceed the cap.
    """
    space = W.space
    tol = tolerances
    cap = space.N if max_r_degree is None else min(max_r_degree, space.N)
    mons = space.monomials
    witnesses: list[Witness] = []
    band: list[Witness] = []
    checked = skips = 0
    if W.dim:
        for pos in range(len(mons)):
            if not 1 <= mons.degrees[pos] <= cap:
                continue
            mu = mons.multi_index(pos)
            rows, inexact = _shift_rows(space, W.matrix, mu)
            norms = np.linalg.norm(rows, axis=1)
            mags = np.linalg.norm(W.matrix.conj() @ rows.T, axis=0)
            for i in range(W.dim):
                if inexact[i]:
                    skips += 1
                    continue
                checked += 1
                scale = max(float(norms[i]), 1.0)
                mag = float(mags[i])
                if mag > tol.fail * scale:
                    witnesses.append(Witness("orthogonality", mu, None, i, None, mag, True,
                                             "z^mu w not orthogonal to W"))
                elif mag > tol.clean * scale:
                    band.append(Witness("orthogonality", mu, None, i, None, mag, True))

    return _finalize("near-inner-subspace", witnesses, band, checked, 0, skips, 0,
                     tol, (_R_REDUCTION_NOTE,))


def _support_degrees(space, rows: np.ndarray, drop: float) -> np.ndarray:
    P = rows.shape[0]
    M, d = space.num_monomials, space.d
    mono = np.linalg.norm(rows.reshape(P, M, d), axis=2)
    norms = np.maximum(np.linalg.norm(rows, axis=1), 1e-300)
    present = mono > drop * norms[:, None]
    degs = np.broadcast_to(space.monomials.degrees, (P, M)).astype(float)
    masked = np.where(present, degs, -1.0)
    return masked.max(axis=1)


def is_invariant(V: SubspaceBasis, tolerances: Tolerances = DEFAULT) -> PropertyReport:
    """Invariance of V under the coordinate multipliers z_1 .. z_n.

    Basis vectors whose support touches the truncation degree cannot certify
    invariance (their products lose mass), so clean results there count as
    boundary skips; membership failures count everywhere, because a truncated
    product that already escapes V only escapes harder with its tail restored.
    """
    space = V.space
    tol = tolerances
    witnesses: list[Witness] = []
    band: list[Witness] = []
    checked = skips = inexact_used = 0
    if V.dim:
        Vmat = V.matrix
        support = _support_degrees(space, Vmat, tol.drop)
        trusted = support <= space.N - 1
        for j in range(1, space.n + 1):
            mu = tuple(1 if t == j - 1 else 0 for t in range(space.n))
            rows, _ = _shift_rows(space, Vmat, mu)
            C = Vmat.conj() @ rows.T
            resid = rows.T - Vmat.T @ C
            mags = np.linalg.norm(resid, axis=0)
            norms = np.linalg.norm(rows, axis=1)
            for i in range(V.dim):
                scale = max(float(norms[i]), 1.0)
                mag = float(mags[i])
                if mag > tol.fail * scale:
                    witnesses.append(Witness("membership", mu, None, i, None, mag,
                                             bool(trusted[i]),
                                             "z_j v escapes V"))
                    if not trusted[i]:
                        inexact_used += 1
                elif not trusted[i]:
                    skips += 1
                elif mag > tol.clean * scale:
                    band.append(Witness("membership", mu, None, i, None, mag, True))
                    checked += 1
                else:
                    checked += 1

    return _finalize("invariant", witnesses, band, checked, 0, skips, inexact_used,
                     tol, (_DEGREE_ONE_NOTE,))
