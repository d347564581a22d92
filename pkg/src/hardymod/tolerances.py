"""Shared numeric tolerances for construction and verification."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle used by subspace construction and the property checkers.

    Construction tolerances (``rank``, ``orth``) sit roughly two orders of
    magnitude below the verification tolerances (``member``, ``clean``) so that
    verification never trips over legitimate rounding introduced while building
    bases.  Residuals above ``fail`` (times the local scale) are treated as
    genuine violations; residuals in the gap band ``(clean, fail]`` are
    reported as inconclusive rather than silently rounded either way.
    """

    rank: float = 1e-10       # relative rank cutoff (orthonormalization, SVD ranks)
    orth: float = 1e-9        # allowed off-orthonormality of constructed bases
    member: float = 1e-8      # membership residual, scaled by max(norm, 1)
    drop: float = 1e-13       # relative coefficient threshold for order computations
    part_drop: float = 1e-11  # relative part-norm threshold for order-from-components
    clean: float = 1e-9       # residuals <= clean*scale count as clean passes
    fail: float = 1e-6        # residuals > fail*scale are genuine violations
    # Optional knob: downgrade a pass to inconclusive when the skipped fraction
    # of enumerated triples exceeds this value.  Disabled by default; see the
    # checker docstrings for why skipped boundary triples do not erode a pass.
    skip_downgrade_fraction: float | None = None

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT = Tolerances()
