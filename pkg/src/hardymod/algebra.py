"""The acting algebra of scalar polynomials and its valuation, plus an axiom harness.

Polynomials carry no degree cap; products and sums are exact dictionary
convolutions, so the valuation here is strict in integer arithmetic.  The
harness at the bottom samples the algebra and module axioms on seeded data
and reports violations instead of raising.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .elements import Element, Space, mul_poly
from .grading import MultiIndex, add_indices, degree


class PolyParseError(ValueError):
    """Malformed polynomial literal."""


class Poly:
    """Scalar polynomial in n variables, stored sparsely, immutable."""

    __slots__ = ("n", "_coeffs")

    def __init__(self, n: int, coeffs: Mapping[MultiIndex, complex] | None = None):
        if n < 1:
            raise ValueError("need at least one variable")
        table: dict[MultiIndex, complex] = {}
        for m, c in (coeffs or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != n:
                raise ValueError(f"exponent arity {len(m)} != {n}")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = complex(c)
            if c != 0:
                table[m] = table.get(m, 0) + c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_coeffs", {m: c for m, c in table.items() if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n, {})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls(n, {(0,) * n: 1.0})

    @classmethod
    def variable(cls, n: int, j: int) -> "Poly":
        """The coordinate polynomial z_j, with j counted from 1."""
        if not 1 <= j <= n:
            raise ValueError(f"variable index {j} out of range(1, {n})")
        m = [0] * n
        m[j - 1] = 1
        return cls(n, {tuple(m): 1.0})

    @classmethod
    def monomial(cls, n: int, m: MultiIndex, c: complex = 1.0) -> "Poly":
        return cls(n, {tuple(m): c})

    # -- coefficient access ------------------------------------------------

    def items(self) -> Iterator[tuple[MultiIndex, complex]]:
        return iter(self._coeffs.items())

    def coeff(self, m: MultiIndex) -> complex:
        return self._coeffs.get(tuple(m), 0.0)

    def terms_sorted(self) -> list[tuple[MultiIndex, complex]]:
        return sorted(self._coeffs.items(), key=lambda t: (degree(t[0]), tuple(-e for e in t[0])))

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def order(self) -> int | float:
        """Degree of the lowest term; infinity iff the polynomial is zero."""
        if not self._coeffs:
            return math.inf
        return min(degree(m) for m in self._coeffs)

    @property
    def support_degree(self) -> int:
        """Highest term degree; -1 for the zero polynomial."""
        if not self._coeffs:
            return -1
        return max(degree(m) for m in self._coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _require_same_arity(self, other: "Poly"):
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "Poly") -> "Poly":
        self._require_same_arity(other)
        table = dict(self._coeffs)
        for m, c in other._coeffs.items():
            table[m] = table.get(m, 0) + c
        return Poly(self.n, table)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.n, {m: -c for m, c in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._require_same_arity(other)
            table: dict[MultiIndex, complex] = {}
            for m1, c1 in self._coeffs.items():
                for m2, c2 in other._coeffs.items():
                    m = add_indices(m1, m2)
                    table[m] = table.get(m, 0) + c1 * c2
            return Poly(self.n, table)
        return Poly(self.n, {m: complex(other) * c for m, c in self._coeffs.items()})

    def __rmul__(self, scalar) -> "Poly":
        return self * scalar

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly.one(self.n)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.n == other.n and self._coeffs == other._coeffs

    __hash__ = None  # mutable-dict backed; unhashable by design

    def __repr__(self) -> str:
        return f"Poly({self.to_string()!r}, n={self.n})"

    def to_string(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for m, c in self.terms_sorted():
            factors = [f"z{j + 1}" + (f"^{e}" if e > 1 else "")
                       for j, e in enumerate(m) if e > 0]
            if c == 1 and factors:
                coeff = ""
            elif c.imag == 0:
                coeff = repr(c.real)
            else:
                lit = repr(c)
                coeff = lit if lit.startswith("(") else f"({lit})"
            term = "*".join(([coeff] if coeff else []) + factors) or repr(c.real)
            parts.append(term)
        return " + ".join(parts)


def poly_ord(p: Poly) -> int | float:
    return p.order


def unital_split(p: Poly) -> tuple[complex, Poly]:
    """Write p as lambda*1 + r with order(r) >= 1; lambda is the constant term."""
    lam = p.coeff((0,) * p.n)
    rest = Poly(p.n, {m: c for m, c in p.items() if degree(m) >= 1})
    return lam, rest


_TOKEN = re.compile(r"""\s*(?:
      (?P<complexlit>\([^()]*\))
    | (?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?j?|\.\d+(?:[eE][+-]?\d+)?j?)
    | (?P<var>z\d*)
    | (?P<op>[-+*^])
)""", re.VERBOSE)


def parse_poly(text: str, n: int) -> Poly:
    """Parse a polynomial literal like ``"z1^2*z2 + 0.5*z1 - (1+2j)"``.

    Bare ``z`` is accepted for the single-variable case.  Complex coefficients
    go in parentheses; ``*`` separates factors, ``^`` raises a variable to an
    integer power.
    """
    pos = 0
    tokens: list[tuple[str, str]] = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise PolyParseError(f"unexpected character at offset {pos}: {text[pos:]!r}")
        pos = m.end()
        for kind in ("complexlit", "number", "var", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break

    result = Poly.zero(n)
    i = 0

    def parse_factor(i: int) -> tuple[Poly, int]:
        kind, value = tokens[i]
        if kind == "complexlit":
            try:
                c = complex(value.strip("()").replace(" ", ""))
            except ValueError:
                raise PolyParseError(f"bad complex literal {value!r}") from None
            return Poly(n, {(0,) * n: c}), i + 1
        if kind == "number":
            return Poly(n, {(0,) * n: complex(value)}), i + 1
        if kind == "var":
            j = int(value[1:]) if len(value) > 1 else 1
            if len(value) == 1 and n != 1:
                raise PolyParseError("bare 'z' is only valid with one variable")
            if not 1 <= j <= n:
                raise PolyParseError(f"variable {value} out of range for n={n}")
            power = 1
            if i + 2 < len(tokens) and tokens[i + 1] == ("op", "^"):
                kind2, value2 = tokens[i + 2]
                if kind2 != "number" or "." in value2 or "j" in value2:
                    raise PolyParseError(f"exponent must be a nonnegative integer, got {value2!r}")
                power = int(value2)
                i += 2
            return Poly.variable(n, j) ** power, i + 1
        raise PolyParseError(f"unexpected token {value!r}")

    sign = 1.0
    expect_term = True
    current: Poly | None = None
    while i < len(tokens):
        kind, value = tokens[i]
        if kind == "op" and value in "+-":
            if current is not None:
                result = result + sign * current
                current = None
            if expect_term and value == "-":
                sign = -sign
            else:
                sign = 1.0 if value == "+" else -1.0
            expect_term = True
            i += 1
            continue
        if kind == "op" and value == "*":
            if current is None:
                raise PolyParseError("dangling '*'")
            factor, i = parse_factor(i + 1)
            current = current * factor
            expect_term = False
            continue
        factor, i = parse_factor(i)
        current = factor if current is None else current * factor
        expect_term = False
    if current is not None:
        result = result + sign * current
    elif expect_term and tokens:
        raise PolyParseError("trailing operator")
    if not tokens:
        raise PolyParseError("empty polynomial literal")
    return result


# ---------------------------------------------------------------------------
# Axiom harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomCheck:
    axiom_id: str
    description: str
    samples: int
    violations: int
    worst_violation: float
    witness: str | None

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class AxiomReport:
    space: Space
    seed: int
    checks: tuple[AxiomCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, axiom_id: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom_id == axiom_id:
                return c
        raise KeyError(axiom_id)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "axiom": c.axiom_id,
                    "description": c.description,
                    "samples": c.samples,
                    "violations": c.violations,
                    "worst_violation": c.worst_violation,
                    "witness": c.witness,
                }
                for c in self.checks
            ],
        }


def _gap(lhs, rhs) -> float:
    # |lhs - rhs| with infinity conventions: equal infinities gap 0.
    if math.isinf(lhs) and math.isinf(rhs):
        return 0.0
    if math.isinf(lhs) or math.isinf(rhs):
        return math.inf
    return float(abs(lhs - rhs))


def _random_poly(rng: np.random.Generator, n: int, max_degree: int) -> Poly:
    terms = {}
    for _ in range(int(rng.integers(1, 4))):
        m = tuple(int(e) for e in rng.multinomial(int(rng.integers(0, max_degree + 1)), [1 / n] * n))
        c = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        if c != 0:
            terms[m] = terms.get(m, 0) + c
    return Poly(n, terms)


def _random_element(rng: np.random.Generator, space: Space) -> Element:
    data = np.zeros((space.num_monomials, space.d), dtype=np.complex128)
    for _ in range(int(rng.integers(1, 5))):
        i = int(rng.integers(0, space.num_monomials))
        ch = int(rng.integers(0, space.d))
        data[i, ch] += complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
    return Element(space, data)


def check_axioms(space: Space, seed: int = 0, samples: int = 500) -> AxiomReport:
    """Sample the valuation axioms for the polynomial algebra and the module.

    Violations are counted and reported, never raised.  Polynomial degree
    arithmetic is exact, so a clean report is decisive for the sampled set.
    Products pushed past the truncation degree are skipped in the strictness
    check (their flags are tested separately) but still satisfy the one-sided
    inequality, which is asserted for every sample.
    """
    rng = np.random.default_rng(seed)
    n = space.n
    max_gen_degree = max(space.N // 2, 1)

    polys = [Poly.zero(n), Poly.one(n), Poly.variable(n, 1)]
    polys += [_random_poly(rng, n, max_gen_degree) for _ in range(samples)]
    elements = [Element.zero(space), Element.monomial(space, (0,) * n)]
    elements += [_random_element(rng, space) for _ in range(samples)]

    checks: list[AxiomCheck] = []

    def run(axiom_id, description, cases):
        violations = 0
        worst = 0.0
        witness = None
        count = 0
        for payload, gap in cases:
            count += 1
            if gap > 0:
                violations += 1
                if gap > worst or witness is None:
                    worst = gap
                    witness = payload
        checks.append(AxiomCheck(axiom_id, description, count, violations,
                                 worst if violations else 0.0, witness))

    run("algebra-unit", "order of the unit is zero",
        [("1", _gap(Poly.one(n).order, 0))])

    run("algebra-zero-iff", "order infinite exactly for the zero polynomial",
        [(p.to_string(), 0.0 if (math.isinf(p.order)) == p.is_zero() else 1.0)
         for p in polys])

    def product_cases():
        for _ in range(samples):
            p = polys[int(rng.integers(0, len(polys)))]
            q = polys[int(rng.integers(0, len(polys)))]
            lhs = (p * q).order
            rhs = p.order + q.order if not (math.isinf(p.order) or math.isinf(q.order)) else math.inf
            yield (f"({p.to_string()})*({q.to_string()})", _gap(lhs, rhs))

    run("algebra-product-strict", "order of a product is the sum of orders", list(product_cases()))

    run("algebra-scalar", "nonzero scalars preserve order",
        [(p.to_string(), _gap((2.5j * p).order, p.order)) for p in polys])

    def sum_cases():
        for _ in range(samples):
            p = polys[int(rng.integers(0, len(polys)))]
            q = polys[int(rng.integers(0, len(polys)))]
            bound = min(p.order, q.order)
            actual = (p + q).order
            yield (f"({p.to_string()})+({q.to_string()})",
                   0.0 if actual >= bound else float(bound - actual))

    run("algebra-sum", "order of a sum is at least the minimum order", list(sum_cases()))

    def zero_divisor_cases():
        for _ in range(samples):
            p = polys[int(rng.integers(0, len(polys)))]
            q = polys[int(rng.integers(0, len(polys)))]
            bad = (p * q).is_zero() and not (p.is_zero() or q.is_zero())
            yield (f"({p.to_string()})*({q.to_string()})", 1.0 if bad else 0.0)

    run("algebra-no-zero-divisors", "a vanishing product has a vanishing factor",
        list(zero_divisor_cases()))

    def split_cases():
        for p in polys:
            lam, rest = unital_split(p)
            ok = (Poly(n, {(0,) * n: lam}) + rest == p) and rest.order >= 1
            yield (p.to_string(), 0.0 if ok else 1.0)

    run("algebra-unital-split", "constant-plus-augmentation split reconstructs exactly",
        list(split_cases()))

    run("module-zero-iff", "element order infinite exactly for the zero element",
        [(repr(e), 0.0 if (math.isinf(e.order)) == (e.norm() == 0.0) else 1.0)
         for e in elements])

    def module_product_cases():
        for _ in range(samples):
            p = polys[int(rng.integers(0, len(polys)))]
            f = elements[int(rng.integers(0, len(elements)))]
            prod, exact = mul_poly(p, f)
            if math.isinf(p.order) or math.isinf(f.order):
                expected = math.inf
                yield (f"({p.to_string()})*elem", _gap(prod.order, expected))
                continue
            lower = p.order + f.order
            if exact:
                expected = lower if prod.norm() > 0 else math.inf
                yield (f"({p.to_string()})*elem", _gap(prod.order, expected))
            else:
                # truncation only removes high terms: inequality must survive
                yield (f"({p.to_string()})*elem (truncated)",
                       0.0 if prod.order >= lower else float(lower - prod.order))

    run("module-product", "products respect order (strictly when nothing is truncated)",
        list(module_product_cases()))

    run("module-scalar", "nonzero scalars preserve element order",
        [(repr(e), _gap((1.5j * e).order, e.order)) for e in elements])

    def module_sum_cases():
        for _ in range(samples):
            f = elements[int(rng.integers(0, len(elements)))]
            g = elements[int(rng.integers(0, len(elements)))]
            bound = min(f.order, g.order)
            actual = (f + g).order
            yield ("elem+elem", 0.0 if actual >= bound else float(bound - actual))

    run("module-sum", "element sums respect the minimum order", list(module_sum_cases()))

    return AxiomReport(space=space, seed=seed, checks=tuple(checks))
