import math

import numpy as np
import pytest

from hardymod import (ContainmentError, Element, Poly, Space, complement_within,
                      graded_slice, inner, member, module_closure, mul_poly,
                      orthonormalize, project)
from hardymod.corpus import blaschke_coeffs

from helpers import slow_slice_dimension

SP2 = Space(n=2, d=1, N=4)


def e2(terms):
    return Element.from_terms(SP2, terms)


def span(*term_dicts, space=SP2):
    return orthonormalize([Element.from_terms(space, t) for t in term_dicts], space=space)


class TestOrthonormalize:
    def test_dependent_vector_dropped(self):
        basis = span({(1, 0): 1.0}, {(0, 1): 1.0}, {(1, 0): 1.0, (0, 1): 1.0})
        assert basis.dim == 2

    def test_single_unit_vector(self):
        basis = span({(2, 0): 1.0})
        assert basis.dim == 1
        assert basis.vectors[0].norm() == pytest.approx(1.0)

    def test_blaschke_pair(self):
        space = Space(n=1, d=1, N=24)
        B = blaschke_coeffs(0.5, 24, space)
        zB, _ = mul_poly(Poly.variable(1, 1), B)
        basis = orthonormalize([B, zB])
        assert basis.dim == 2
        assert basis.gram_residual <= 1e-10

    def test_zero_vectors_skipped(self):
        basis = orthonormalize([Element.zero(SP2), e2({(1, 0): 1.0})])
        assert basis.dim == 1

    def test_empty_needs_space(self):
        with pytest.raises(ValueError):
            orthonormalize([])
        assert orthonormalize([], space=SP2).dim == 0


class TestProject:
    def test_orthogonal_monomials(self):
        S = span({(2, 0): 1.0}, {(0, 2): 1.0})
        assert project(S, e2({(1, 1): 1.0})).norm() == 0.0

    def test_identity_on_members(self):
        S = span({(1, 0): 1.0})
        f = e2({(1, 0): 1.0})
        assert (project(S, f) - f).norm() <= 1e-14

    def test_blaschke_projection(self):
        space = Space(n=1, d=1, N=24)
        a = 0.5
        z2B, _ = mul_poly(Poly(1, {(2,): 1.0}), blaschke_coeffs(a, 24, space))
        S = orthonormalize([z2B])
        f = Element.from_terms(space, {(2,): 1.0})
        got = project(S, f)
        expected = (a / z2B.norm() ** 2) * z2B
        assert (got - expected).norm() <= 1e-12

    def test_idempotent_and_pythagoras(self):
        rng = np.random.default_rng(0)
        S = span({(1, 0): 1.0, (0, 1): 2.0}, {(2, 0): 1.0, (1, 1): -1.0})
        for _ in range(25):
            data = rng.standard_normal((SP2.num_monomials, 1)) \
                 + 1j * rng.standard_normal((SP2.num_monomials, 1))
            f = Element(SP2, data)
            pf = project(S, f)
            assert (project(S, pf) - pf).norm() <= 1e-10 * max(f.norm(), 1)
            lhs = f.norm() ** 2
            rhs = pf.norm() ** 2 + (f - pf).norm() ** 2
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestMember:
    def test_inside(self):
        S = span({(1, 0): 1.0}, {(0, 1): 1.0})
        verdict, residual = member(S, e2({(1, 0): 1.0, (0, 1): 1.0}))
        assert verdict and residual <= 1e-12

    def test_outside(self):
        S = span({(2, 0): 1.0}, {(0, 2): 1.0})
        verdict, residual = member(S, e2({(1, 1): 1.0}))
        assert not verdict
        assert residual == pytest.approx(1.0)

    def test_module_closure_membership(self):
        closure = module_closure([e2({(1, 0): 1.0}), e2({(0, 1): 1.0})], SP2)
        verdict, _ = member(closure.basis, e2({(1, 1): 1.0}))
        assert verdict


class TestComplement:
    def test_simple(self):
        B = span({(1, 0): 1.0}, {(0, 1): 1.0}, {(2, 0): 1.0})
        A = span({(2, 0): 1.0})
        C = complement_within(A, B)
        assert C.dim == 2
        for v in C.vectors:
            assert abs(inner(v, A.vectors[0])) <= 1e-9

    def test_equal_spaces_give_zero(self):
        B = span({(1, 0): 1.0})
        assert complement_within(B, B).dim == 0

    def test_example_module_level_one(self):
        closure = module_closure([e2({(1, 0): 1.0}), e2({(0, 1): 1.0})], SP2)
        V1 = graded_slice(closure.basis, 1)
        V2 = graded_slice(closure.basis, 2)
        W1 = complement_within(V2, V1)
        assert W1.dim == 2

    def test_containment_violation(self):
        A = span({(1, 1): 1.0})
        B = span({(2, 0): 1.0}, {(0, 2): 1.0})
        with pytest.raises(ContainmentError):
            complement_within(A, B)


class TestGradedSlice:
    def test_kills_low_degree_combination(self):
        space = Space(n=1, d=1, N=4)
        S = orthonormalize([Element.from_terms(space, {(0,): 1.0, (1,): 1.0}),
                            Element.from_terms(space, {(2,): 1.0})])
        sliced = graded_slice(S, 1)
        assert sliced.dim == 1
        assert sliced.vectors[0].order == 2

    def test_level_zero_is_identity(self):
        S = span({(1, 0): 1.0, (0, 0): 1.0})
        assert graded_slice(S, 0) is S

    def test_high_level_empty(self):
        S = span({(1, 0): 1.0}, {(0, 1): 1.0})
        assert graded_slice(S, 2).dim == 0

    def test_past_truncation_is_zero(self):
        S = span({(1, 0): 1.0}, {(0, 0): 1.0, (2, 2): 1.0})
        assert graded_slice(S, SP2.N + 1).dim == 0

    def test_matches_row_reduction_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            vectors = []
            for _ in range(rng.integers(1, 5)):
                data = np.zeros((SP2.num_monomials, 1), dtype=np.complex128)
                for _ in range(rng.integers(1, 5)):
                    data[rng.integers(0, SP2.num_monomials), 0] += complex(
                        rng.integers(-3, 4), rng.integers(-3, 4))
                if np.any(data):
                    vectors.append(Element(SP2, data))
            if not vectors:
                continue
            S = orthonormalize(vectors)
            for k in range(SP2.N + 2):
                assert graded_slice(S, k).dim == slow_slice_dimension(list(S.vectors), k)

    def test_nesting(self):
        S = span({(0, 0): 1.0, (1, 0): 1.0}, {(1, 1): 1.0, (2, 0): -1.0}, {(0, 2): 2.0})
        previous = S
        for k in range(1, SP2.N + 2):
            current = graded_slice(S, k)
            for v in current.vectors:
                assert member(previous, v).verdict
            assert current.dim <= previous.dim
            previous = current


class TestModuleClosure:
    def test_coordinate_functions_dim(self):
        space = Space(n=2, d=1, N=3)
        closure = module_closure([Element.monomial(space, (1, 0)),
                                  Element.monomial(space, (0, 1))], space)
        # monomials of degree 1..3 in two variables: 2 + 3 + 4
        assert closure.basis.dim == 9
        assert closure.exact

    def test_unit_generates_everything(self):
        space = Space(n=1, d=1, N=5)
        closure = module_closure([Element.monomial(space, (0,))], space)
        assert closure.basis.dim == 6

    def test_blaschke_generator(self):
        space = Space(n=1, d=1, N=24)
        closure = module_closure([blaschke_coeffs(0.5, 24, space)], space)
        assert closure.basis.dim == 25
        assert not closure.exact
        assert any(not entry.exact and entry.retained for entry in closure.generator_log)

    def test_result_is_shift_invariant_within_budget(self):
        space = Space(n=2, d=1, N=4)
        g = Element.from_terms(space, {(1, 0): 1.0, (0, 2): 1.0})
        closure = module_closure([g], space)
        for v in closure.basis.vectors:
            if v.support_degree <= space.N - 1:
                for j in (1, 2):
                    zv, exact = mul_poly(Poly.variable(2, j), v)
                    assert exact
                    assert member(closure.basis, zv).verdict
