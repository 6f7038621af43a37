from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from compjac.exactalg import (
    AmbientMismatch,
    ContextMismatch,
    ExactMatrix,
    RowSpace,
    SparsePoly,
    VariableContext,
    coeff_of,
    derivative,
    divide_by_variable,
    flint_available,
    generalized_binomial,
    kernel_basis,
    matrix_rank,
    poly_mul,
    rational_power_series,
    rref,
    span_rank,
    sparse_kernel,
    subspace_ops,
)
from compjac.presentations import build_IO

CTX = VariableContext(("e2", "w"), (2, 1))
E2 = SparsePoly.var(CTX, "e2")
W = SparsePoly.var(CTX, "w")
ONE = SparsePoly.one(CTX)

small = st.integers(-4, 4)
matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=6))


def test_identity_and_square():
    e = ONE + E2 * W ** 2
    assert poly_mul(ONE, e) == e
    assert poly_mul(e, e) == ONE + 2 * E2 * W ** 2 + E2 ** 2 * W ** 4


def test_coeff_of_examples():
    e = ONE + E2 * W ** 2
    assert coeff_of(e, "w", 2) == E2
    assert coeff_of(SparsePoly.zero(CTX), "w", 5).is_zero()


def test_weighted_derivative_combination_for_2_3():
    ctx = VariableContext(("e2", "f2", "f3", "w"), (2, 2, 3, 1))
    e2, f2, f3, w = (SparsePoly.var(ctx, n) for n in ctx.names)
    e = SparsePoly.one(ctx) + e2 * w ** 2
    f = SparsePoly.one(ctx) + f2 * w ** 2 + f3 * w ** 3
    combo = 3 * derivative(e, "w") * f - 2 * e * derivative(f, "w")
    assert combo == (6 * e2 - 4 * f2) * w - 6 * f3 * w ** 2 + 2 * e2 * f2 * w ** 3
    assert coeff_of(combo, "w", 3) == 2 * e2 * f2
    # the presentation built from this combination carries the same three generators
    io = build_IO(2, 3)
    got = {g.to_str() for g in io.generators}
    sub = VariableContext(("e2", "f2", "f3"), (2, 2, 3))
    a, b, c = (SparsePoly.var(sub, n) for n in sub.names)
    assert got == {(6 * a - 4 * b).to_str(), (-6 * c).to_str(), (2 * a * b).to_str()}


def test_three_halves_power():
    got = rational_power_series(ONE + E2 * W ** 2, Fraction(3, 2), "w", 4)
    assert got == ONE + Fraction(3, 2) * E2 * W ** 2 + Fraction(3, 8) * E2 ** 2 * W ** 4
    assert generalized_binomial(Fraction(3, 2), 2) == Fraction(3, 8)


def test_trivial_powers():
    p = ONE + E2 * W ** 2
    assert rational_power_series(p, 1, "w", 6) == p
    assert rational_power_series(p, 0, "w", 6) == ONE


def test_power_series_needs_unit_constant():
    with pytest.raises(ValueError):
        rational_power_series(E2 * W ** 2, Fraction(1, 2), "w", 4)


def test_context_mismatch():
    other = VariableContext(("x",), (1,))
    with pytest.raises(ContextMismatch):
        poly_mul(ONE, SparsePoly.one(other))


def test_divide_and_evaluate():
    p = W ** 3 + 2 * E2 * W
    assert divide_by_variable(p, "w") == W ** 2 + 2 * E2
    assert p.evaluate({"e2": 1, "w": 2}) == 12


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == []
    (k,) = kernel_basis(ExactMatrix.from_rows([[1, -1]]))
    assert k == [1, 1]


def test_subspace_examples():
    assert subspace_ops([[1, 2, 3]], [[1, 2, 3]], 3).dim_intersection == 1
    assert subspace_ops([[1, 0]], [[0, 1]], 2).dim_intersection == 0
    with pytest.raises(AmbientMismatch):
        subspace_ops([[1, 0]], [[0, 1, 0]], 2)


def test_rowspace_incremental():
    rs = RowSpace(3)
    assert rs.add({0: 1, 1: 1})
    assert not rs.add({0: 2, 1: 2})
    assert rs.add({2: 5})
    assert rs.contains({0: 1, 1: 1, 2: 1})
    assert not rs.contains({1: 1})


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_matches_sympy(rows):
    n = len(rows[0])
    sparse = [{i: v for i, v in enumerate(r) if v} for r in rows]
    expected = sympy.Matrix(rows).rank()
    assert matrix_rank(sparse, n, backend="python") == expected
    assert len(rref(sparse, n, backend="python")[0]) == expected
    if flint_available():
        assert matrix_rank(sparse, n, backend="flint") == expected
        assert len(rref(sparse, n, backend="flint")[0]) == expected


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_kernel_vectors_are_annihilated(rows):
    n = len(rows[0])
    sparse = [{i: v for i, v in enumerate(r) if v} for r in rows]
    ker = sparse_kernel(sparse, n)
    assert len(ker) == n - sympy.Matrix(rows).rank()
    for k in ker:
        for r in rows:
            assert sum(Fraction(a) * b for a, b in zip(r, k)) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), matrices, matrices)
def test_inclusion_exclusion(n, a, b):
    U = [(r * n)[:n] for r in a]
    V = [(r * n)[:n] for r in b]
    d = subspace_ops(U, V, n)
    assert d.dim_intersection == d.dim_u + d.dim_v - d.dim_sum
    assert d.dim_sum == span_rank(U + V, n)
    for vec in d.intersection_basis:
        assert span_rank(U + [list(vec)], n) == d.dim_u
        assert span_rank(V + [list(vec)], n) == d.dim_v


coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(coeff, coeff, st.fractions(min_value=-2, max_value=2, max_denominator=3),
       st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_power_series_exponents_add(c1, c2, a, b):
    p = ONE + c1 * E2 * W ** 2 + c2 * W ** 3
    lhs = poly_mul(rational_power_series(p, a, "w", 7), rational_power_series(p, b, "w", 7),
                   truncate=((0, 1), 7))
    assert lhs == rational_power_series(p, a + b, "w", 7)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coeff), max_size=5),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coeff), max_size=5))
def test_product_of_homogeneous_is_homogeneous(ta, tb):
    # force homogeneity by taking the top-weight part of each random polynomial
    def top(terms):
        p = SparsePoly(CTX, {(i, j): c for i, j, c in terms})
        if p.is_zero():
            return p
        d = max(p.degrees())
        return SparsePoly(CTX, {m: c for m, c in p.terms.items() if CTX.degree(m) == d})

    a, b = top(ta), top(tb)
    prod = poly_mul(a, b)
    if a and b:
        assert prod.is_homogeneous()
        assert prod.degree() == a.degree() + b.degree()
    else:
        assert prod.is_zero()
