import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compjac.exactalg import SparsePoly, VariableContext
from compjac.jets import (
    ParamCurve,
    SupportError,
    artinian_dims,
    curve_semigroup,
    fake_betti,
    implicit_residual,
    implicitize,
    local_model,
    mrig_equations,
)
from compjac.semigroups import gaps


def test_cusp_relation():
    imp = implicitize(ParamCurve.monomial(2, 3))
    ctx = imp.poly.ctx
    x, y = (SparsePoly.var(ctx, n) for n in ctx.names)
    assert imp.poly == y ** 2 - x ** 3


@pytest.mark.parametrize("p,q", [(2, 5), (3, 4), (3, 5)])
def test_toric_relation(p, q):
    imp = implicitize(ParamCurve.monomial(p, q))
    ctx = imp.poly.ctx
    x, y = (SparsePoly.var(ctx, n) for n in ctx.names)
    assert imp.poly == y ** p - x ** q


def test_family_curve_relation_vanishes():
    curve = ParamCurve.family(3, 7)
    imp = implicitize(curve)
    assert implicit_residual(curve, imp.poly) == []
    assert imp.degree == 4 * 7


def test_value_semigroups():
    assert curve_semigroup(ParamCurve.monomial(3, 4)).gaps == gaps((3, 4)).gaps
    assert curve_semigroup(ParamCurve.family(3, 7)).gaps == gaps((4, 6, 13)).gaps
    assert curve_semigroup(ParamCurve.family(3, 9)).gaps == gaps((4, 6, 15)).gaps


def test_curve_validation():
    with pytest.raises(ValueError):
        ParamCurve((0, 0, 1), (0, 0, 0, 0, 1))
    with pytest.raises(ValueError):
        ParamCurve.family(3, 5)


def test_double_point_model():
    ctx = VariableContext(("x",), (1,))
    x = SparsePoly.var(ctx, "x")
    dims = artinian_dims(local_model(("x",), (x * x,)), ceiling=6)
    assert dims.total == 2 and list(dims.gr) == [1, 1]


def test_local_model_requires_centred_generators():
    ctx = VariableContext(("x",), (1,))
    x = SparsePoly.var(ctx, "x")
    with pytest.raises(SupportError):
        local_model(("x",), (x + 1,))


@pytest.mark.parametrize("p,q,gr", [(2, 3, [1, 1]), (3, 4, [1, 2, 1, 1]), (2, 5, [1, 1, 1]),
                                    (3, 5, [1, 2, 2, 1, 1])])
def test_toric_curves_through_jets(p, q, gr):
    model = mrig_equations(ParamCurve.monomial(p, q), "strict")
    dims = artinian_dims(model)
    assert dims.total == math.comb(p + q, p) // (p + q)
    assert list(dims.gr) == gr
    assert fake_betti(model, dims)[: len(gr)] == gr


def test_literal_convention_has_no_point_for_s7():
    # no translate of the curve has f_1 = 1 and 4 f_1 = 7 e_1 together
    with pytest.raises(SupportError):
        mrig_equations(ParamCurve.family(3, 7), "paper")


def test_model_json_is_stable():
    a = mrig_equations(ParamCurve.monomial(3, 4), "strict").to_json()
    b = mrig_equations(ParamCurve.monomial(3, 4), "strict").to_json()
    assert a == b and a["convention"] == "strict"


coprime_degrees = st.tuples(st.integers(2, 4), st.integers(3, 6)).filter(
    lambda t: t[0] < t[1] and math.gcd(*t) == 1)


@settings(max_examples=25, deadline=None)
@given(coprime_degrees, st.lists(st.integers(-2, 2), min_size=5, max_size=5),
       st.lists(st.integers(-2, 2), min_size=5, max_size=5))
def test_implicit_residual_is_zero(degs, lower_x, lower_y):
    dx, dy = degs
    # random lower-order terms; the curve still passes through the origin
    x = (0, *lower_x[: dx - 1], 1)
    y = (0, *lower_y[: dy - 1], 1)
    curve = ParamCurve(x, y)
    imp = implicitize(curve)
    assert implicit_residual(curve, imp.poly) == []
    assert imp.poly.terms[(0, dx)] == 1
