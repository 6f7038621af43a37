import pytest

from compjac.exactalg import SparsePoly, VariableContext
from compjac.gradedquot import (
    DiskCache,
    GradedQuotient,
    NotHomogeneous,
    StabilizationError,
    artinian_hilbert_function,
    betti_J,
    eps1_presentation,
    family_quotient,
    filtration_table,
    flatness_probe,
    gr_m_filtration,
    hilbert_function,
    o_quotient,
    saturate_and_dims,
    saturated_presentation,
    stable_space,
)
from compjac.oracles import catalan_count, closed_hilbert_series, dyck_poly, localization_betti, localization_table
from compjac.presentations import IdealPresentation


def _x_squared():
    ctx = VariableContext(("x",), (1,))
    x = SparsePoly.var(ctx, "x")
    return GradedQuotient(IdealPresentation(ctx, (x * x,), "graded"))


def test_hilbert_function_examples():
    assert hilbert_function(o_quotient(2, 3), 5) == [1, 0, 1, 0, 0, 0]
    h = hilbert_function(o_quotient(3, 4), 9)
    assert h[:7] == [1, 0, 1, 1, 1, 0, 1] and sum(h) == 5
    assert h[7:] == [0, 0, 0]


def test_non_artinian_quotient_raises():
    ctx = VariableContext(("x", "y"), (1, 1))
    x = SparsePoly.var(ctx, "x")
    gq = GradedQuotient(IdealPresentation(ctx, (x * x,), "graded"))
    with pytest.raises(StabilizationError):
        artinian_hilbert_function(gq, max_degree=20)


def test_hilbert_function_rejects_bigraded():
    with pytest.raises(NotHomogeneous):
        hilbert_function(family_quotient(2, 3, max_k=6), 3)


def test_gr_m_small_rings():
    assert gr_m_filtration(_x_squared()) == [1, 1]
    assert gr_m_filtration(o_quotient(2, 3)) == [1, 1]
    assert gr_m_filtration(o_quotient(3, 4)) == [1, 2, 1, 1]


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4), (2, 5), (3, 5), (4, 5)])
def test_gorenstein_symmetry(p, q):
    h, _ = artinian_hilbert_function(o_quotient(p, q))
    assert h == h[::-1]
    # one-dimensional socle: the top degree is 2 delta
    assert len(h) - 1 == (p - 1) * (q - 1)


def test_betti_small_values():
    assert betti_J(2, 3).values == [1, 1]
    assert betti_J(3, 4).values == [1, 1, 2, 1]


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4), (2, 5), (3, 5), (2, 7), (4, 5)])
def test_betti_agrees_with_localization_and_dyck(p, q):
    b = betti_J(p, q).values
    assert b == localization_betti(p, q)
    d = dyck_poly(p, q)
    assert b == d + [0] * (len(b) - len(d))


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4), (2, 5)])
def test_rank_and_space_routes_agree(p, q):
    assert betti_J(p, q).values == betti_J(p, q, method="space").values


def test_betti_cache_round_trip(tmp_path):
    cache = DiskCache(tmp_path)
    first = betti_J(3, 4, cache=cache)
    assert any(tmp_path.rglob("*.json"))
    again = betti_J(3, 4, cache=cache)
    assert first.values == again.values and first.certificate == again.certificate


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4), (2, 5), (3, 5)])
def test_filtration_table_matches_localization(p, q):
    t = filtration_table(p, q)
    assert t.dims == localization_table(p, q)
    assert t.row_sums() == betti_J(p, q).values
    assert t.col_sums() == closed_hilbert_series(p, q)
    assert t.support_ok() and t.lefschetz_ok()


def test_filtration_table_for_cusp():
    assert filtration_table(2, 3).dims == {(0, 0): 1, (1, 2): 1}


def test_stable_columns_reach_eps_one_ring():
    sp = stable_space(2, 3)
    assert sp.dim == catalan_count(2, 3) == 2
    gq = GradedQuotient(eps1_presentation(2, 3, 12))
    # s is a non-zero-divisor in high degree, so the graded pieces settle at the fixed-point count
    assert [gq.dim(b) for b in range(4, 9)] == [2] * 5


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4)])
def test_cumulative_filtration_dims_monotone(p, q):
    d = filtration_table(p, q).cumulative
    top = (p - 1) * (q - 1)
    for i in range(top + 1):
        for j in range(top + 1):
            assert d[(i, j)] >= d[(i - 1, j)] and d[(i, j)] >= d[(i, j - 1)]


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4)])
def test_saturation_is_idempotent(p, q):
    window = (4, 6)
    gq = family_quotient(p, q, max_k=12)
    once = GradedQuotient(saturated_presentation(gq, window))
    twice = GradedQuotient(saturated_presentation(once, window))
    sat = saturate_and_dims(gq, window)
    for a in range(window[0] + 1):
        for b in range(window[1] + 1):
            assert once.dim((a, b)) == twice.dim((a, b)) == sat[(a, b)]
            assert sat[(a, b)] <= gq.dim((a, b))


def test_flatness_probe_windows():
    assert flatness_probe(2, 3, (0, 0)).strict == []
    assert flatness_probe(2, 3).window == (4, 4)
    assert flatness_probe(3, 4, (6, 8)).strict == []
