"""Acceptance criteria 1-11.  Each test prints a single PASS/FAIL line, and
the terminal summary repeats all of them at the end of the run."""
import json

import pytest

from compjac.conjectures import CONSISTENT, HOLDS, INCONCLUSIVE, check_grm, check_planar, check_sp_points, check_toric
from compjac.gradedquot import (
    GradedQuotient,
    artinian_hilbert_function,
    betti_J,
    family_quotient,
    filtration_table,
    flatness_probe,
    gr_m_filtration,
    hilbert_function,
    o_quotient,
    saturate_and_dims,
    saturated_presentation,
)
from compjac.jets import ParamCurve, implicit_residual, implicitize
from compjac.oracles import catalan_count, closed_hilbert_series, dyck_poly
from compjac.semigroups import enumerate_modules, enumerate_sigma, p_basis, q_basis, semigroup_pq

from .acceptance_log import criterion
from .pairs import COPRIME_UP_TO_11, COPRIME_UP_TO_13, ORDERED_UP_TO_13

ROUTES = ("IO", "g", "toric")

# fake rows and reference rows of the two planar tables
PLANAR = {
    (3, 7): ([1, 3, 4, 4, 4, 2, 1, 0, 0], [1, 3, 4, 4, 4, 3, 2, 1, 1]),
    (3, 9): ([1, 3, 4, 4, 4, 4, 2, 1, 0, 0], [1, 3, 4, 4, 4, 4, 3, 2, 1, 1]),
}


def _delta(p, q):
    return (p - 1) * (q - 1) // 2


def test_criterion_01_dimension_formula():
    with criterion(1, "dim O_{q/p} by three presentations equals the rational Catalan number") as note:
        for p, q in ORDERED_UP_TO_13:
            expected = catalan_count(p, q)
            for route in ROUTES:
                h, _ = artinian_hilbert_function(o_quotient(p, q, route))
                assert sum(h) == expected, f"({p},{q}) route {route}: {sum(h)} != {expected}"
        note.append(f"{len(ORDERED_UP_TO_13)} pairs x {len(ROUTES)} routes")


def test_criterion_02_hilbert_series():
    with criterion(2, "Hilbert function of O_{q/p} equals the closed form") as note:
        for p, q in ORDERED_UP_TO_13:
            top = 2 * _delta(p, q)
            closed = closed_hilbert_series(p, q, top + 3)
            got = hilbert_function(o_quotient(p, q), top + 3)
            assert got == closed, f"({p},{q}): {got} != {closed}"
        note.append(f"{len(ORDERED_UP_TO_13)} pairs, coefficientwise")


def test_criterion_03_fixed_point_count():
    with criterion(3, "module count equals the Catalan number; bases obey the sum rule") as note:
        checked = 0
        for p, q in ORDERED_UP_TO_13:
            assert len(enumerate_modules(semigroup_pq(p, q))) == catalan_count(p, q), (p, q)
            for sigma in enumerate_sigma(p, q):
                assert p_basis(sigma, p).total == p * q * (p - 1) // 2, (p, q, sigma)
                assert q_basis(sigma, q).total == p * q * (q - 1) // 2, (p, q, sigma)
                checked += 1
        note.append(f"{checked} balanced modules")


BETTI_DYCK = [(p, 1 + k * p) for p in (2, 3, 4) for k in (1, 2, 3)]


def test_criterion_04_betti_numbers():
    with criterion(4, "betti_J sums to the Catalan number and matches the Dyck polynomial") as note:
        assert betti_J(2, 3).values == [1, 1]
        assert betti_J(3, 4).values == [1, 1, 2, 1]
        for p, q in BETTI_DYCK:
            b = betti_J(p, q).values
            assert sum(b) == catalan_count(p, q), (p, q, b)
            d = dyck_poly(p, q)
            assert b == d + [0] * (len(b) - len(d)), f"({p},{q}): {b} vs {d}"
        note.append("pairs " + " ".join(f"({p},{q})" for p, q in BETTI_DYCK))


def test_criterion_05_gr_m_of_o_3_4():
    with criterion(5, "Gr_m of O_{3/4} is 1 + 2t + t^2 + t^3 and check_grm(3,4) holds") as note:
        assert gr_m_filtration(o_quotient(3, 4)) == [1, 2, 1, 1]
        rep = check_grm(3, 4)
        assert rep.verdict == HOLDS, rep.verdict
        assert rep.evidence["gr_m_series"] == "1 + 2t + t^2 + t^3"
        note.append(rep.evidence["gr_m_series"])


def test_criterion_06_filtration_tables():
    with criterion(6, "filtration table marginals, support and Lefschetz symmetry") as note:
        for p, q in [(2, 3), (3, 4), (2, 5), (3, 5)]:
            t = filtration_table(p, q)
            assert t.row_sums() == betti_J(p, q).values, (p, q)
            assert t.col_sums() == closed_hilbert_series(p, q), (p, q)
            h, _ = artinian_hilbert_function(o_quotient(p, q))
            assert t.col_sums() == h, (p, q)
            assert t.support_ok(), (p, q)
            assert t.lefschetz_ok(), (p, q)
        note.append("(2,3) (3,4) (2,5) (3,5)")


def test_criterion_07_planar_tables():
    with criterion(7, "jets reproduce the planar fake-Betti rows; check_planar holds") as note:
        for (q, s), (fake, ref) in PLANAR.items():
            rep = check_planar(q, s, convention="strict")
            assert rep.evidence["convention"] == "strict"
            assert rep.evidence["fake_betti"] == fake, f"s={s}: {rep.evidence['fake_betti']}"
            assert rep.evidence["reference"] == ref
            assert rep.verdict == HOLDS
            differ = [i for i, (a, b) in enumerate(zip(ref, fake)) if a != b]
            assert rep.evidence["strict_at"] == differ, (s, rep.evidence["strict_at"])
            note.append(f"s={s} strict at {differ}")
        note.append("convention strict")


def test_criterion_08_toric():
    with criterion(8, "toric conjecture: equality for <p,q>, definite verdicts for 3-generator cases") as note:
        for p, q in COPRIME_UP_TO_11:
            rep = check_toric((p, q))
            assert rep.verdict == HOLDS, (p, q, rep.verdict)
        for gens in [(4, 6, 7), (3, 4, 5)]:
            rep = check_toric(gens)
            assert rep.verdict != INCONCLUSIVE, gens
            assert len(rep.evidence["stabilization"]) >= 2
            lo, hi = rep.bounds["degree_bounds"]
            assert hi == lo + 1
            note.append(f"{gens}: {rep.verdict} {rep.evidence['dim_O']} vs {rep.evidence['module_count']}")


def test_criterion_09_parabolic_points():
    with criterion(9, "parabolic ideal vanishes on flag tuples and its window zeros are exactly them") as note:
        for p, q in [(2, 3), (3, 4)]:
            rep = check_sp_points(p, q)
            assert rep.verdict == HOLDS, (p, q, rep.evidence)
            note.append(f"({p},{q}) {len(rep.evidence['flag_tuples'])} tuples")


def test_criterion_10_flatness_window():
    with criterion(10, "no strict inclusion slot up to (2 delta + 2, 2 delta + 2)") as note:
        for p, q in [(2, 3), (3, 4)]:
            w = 2 * _delta(p, q) + 2
            probe = flatness_probe(p, q, (w, w))
            assert probe.strict == [], (p, q, probe.strict)
            note.append(f"({p},{q}) window ({w},{w}) {CONSISTENT}")


def test_criterion_11_property_suites(capsys):
    with criterion(11, "Gorenstein symmetry, saturation idempotence, Betti monotonicity, "
                       "implicit residual, deterministic JSON") as note:
        for p, q in COPRIME_UP_TO_13:
            h, _ = artinian_hilbert_function(o_quotient(p, q))
            assert h == h[::-1], (p, q)
        for p, q in [(2, 3), (3, 4)]:
            window = (2 * _delta(p, q), 2 * _delta(p, q) + 2)
            gq = family_quotient(p, q, max_k=sum(window) + 4)
            once = GradedQuotient(saturated_presentation(gq, window))
            twice = GradedQuotient(saturated_presentation(once, window))
            sat = saturate_and_dims(gq, window)
            for a in range(window[0] + 1):
                for b in range(window[1] + 1):
                    assert once.dim((a, b)) == twice.dim((a, b)) == sat[(a, b)], (p, q, a, b)
        for p, q in [(2, 3), (3, 4), (2, 5), (3, 5), (4, 5)]:
            cert = betti_J(p, q).certificate
            cum = cert["cumulative"]
            assert all(x <= y for x, y in zip(cum, cum[1:])), (p, q, cum)
            assert all(v >= 0 for v in betti_J(p, q).values)
        for curve in [ParamCurve.monomial(3, 4), ParamCurve.family(3, 7), ParamCurve.family(3, 9)]:
            assert implicit_residual(curve, implicitize(curve).poly) == []
        assert check_grm(3, 4).dumps() == check_grm(3, 4).dumps()
        from compjac.cli import main

        outs = []
        for _ in range(2):
            main(["betti", "-p", "2,3", "-q", "5", "--json"])
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1] and json.loads(outs[0])["results"]
        note.append("all five suites")
