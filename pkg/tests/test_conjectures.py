import json

import pytest

from compjac import conjectures
from compjac.conjectures import (
    CONSISTENT,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    check_flatness,
    check_grm,
    check_planar,
    check_sp_points,
    check_toric,
    exit_code,
    planar_reference,
    run_batch,
)


def test_grm_cusp():
    rep = check_grm(2, 3)
    assert rep.verdict == HOLDS
    assert rep.evidence["betti"] == [1, 1]
    assert rep.evidence["gr_m_reversed"] == [1, 1]


def test_grm_3_4_evidence():
    rep = check_grm(3, 4)
    assert rep.verdict == HOLDS
    assert rep.evidence["gr_m_series"] == "1 + 2t + t^2 + t^3"
    assert rep.evidence["containment_audit"]["ok"]
    assert rep.evidence["table_support_ok"] and rep.evidence["table_lefschetz_ok"]
    # the report carries the table verbatim
    assert rep.evidence["filtration_table"]["row_sums"] == [1, 1, 2, 1]


def test_grm_rejects_common_factor():
    with pytest.raises(ValueError):
        check_grm(2, 4)


def test_toric_cusp_and_bounds():
    rep = check_toric((2, 3))
    assert rep.verdict == HOLDS
    assert rep.evidence["dim_O"] == rep.evidence["module_count"] == 2
    lo, hi = rep.bounds["degree_bounds"]
    assert hi == lo + 1


def test_planar_references_ship_with_package():
    assert planar_reference(3, 7) == [1, 3, 4, 4, 4, 3, 2, 1, 1]
    assert planar_reference(3, 9) == [1, 3, 4, 4, 4, 4, 3, 2, 1, 1]
    assert planar_reference(5, 11) is None


def _fake_row(row):
    def fake(q, s, convention, ceiling):
        return {"fake_betti": list(row), "total_dim": sum(row), "jets": {"truncation": 9},
                "convention": convention}
    return fake


def test_planar_verdict_logic(monkeypatch):
    monkeypatch.setattr(conjectures, "planar_fake_betti", _fake_row([1, 3, 4, 4, 4, 2, 1, 0, 0]))
    rep = check_planar(3, 7)
    assert rep.verdict == HOLDS and rep.evidence["strict_at"] == [5, 6, 7, 8]
    monkeypatch.setattr(conjectures, "planar_fake_betti", _fake_row([1, 3, 4, 4, 5, 2, 1, 0, 0]))
    assert check_planar(3, 7).verdict == FAILS
    with pytest.raises(ValueError):
        check_planar(3, 7, reference=[1, 2, 3])


def test_flatness_never_says_holds():
    for p, q in [(2, 3), (3, 4)]:
        rep = check_flatness(p, q, (3, 3))
        assert rep.verdict == CONSISTENT
        assert rep.evidence["strict_slots"] == []


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4)])
def test_sp_points(p, q):
    rep = check_sp_points(p, q)
    assert rep.verdict == HOLDS
    assert rep.evidence["vanishing_ok"] and rep.evidence["zero_set_ok"]
    assert rep.evidence["window_zeros"] == rep.evidence["flag_tuples"]


def test_exit_codes():
    assert exit_code([HOLDS, CONSISTENT]) == 0
    assert exit_code([HOLDS, INCONCLUSIVE]) == 2
    assert exit_code([INCONCLUSIVE, FAILS]) == 1
    assert exit_code([check_toric((2, 3))]) == 0


def test_report_json_is_deterministic_and_untimed():
    a = check_grm(3, 4).dumps()
    b = check_grm(3, 4).dumps()
    assert a == b
    assert "wall_clock_s" not in json.loads(a)
    assert "wall_clock_s" in check_toric((2, 3)).to_json(timing=True)


def test_batch_keeps_order():
    jobs = [("toric", {"generators": (2, 5)}), ("sp_points", {"p": 2, "q": 3}),
            ("toric", {"generators": (2, 3)})]
    serial = [r.dumps() for r in run_batch(jobs, 1)]
    parallel = [r.dumps() for r in run_batch(jobs, 2)]
    assert serial == parallel
    assert json.loads(serial[0])["parameters"]["generators"] == [2, 5]
