import pytest

from shearwitt.corpus import (
    WINDOW_MATRICES,
    closed_form_order,
    finite_field,
    galois_oracle,
    nilpotent_test_rings,
    standard_windows,
)
from shearwitt.point_functors import (
    HatCarrier,
    PointError,
    TestRing,
    duality_diagram_check,
    eval_Cn,
    eval_sCn,
    eval_Zn,
    exact_triangle_check,
    ext_crosscheck,
    point_count_table,
    window_at,
)
from shearwitt.ring_base import extend_nilpotent, make_zmod
from shearwitt.zmod_linalg import SizeCapExceeded, group_order, smith_normal_form


@pytest.mark.parametrize("p,m,n", [(2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 2), (3, 2, 1)])
@pytest.mark.parametrize("name", sorted(WINDOW_MATRICES))
def test_field_points_match_oracle(p, m, n, name):
    S = TestRing(finite_field(p, m))
    M = standard_windows(p, 2)[name]
    rep = eval_sCn(M, S, n)
    assert rep.ok
    r0, _, Psi = WINDOW_MATRICES[name]
    assert rep.order_H0 == galois_oracle(p, m, n, r0, Psi) == closed_form_order(name, p, n)


def test_cn_needs_length_at_least_n():
    M = standard_windows(2, 1)["unit"]
    with pytest.raises(Exception):
        window_at(M, TestRing(make_zmod(2)), 2)


@pytest.mark.parametrize("R", nilpotent_test_rings(2) + nilpotent_test_rings(3)[:1], ids=lambda R: R.name)
def test_hat_carrier_presentation_is_consistent(R):
    C = HatCarrier(R, 2, 6)
    d, _, _ = smith_normal_form(C.relations)
    assert group_order([x for x in d if x != 1]) == len(C.elements)
    for x, c in list(C.coords.items())[:40]:
        acc = (0,) * 6
        for g, k in zip(C.generators, c):
            for _ in range(k):
                acc = C.add(acc, g)
        assert acc == x


def test_Zn_has_no_H_minus_one_and_stabilises():
    S = TestRing(extend_nilpotent(make_zmod(2), 3))
    for name, M in standard_windows(2, 3).items():
        rep = eval_Zn(M, S, 1, L_max=5)
        assert rep.ok and rep.Hm1 == []
        assert len(rep.trace) >= 2 and rep.trace[-1]["value"] == rep.trace[-2]["value"]


def test_mu_p_points_over_square_zero_ring():
    # the unit window gives mu_p-like points 1 + m of order |m|
    R = nilpotent_test_rings(2)[2]
    rep = eval_sCn(standard_windows(2, 2)["unit"], TestRing(R), 1)
    assert rep.ok and rep.order_H0 == 4


def test_sCn_over_perfect_ring_equals_Cn():
    S = TestRing(finite_field(2, 2))
    for M in standard_windows(2, 2).values():
        assert eval_sCn(M, S, 2).H0 == eval_Cn(M, S, 2).H0


def test_budget_is_enforced():
    S = TestRing(extend_nilpotent(make_zmod(3), 3), budget=2**8)
    with pytest.raises((SizeCapExceeded, PointError)):
        eval_sCn(standard_windows(3, 3)["ordinary"], S, 2, L_max=4, cap=2**8)


@pytest.mark.parametrize("name", sorted(WINDOW_MATRICES))
def test_triangle_and_duality_small(name):
    R = extend_nilpotent(make_zmod(2), 2)
    M = standard_windows(2, 2)[name]
    tri = exact_triangle_check(M, TestRing(R), 1, N=2, samples=20)
    assert tri.ok, tri.failures[:2]
    dual = duality_diagram_check(M, TestRing(R), 1)
    assert dual.ok, dual.failures[:2]
    ext = ext_crosscheck(M, TestRing(make_zmod(2)), 1)
    assert ext.ok


def test_point_count_table_rows():
    M = standard_windows(2, 2)["twist"]
    rows = point_count_table(M, [TestRing(make_zmod(2)), TestRing(finite_field(2, 2))], [1, 2], "sC",
                             oracle=lambda S, n: 2**n)
    assert len(rows) == 4
    assert all(r["matches_oracle"] for r in rows)
