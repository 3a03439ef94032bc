import random

import pytest

from shearwitt.corpus import finite_field, ring_grid
from shearwitt.ring_base import extend_nilpotent, make_ideal, make_zmod, nilradical
from shearwitt.sheared_witt import (
    F_invariants_report,
    ShearedError,
    ShearedWittRing,
    SupportOverflow,
    check_kernel_sequence,
    check_projection,
    check_Vn_Wn_sequence,
)
from shearwitt.witt import HatWittVec

R2 = extend_nilpotent(make_zmod(2), 2)
R3 = extend_nilpotent(make_zmod(3), 2)


@pytest.mark.parametrize("R", [R2, R3, extend_nilpotent(finite_field(2, 2), 2)], ids=lambda R: R.name)
def test_split_embed_round_trip(R):
    S = ShearedWittRing(R, 3)
    for w in list(S.W.elements())[:200]:
        assert S.embed(S.split(w)) == tuple(w)


def test_ring_operations_agree_with_witt_vectors():
    S = ShearedWittRing(R2, 4, 12)
    W = S.W
    rng = random.Random(5)
    for _ in range(50):
        x, y = S.random(rng), S.random(rng)
        ex, ey = S.embed(x), S.embed(y)
        assert S.embed(S.s_add(x, y)) == W.add(ex, ey)
        assert S.embed(S.s_mul(x, y)) == W.mul(ex, ey)
        assert S.embed(S.s_F(x)) == W.F(ex)


def test_perfect_ring_has_no_eta_part():
    S = ShearedWittRing(finite_field(2, 2), 3)
    assert S.perfect
    x = S.random(random.Random(0))
    assert not x.eta.entries


def test_rejects_non_fp_algebras_and_bad_bounds():
    with pytest.raises(ShearedError):
        ShearedWittRing(make_zmod(2, 2), 2)
    with pytest.raises(ShearedError):
        ShearedWittRing(R2, 4, 3)


def test_support_overflow():
    S = ShearedWittRing(R2, 2, 3)
    t = R2.elem([0, 1])
    with pytest.raises(SupportOverflow):
        S.make((0, 0), HatWittVec(R2, {5: t}))


def test_eta_must_be_nilpotent():
    S = ShearedWittRing(R2, 2)
    with pytest.raises(Exception):
        S.make((0, 0), {0: R2.one})


@pytest.mark.parametrize("R", ring_grid()[:4], ids=lambda R: R.name)
def test_exact_sequences_at_precision_3(R):
    rep = check_kernel_sequence(R, nilradical(R), 3, 8, samples=20, seed=1)
    assert rep.ok, rep.failures[:2]
    rep = check_Vn_Wn_sequence(R, 2, 3, 8, samples=20, seed=1)
    assert rep.ok, rep.failures[:2]


def test_kernel_sequence_for_a_proper_ideal():
    R = extend_nilpotent(make_zmod(2), 3)
    t2 = R.elem([0, 0, 1])
    rep = check_kernel_sequence(R, make_ideal(R, [t2]), 3, 8, samples=20)
    assert rep.ok


def test_projection_and_F_invariants():
    S = ShearedWittRing(R3, 3)
    assert check_projection(S, samples=30).ok
    rep = F_invariants_report(S)
    assert rep["size"] == 27 and rep["cyclic_generated_by_one"]
