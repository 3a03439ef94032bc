import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearwitt.corpus import finite_field, square_zero_ring
from shearwitt.ring_base import (
    FpkAlgebra,
    RingError,
    extend_nilpotent,
    frobenius_endo,
    is_artinian_local_fp,
    is_perfect_field,
    make_field,
    make_ideal,
    make_quotient,
    make_zmod,
    nilpotency_index,
    nilradical,
    residue_section,
)

RINGS = [
    make_zmod(2), make_zmod(3, 2), finite_field(2, 2), finite_field(3, 2),
    extend_nilpotent(make_zmod(2), 3), square_zero_ring(make_zmod(3), 2),
    make_field(2, [1, 1, 1], k=2),
]


@pytest.mark.parametrize("R", RINGS, ids=lambda R: R.name)
def test_axioms_hold(R):
    R.verify_axioms()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(RINGS), st.data())
def test_ring_laws_random(R, data):
    x, y, z = (data.draw(st.integers(0, R.size - 1)) for _ in range(3))
    assert R.add(x, y) == R.add(y, x)
    assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
    assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
    assert R.sub(R.add(x, y), y) == x
    assert R.mul(R.one, x) == x


def test_bad_inputs_rejected():
    with pytest.raises(RingError):
        make_zmod(4)
    with pytest.raises(RingError):
        make_field(2, [1, 0, 1])  # x^2 + 1 = (x + 1)^2 over F2


def test_units_and_inverse():
    F9 = finite_field(3, 2)
    for x in F9.elements():
        if x:
            assert F9.mul(x, F9.inverse(x)) == F9.one
    R = extend_nilpotent(make_zmod(2), 2)
    t = R.elem([0, 1])
    assert not R.is_unit(t) and R.is_nilpotent(t)
    assert R.inverse(t) is None


def test_nilpotent_extension_and_radical():
    R = extend_nilpotent(finite_field(2, 2), 3)
    assert R.size == 4**3
    assert nilpotency_index(R) == 3
    assert len(nilradical(R).elements()) == 16
    assert is_artinian_local_fp(R)
    assert not is_perfect_field(R)
    assert is_perfect_field(finite_field(3, 3))


def test_quotient_by_nilpotent_power():
    R = extend_nilpotent(make_zmod(2), 4)
    t2 = R.elem([0, 0, 1, 0])
    Q, proj = make_quotient(R, make_ideal(R, [t2]))
    assert Q.size == 4
    proj.verify()
    assert nilpotency_index(Q) == 2


def test_residue_section_is_a_ring_section():
    R = extend_nilpotent(finite_field(3, 2), 2)
    res = residue_section(R)
    k = res.field
    assert k.size == 9
    for a in k.elements():
        assert res.projection(res.section[a]) == a
        for b in k.elements():
            assert res.section[k.mul(a, b)] == R.mul(res.section[a], res.section[b])


def test_frobenius_endo_is_multiplicative():
    R = square_zero_ring(make_zmod(2), 2)
    phi = frobenius_endo(R)
    for x in R.elements():
        for y in R.elements():
            assert phi(R.mul(x, y)) == R.mul(phi(x), phi(y))


@pytest.mark.parametrize("R", RINGS, ids=lambda R: R.name)
def test_dict_round_trip(R):
    S = FpkAlgebra.from_dict(R.to_dict())
    assert S == R and S.to_dict() == R.to_dict()
