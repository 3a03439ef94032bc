import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearwitt.corpus import finite_field, square_zero_ring
from shearwitt.ring_base import extend_nilpotent, make_zmod
from shearwitt.witt import (
    HatWittVec,
    WittError,
    WittRing,
    Vtilde,
    compute_u0_alpha_ptilde,
    divided_gamma,
    from_ghost,
    ghost_vector,
    hat_add,
    hat_V,
)


def to_int(x, p, n):
    """W_n(F_p) -> Z/p^n, sum of p^i times the Teichmueller lift of x_i."""
    mod = p**n
    return sum(p**i * pow(a, p ** (n - 1), mod) for i, a in enumerate(x)) % mod


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (3, 2), (3, 3)])
def test_witt_of_prime_field_is_integers_mod_pn(p, n):
    W = WittRing(make_zmod(p), n)
    els = list(W.elements())
    assert len({to_int(x, p, n) for x in els}) == p**n
    mod = p**n
    for x, y in itertools.product(els, repeat=2):
        assert to_int(W.add(x, y), p, n) == (to_int(x, p, n) + to_int(y, p, n)) % mod
        assert to_int(W.mul(x, y), p, n) == (to_int(x, p, n) * to_int(y, p, n)) % mod


@pytest.mark.parametrize("R", [finite_field(2, 2), extend_nilpotent(make_zmod(2), 2),
                               square_zero_ring(make_zmod(3), 1), make_zmod(2, 2)], ids=lambda R: R.name)
def test_ghost_and_polynomial_engines_agree(R):
    n = 3 if R.p == 2 else 2
    A = WittRing(R, n, engine="ghost")
    B = WittRing(R, n, engine="poly")
    rng = random.Random(1)
    for _ in range(60):
        x, y = A.random(rng), A.random(rng)
        assert A.add(x, y) == B.add(x, y)
        assert A.mul(x, y) == B.mul(x, y)
        assert A.neg(x) == B.neg(x)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(finite_field(2, 2), 3), (extend_nilpotent(make_zmod(2), 3), 3),
                        (finite_field(3, 2), 2), (extend_nilpotent(make_zmod(3), 2), 2)]),
       st.integers(0, 2**30))
def test_frobenius_verschiebung_identities(case, seed):
    R, n = case
    W = WittRing(R, n)
    rng = random.Random(seed)
    x, y = W.random(rng), W.random(rng)
    p = R.p
    assert W.F(W.V(x)) == W.scalar(p, x)
    assert W.mul(x, W.V(y)) == W.V(W.mul(W.F(x), y))
    a = rng.randrange(R.size)
    assert W.F(W.teich(a)) == W.teich(R.pow(a, p))
    assert W.F(W.mul(x, y)) == W.mul(W.F(x), W.F(y))


def test_ghost_map_round_trip():
    p = 3
    x = [5, 7, 11]
    assert from_ghost(ghost_vector(x, p), p) == x


def test_frobenius_needs_fp_algebra():
    W = WittRing(make_zmod(2, 2), 2)
    with pytest.raises(WittError):
        W.F(W.one)


def test_constants_at_p2():
    c = compute_u0_alpha_ptilde(2, 5)
    R = make_zmod(2, 5)
    W = WittRing(R, 5)
    u0 = c.in_ring(W, "u0")
    two = W.from_int(2)
    assert W.V(u0) == W.sub(two, W.teich(2))
    assert c.in_ring(W, "ptilde") == W.sub(two, W.teich(4))
    alpha = c.in_ring(W, "alpha")
    alpha_long = compute_u0_alpha_ptilde(2, 6).in_ring(WittRing(R, 6), "alpha")
    assert W.mul(u0, W.F_universal(alpha_long)) == alpha


def test_constants_at_p3_are_trivial():
    c = compute_u0_alpha_ptilde(3, 4)
    assert c.u0 == c.alpha == (1, 0, 0, 0)


def test_vtilde_relations():
    R = extend_nilpotent(finite_field(2, 2), 2)
    W = WittRing(R, 4)
    c = compute_u0_alpha_ptilde(2, 4)
    Vu0 = c.in_ring(W, "V_u0")
    pt = c.in_ring(W, "ptilde")
    rng = random.Random(3)
    for _ in range(30):
        x = W.random(rng)
        assert Vtilde(W, W.F(x)) == W.mul(Vu0, x)
        assert W.F(Vtilde(W, x)) == W.mul(pt, x)


def test_divided_powers_on_image_of_V():
    W = WittRing(make_zmod(3), 3)
    rng = random.Random(0)
    for _ in range(30):
        x = W.V(W.random(rng))
        g2 = divided_gamma(W, 2, x)
        assert W.scalar(2, g2) == W.mul(x, x)
        g3 = divided_gamma(W, 3, x)
        assert W.scalar(3, g3) == W.mul(x, g2)


def test_hat_vectors():
    R = extend_nilpotent(make_zmod(2), 2)
    t = R.elem([0, 1])
    x = HatWittVec(R, {0: t})
    y = HatWittVec(R, {1: t})
    assert hat_V(x) == y
    s = hat_add(x, x)
    assert all(R.is_nilpotent(a) for a in s.entries.values())
    with pytest.raises(WittError):
        HatWittVec(R, {0: R.one})
