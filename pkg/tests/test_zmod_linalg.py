import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from shearwitt.zmod_linalg import (
    AbGroupMap,
    EnumGroup,
    SizeCapExceeded,
    classify_elements,
    complex_homology,
    group_order,
    howell_form,
    howell_reduce,
    invariant_factors,
    matmul,
    presented_map_homology,
    same_row_span,
    smith_normal_form,
    torsion_count,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-12, 12), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=80, deadline=None)
@given(small_matrices)
def test_snf_is_diagonal_and_unimodular(M):
    d, U, V = smith_normal_form(M)
    D = matmul(matmul(U, M), V)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    assert [D[i][i] for i in range(min(len(M), len(M[0]))) if D[i][i]] == d
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert abs(Matrix(U).det()) == 1 and abs(Matrix(V).det()) == 1


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_invariant_factors_match_sympy(M):
    ours = invariant_factors(M)
    theirs = [abs(int(x)) for x in sympy_invariant_factors(Matrix(M), domain=ZZ) if x != 0]
    assert ours == theirs


def test_howell_span_and_reduce():
    q = 8
    rows = [[2, 4, 0], [0, 4, 4], [6, 0, 4]]
    H = howell_form(rows, q)
    assert same_row_span(H, rows, q)
    span = {tuple(sum(c * r[j] for c, r in zip(cs, rows)) % q for j in range(3))
            for cs in itertools.product(range(q), repeat=3)}
    for v in itertools.product(range(0, 8, 2), repeat=3):
        assert (howell_reduce(H, list(v), q) is not None) == (tuple(v) in span)


def test_classify_and_counts():
    els = list(itertools.product(range(4), range(2)))
    add = lambda x, y: ((x[0] + y[0]) % 4, (x[1] + y[1]) % 2)  # noqa: E731
    factors = classify_elements(2, els, add, (0, 0))
    assert factors == [2, 4]
    assert group_order(factors) == 8
    assert torsion_count(factors, 2, 1) == 4


def _cyclic(n):
    return EnumGroup(list(range(n)), lambda x, y: (x + y) % n, 0)


def test_complex_homology_multiplication_map():
    f = AbGroupMap(_cyclic(8), _cyclic(8), lambda x: (2 * x) % 8)
    H = complex_homology(f, 2)
    assert H.H0 == [2] and H.H1 == [2]
    assert H.euler_ok()


def test_complex_homology_cap():
    f = AbGroupMap(_cyclic(16), _cyclic(16), lambda x: x)
    with pytest.raises(SizeCapExceeded):
        complex_homology(f, 2, cap=8)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=2),
       st.lists(st.integers(1, 3), min_size=1, max_size=2),
       st.data())
def test_presented_homology_matches_enumeration(src_exp, tgt_exp, data):
    """Map between products of cyclic 2-groups, checked against brute force."""
    p = 2
    so = [p**e for e in src_exp]
    to = [p**e for e in tgt_exp]
    # a homomorphism Z/a -> Z/b is x -> c*x with b | c*a
    images = []
    for a in so:
        row = []
        for b in to:
            step = b // __import__("math").gcd(a, b)
            row.append(step * data.draw(st.integers(0, b)) % b)
        images.append(row)
    rel_src = [[so[i] if i == j else 0 for j in range(len(so))] for i in range(len(so))]
    rel_tgt = [[to[i] if i == j else 0 for j in range(len(to))] for i in range(len(to))]
    ker, coker = presented_map_homology(rel_src, rel_tgt, images)

    src = EnumGroup(list(itertools.product(*[range(a) for a in so])),
                    lambda x, y: tuple((u + v) % a for u, v, a in zip(x, y, so)), tuple([0] * len(so)))
    tgt = EnumGroup(list(itertools.product(*[range(b) for b in to])),
                    lambda x, y: tuple((u + v) % b for u, v, b in zip(x, y, to)), tuple([0] * len(to)))

    def f(x):
        return tuple(sum(x[i] * images[i][j] for i in range(len(so))) % to[j] for j in range(len(to)))

    H = complex_homology(AbGroupMap(src, tgt, f), p)
    assert ker == H.H0
    assert coker == H.H1


def _random_unimodular(n, rng):
    W = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            f = rng.randint(-3, 3)
            W[i] = [a + f * b for a, b in zip(W[i], W[j])]
    return W


@pytest.mark.parametrize("so,to", [([4, 8], [2, 8]), ([9, 3, 27], [9, 9]), ([2, 3], [6, 4]), ([8], [1, 4])])
def test_presented_homology_is_coordinate_free(so, to):
    import random

    from shearwitt.zmod_linalg import _unimodular_inverse

    rng = random.Random(len(so) * 7 + sum(to))
    images = [[(b // __import__("math").gcd(a, b)) * rng.randint(0, b) % b for b in to] for a in so]
    diag = lambda d: [[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]
    base = presented_map_homology(diag(so), diag(to), images)
    for _ in range(4):
        Ws, Wt = _random_unimodular(len(so), rng), _random_unimodular(len(to), rng)
        Us = _random_unimodular(len(so), rng)
        rel_src = matmul(Us, matmul(diag(so), Ws))
        rel_tgt = matmul(diag(to), Wt)
        moved = matmul(matmul(_unimodular_inverse(Ws), images), Wt)
        assert presented_map_homology(rel_src, rel_tgt, moved) == base


def test_presented_homology_with_large_triangular_relations():
    # a 3-group pair whose stacked lattice drives naive elimination to huge entries
    block = [[9, 0, 0, 0], [0, 9, 0, 0], [-3, -3, 3, 0], [-2, -8, -1, 3]]
    rel = [row + [0] * 4 for row in block] + [[0] * 4 + row for row in block]
    images = [[6, 0, 0, 0, 1, 0, 0, 0], [6, 6, 0, 0, 0, 1, 0, 0], [3, 6, 0, 0, 0, 0, 1, 0],
              [1, 1, 2, 0, 0, 0, 0, 1], [1, 0, 0, 0, 8, 0, 0, 0], [3, 5, 2, 0, 0, 8, 0, 0],
              [0, 1, 0, 0, 6, 6, 2, 0], [7, 7, 0, 1, 4, 7, 2, 2]]
    assert presented_map_homology(rel, rel, images) == ([], [])
