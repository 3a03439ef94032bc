import random

import pytest

from shearwitt.corpus import (
    corpus_windows,
    random_morphism,
    random_window,
    relative_pairs,
)
from shearwitt.frame_instances import (
    ShearedFrame,
    WittFrame,
    frame_hom_c,
    relative_sheared_frame,
    relative_witt_frame,
    truncation_hom,
)
from shearwitt.frames import (
    FrameError,
    Window,
    WindowMorphism,
    base_change,
    base_change_morphism,
    compose,
    compose_homs,
    deformation_lift,
    direct_sum,
    double_dual_identification,
    dual_window,
    identity_morphism,
    is_morphism,
    lift_morphism,
    twist_window,
    unit_window,
)
from shearwitt.ring_base import extend_nilpotent, make_zmod

F2 = make_zmod(2)
R2 = extend_nilpotent(F2, 2)


@pytest.mark.parametrize("frame", [WittFrame(F2, 3), WittFrame(R2, 2), WittFrame(make_zmod(3), 2),
                                   ShearedFrame(R2, 3), ShearedFrame(extend_nilpotent(make_zmod(3), 2), 2)],
                         ids=lambda F: F.name)
def test_frame_axioms(frame):
    rep = frame.verify(samples=25, seed=2)
    assert rep.ok, rep.failures[:2]


def test_dual_is_an_involution_and_swaps_unit_and_twist():
    F = WittFrame(F2, 3)
    assert dual_window(unit_window(F)).Psi == twist_window(F).Psi
    assert (dual_window(unit_window(F)).r0, dual_window(unit_window(F)).r1) == (0, 1)
    rng = random.Random(0)
    for _ in range(5):
        M = random_window(F, 1, 2, rng)
        assert double_dual_identification(M)


def test_non_invertible_psi_is_rejected():
    F = WittFrame(F2, 2)
    with pytest.raises(FrameError):
        Window(F, 1, 1, [[F.one0(), F.one0()], [F.one0(), F.one0()]])


def test_corpus_windows_and_direct_sum():
    F = WittFrame(F2, 2)
    ws = corpus_windows(F)
    assert set(ws) == {"unit", "twist", "ordinary", "supersingular"}
    D = direct_sum(ws["unit"], ws["twist"])
    assert (D.r0, D.r1) == (1, 1) and D.Psi == ws["ordinary"].Psi


def test_morphisms_compose_and_identity():
    F = WittFrame(R2, 2)
    rng = random.Random(4)
    M = random_window(F, 1, 1, rng)
    f = random_morphism(M, rng)
    assert is_morphism(f)[0]
    g = random_morphism(f.dst, rng)
    assert is_morphism(compose(g, f))[0]
    assert is_morphism(identity_morphism(M))[0]


def test_base_change_along_truncation_is_functorial():
    F = WittFrame(R2, 3)
    rng = random.Random(7)
    M = random_window(F, 1, 1, rng)
    t2 = truncation_hom(F, 2)
    t1 = truncation_hom(t2.dst, 1)
    A = base_change(base_change(M, t2), t1)
    B = base_change(M, compose_homs(t1, t2))
    assert A.Psi == B.Psi
    f = random_morphism(M, rng)
    fb = base_change_morphism(f, t2)
    assert is_morphism(fb)[0]


def test_c_hom_constants():
    c = frame_hom_c(R2, 3)
    assert c.alpha_ok and c.d_ok
    assert c.hom.verify(samples=20).ok


@pytest.mark.parametrize("label,pd", relative_pairs()[:3], ids=lambda x: x if isinstance(x, str) else "")
def test_relative_frames_and_lifting(label, pd):
    for rel in (relative_witt_frame(pd, 2), relative_sheared_frame(pd, 2)):
        assert rel.verify(samples=15).ok
        K = rel.leveled_ideal()
        assert K.verify(samples=15).ok
        Q = K.quotient
        rng = random.Random(1)
        Mb = random_window(Q, 1, 1, rng)
        M = deformation_lift(Mb, K)
        fb = identity_morphism(Mb)
        f = lift_morphism(M, M, fb, K)
        assert f.iterations == K.nu
        assert is_morphism(f)[0]
        # identity lifts to the identity
        assert f.X() == identity_morphism(M).X()


def test_lift_uniqueness_from_two_starts():
    pd = relative_pairs()[0][1]
    rel = relative_witt_frame(pd, 2)
    K = rel.leveled_ideal()
    rng = random.Random(3)
    Mb = random_window(K.quotient, 1, 1, rng)
    M = deformation_lift(Mb, K)
    fb = random_morphism(Mb, rng)
    Mp = deformation_lift(fb.dst, K)
    f1 = lift_morphism(M, Mp, fb, K)
    F = K.frame
    k = K.random_k0(rng)
    start = WindowMorphism(M, Mp, [[F.add0(f1.a[0][0], k)]], f1.b, f1.c, f1.e)
    f2 = lift_morphism(M, Mp, fb, K, start=start)
    assert f1.to_dict() == f2.to_dict()
