"""Invariant suites behind ``verify`` and the acceptance tests.

Each suite returns a report dict with the run configuration, a corpus hash,
per-cell records and an ``invariants`` block.  The invariants block holds
only accepted mathematical outcomes, so it is the part that must not move
when support bounds or precision are raised.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

from .corpus import (
    WINDOW_MATRICES,
    closed_form_order,
    corpus_windows,
    finite_field,
    galois_oracle,
    nilpotent_test_rings,
    random_morphism,
    random_window,
    relative_pairs,
    ring_grid,
    standard_windows,
    witt_law_rings,
)
from .ring_base import extend_nilpotent, make_ideal, make_zmod, nilradical
from .witt import WittRing, compute_u0_alpha_ptilde, divided_gamma
from .zmod_linalg import DEFAULT_CAP, SizeCapExceeded


class SuiteError(ValueError):
    pass


@dataclass
class SuiteConfig:
    seed: int = 0
    precision: int = 4
    bound: int = 12
    support: int = 4
    budget: int = DEFAULT_CAP
    samples: int = 100
    p: int | None = None
    n: tuple[int, ...] = (1, 2)
    scale: int = 1

    def validate(self) -> None:
        if self.precision < 2 or self.precision > 12:
            raise SuiteError("precision must lie in [2, 12]")
        if self.bound < self.precision:
            raise SuiteError("bound must be >= precision")
        if self.support < 2:
            raise SuiteError("support bound must be >= 2")
        if self.samples < 1:
            raise SuiteError("samples must be positive")
        if self.p not in (None, 2, 3):
            raise SuiteError("p must be 2 or 3")
        if not self.n or any(k not in (1, 2, 3) for k in self.n):
            raise SuiteError("n values must lie in {1, 2, 3}")
        if self.scale not in (1, 2, 4):
            raise SuiteError("scale must be 1, 2 or 4")
        if self.budget < 2**8 or self.budget > 2**24:
            raise SuiteError("budget must lie in [2^8, 2^24]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        return d

    def doubled(self) -> "SuiteConfig":
        """Same run with support bounds and precisions doubled."""
        return replace(self, scale=self.scale * 2)

    @property
    def eff_bound(self) -> int:
        return self.bound * self.scale

    @property
    def eff_support(self) -> int:
        return self.support * self.scale


def corpus_hash() -> str:
    rings = [R.to_dict() for R in ring_grid() + witt_law_rings()]
    payload = json.dumps({"rings": rings, "windows": WINDOW_MATRICES}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class Report:
    def __init__(self, suite: str, cfg: SuiteConfig):
        self.suite = suite
        self.cfg = cfg
        self.cells: list[dict] = []
        self.invariants: dict = {}
        self.failures = 0
        self.t0 = time.perf_counter()

    def cell(self, key: str, ok: bool, invariant, **data) -> None:
        rec = {"key": key, "ok": bool(ok), "invariant": invariant, **data}
        self.cells.append(rec)
        self.invariants[key] = {"ok": bool(ok), "value": invariant}
        if not ok:
            self.failures += 1

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.cfg.to_dict(),
            "corpus_hash": corpus_hash(),
            "cells": self.cells,
            "invariants": self.invariants,
            "failures": self.failures,
            "ok": self.failures == 0,
            "wall_time": round(time.perf_counter() - self.t0, 3),
        }


def strip_timing(obj):
    """Drop wall-clock fields so reports can be compared byte for byte."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in ("wall_time", "elapsed")}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def scale_free(name: str) -> str:
    """Frame name with its precision removed, so cell keys survive a change of scale."""
    return re.sub(r"W_\d+\(", "W(", re.sub(r";N=\d+", "", name))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


# -- witt-laws ---------------------------------------------------------------------------

def _frob(W: WittRing, x):
    """F: W_n -> W_{n-1} valid over any ring (through one extra component)."""
    if W.R.is_fp_algebra:
        return W.F(x)[: W.n - 1]
    short = WittRing(W.R, W.n - 1)
    return short.F_universal(x)


def witt_law_cell(R, n: int, samples: int, rng: random.Random) -> list[str]:
    W = WittRing(R, n)
    Wl = WittRing(R, n + 1)
    fails = []
    p = W.from_int(R.p)
    zero, one = W.zero, W.one
    for _ in range(samples):
        x, y, z = W.random(rng), W.random(rng), W.random(rng)
        if W.add(x, y) != W.add(y, x):
            fails.append("add not commutative")
        if W.mul(x, y) != W.mul(y, x):
            fails.append("mul not commutative")
        if W.add(W.add(x, y), z) != W.add(x, W.add(y, z)):
            fails.append("add not associative")
        if W.mul(W.mul(x, y), z) != W.mul(x, W.mul(y, z)):
            fails.append("mul not associative")
        if W.mul(x, W.add(y, z)) != W.add(W.mul(x, y), W.mul(x, z)):
            fails.append("not distributive")
        if W.add(x, zero) != x or W.mul(x, one) != x or W.add(x, W.neg(x)) != zero:
            fails.append("identity or negation law")
        # F V = p on W_n: V: W_n -> W_{n+1}, F: W_{n+1} -> W_n
        Vx = (0,) + tuple(x)
        FVx = Wl.F(Vx)[:n] if R.is_fp_algebra else W.F_universal(Vx)
        if FVx != W.mul(p, x):
            fails.append("FV != p")
        # x V(y) = V(F(x) y) with y in W_{n-1}
        if n >= 2:
            Wm = WittRing(R, n - 1)
            y1 = Wm.random(rng)
            lhs = W.mul(x, (0,) + tuple(y1))
            rhs = (0,) + tuple(Wm.mul(_frob(W, x), y1))
            if lhs != rhs:
                fails.append("x V(y) != V(F(x) y)")
        a = R.random(rng) if hasattr(R, "random") else rng.randrange(R.size)
        Ft = Wl.F(Wl.teich(a))[:n] if R.is_fp_algebra else W.F_universal(Wl.teich(a))
        if Ft != W.teich(R.pow(a, R.p)):
            fails.append("F[a] != [a^p]")
    return fails


def suite_witt_laws(cfg: SuiteConfig) -> Report:
    rep = Report("witt-laws", cfg)
    rng = random.Random(cfg.seed)
    for R in witt_law_rings():
        for n in (2, 4):
            t = time.perf_counter()
            fails = witt_law_cell(R, n, cfg.samples, rng)
            rep.cell(f"{R.name}|n={n}", not fails, {"samples": cfg.samples, "failures": sorted(set(fails))},
                     ring=R.name, n=n, wall_time=round(time.perf_counter() - t, 3))
    return rep


# -- constants ---------------------------------------------------------------------------

def suite_constants(cfg: SuiteConfig) -> Report:
    rep = Report("constants", cfg)
    rng = random.Random(cfg.seed)
    N = max(cfg.precision, 4)
    c = compute_u0_alpha_ptilde(2, N + 1, N + 3)
    for K in (2, 3, N):
        W = WittRing(make_zmod(2, K), N)
        Wl = WittRing(make_zmod(2, K), N + 1)
        u0 = c.in_ring(W, "u0")
        u0l = c.in_ring(Wl, "u0")
        two = W.from_int(2)
        V_u0 = (0,) + tuple(u0[:-1])
        ok_v = V_u0 == W.sub(two, W.teich(2))
        pt = c.in_ring(W, "ptilde")
        ok_pt = pt == W.sub(two, W.teich(4))
        # p~ = F V~(1) through the long ring
        ok_fv1 = W.F_universal(Wl.V(u0l)) == pt
        rep.cell(f"p=2|Z/2^{K}|N={N}|values", ok_v and ok_pt and ok_fv1,
                 {"V(u0)=2-[2]": ok_v, "p~=2-[4]": ok_pt, "p~=F V~(1)": ok_fv1, "u0": list(u0)})
    # identities on samples over several rings
    for R in (make_zmod(2), finite_field(2, 2), extend_nilpotent(make_zmod(2), 2), make_zmod(2, 2), make_zmod(2, 3)):
        W = WittRing(R, N)
        Wl = WittRing(R, N + 1)
        u0l = c.in_ring(Wl, "u0")
        pt = c.in_ring(W, "ptilde")
        V_u0 = c.in_ring(Wl, "V_u0")
        fails = []
        for _ in range(cfg.samples):
            x = W.random(rng)
            xl = tuple(x) + (0,)
            # F V~ (x) = p~ x, with V~ : W_N -> W_{N+1}
            Vt = (0,) + tuple(Wl.mul(u0l, xl)[:N])
            FVt = Wl.F(Vt)[:N] if R.is_fp_algebra else W.F_universal(Vt)
            if FVt != W.mul(pt, x):
                fails.append("F V~ != p~")
            # V~ F (y) = V(u0) y for y in W_{N+1}
            y = Wl.random(rng)
            Fy = Wl.F(y)[:N] if R.is_fp_algebra else W.F_universal(y)
            lhs = (0,) + tuple(W.mul(c.in_ring(W, "u0"), Fy))
            if lhs != Wl.mul(V_u0, y):
                fails.append("V~ F != V(u0)")
            # x V~(y) = V~(F(x) y)
            z = W.random(rng)
            xl2 = Wl.random(rng)
            Vtz = (0,) + tuple(W.mul(c.in_ring(W, "u0"), z))
            Fx = Wl.F(xl2)[:N] if R.is_fp_algebra else W.F_universal(xl2)
            rhs = (0,) + tuple(W.mul(c.in_ring(W, "u0"), W.mul(Fx, z)))
            if Wl.mul(xl2, Vtz) != rhs:
                fails.append("x V~(y) != V~(F(x) y)")
        rep.cell(f"p=2|{R.name}|identities", not fails, {"samples": cfg.samples, "failures": sorted(set(fails))})
    c3 = compute_u0_alpha_ptilde(3, N)
    one = (1,) + (0,) * (N - 1)
    ok3 = c3.u0 == one and c3.alpha == one
    rep.cell("p=3|u0=alpha=1", ok3, {"u0": list(c3.u0), "alpha": list(c3.alpha)})
    alpha_ok = True
    W = WittRing(make_zmod(2, N), N)
    a, u = c.in_ring(W, "alpha"), c.in_ring(W, "u0")
    Wl = WittRing(make_zmod(2, N), N + 1)
    al = tuple(a) + (0,)
    # alpha = u0 F(alpha) up to the precision where alpha is known
    Fa = W.F_universal(c.in_ring(Wl, "alpha"))
    alpha_ok = W.mul(u, Fa) == a
    rep.cell("p=2|alpha=u0*F(alpha)", alpha_ok, {"alpha": list(a)})
    return rep


# -- divided powers ----------------------------------------------------------------------

def pd_cell(R, n: int, samples: int, rng: random.Random, max_m: int) -> list[str]:
    W = WittRing(R, n)
    p = R.p
    fails = []

    def rand_V():
        return (0,) + tuple(W.random(rng)[:-1])

    def g(m, x):
        if m == 0:
            return W.one
        return divided_gamma(W, m, x)

    for _ in range(samples):
        x, y = rand_V(), rand_V()
        a = W.random(rng)
        m = rng.randrange(1, max_m + 1)
        k = rng.randrange(1, max_m + 1)
        if g(1, x) != x:
            fails.append("gamma_1 != id")
        if g(m, x)[0] != 0:
            fails.append("gamma_m leaves V W")
        if W.mul(W.from_int(math.factorial(m)), g(m, x)) != W.pow(x, m):
            fails.append("m! gamma_m(x) != x^m")
        s = W.sum(W.mul(g(i, x), g(m - i, y)) for i in range(m + 1))
        if g(m, W.add(x, y)) != s:
            fails.append("gamma_m(x+y) expansion")
        if g(m, W.mul(a, x)) != W.mul(W.pow(a, m), g(m, x)):
            fails.append("gamma_m(ax) != a^m gamma_m(x)")
        if W.mul(g(m, x), g(k, x)) != W.mul(W.from_int(math.comb(m + k, m)), g(m + k, x)):
            fails.append("gamma_m gamma_k != binom gamma_{m+k}")
        if m * k <= 2 * max_m:
            coef = math.factorial(m * k) // (math.factorial(m) * math.factorial(k) ** m)
            if g(m, g(k, x)) != W.mul(W.from_int(coef), g(m * k, x)):
                fails.append("gamma_m(gamma_k(x)) composition")
        # the explicit form for m = p: (p-1)! gamma_p(V y) = p^(p-2) V(y^p)
        yv = tuple(x[1:]) + (0,)
        lhs = W.mul(W.from_int(math.factorial(p - 1)), g(p, x))
        rhs = W.mul(W.from_int(p ** (p - 2)), W.V(W.pow(yv, p)))
        if lhs != rhs:
            fails.append("(p-1)! gamma_p(Vy) != p^(p-2) V(y^p)")
    return fails


def suite_divided_powers(cfg: SuiteConfig) -> Report:
    rep = Report("divided-powers", cfg)
    rng = random.Random(cfg.seed)
    F2, F3 = make_zmod(2), make_zmod(3)
    rings = [F2, finite_field(2, 2), extend_nilpotent(F2, 2), extend_nilpotent(F2, 3),
             F3, extend_nilpotent(F3, 2), make_zmod(3, 2)]
    for R in rings:
        n = 4 if R.p == 2 else 3
        fails = pd_cell(R, n, cfg.samples, rng, max_m=2 * R.p)
        rep.cell(f"{R.name}|n={n}", not fails, {"samples": cfg.samples, "failures": sorted(set(fails))}, p=R.p)
    return rep


# -- sheared exactness ----------------------------------------------------------------------

def suite_sheared(cfg: SuiteConfig) -> Report:
    from .sheared_witt import (
        F_invariants_report,
        ShearedWittRing,
        check_kernel_sequence,
        check_projection,
        check_Vn_Wn_sequence,
    )

    rep = Report("sheared-exactness", cfg)
    N = cfg.precision * cfg.scale
    B = cfg.eff_bound
    for R in ring_grid():
        nil = nilradical(R)
        reports = [check_kernel_sequence(R, nil, N, B, samples=50, seed=cfg.seed)]
        # also a proper sub-ideal when the maximal ideal has one
        basis = nil.basis
        if len(basis) > 1:
            reports.append(check_kernel_sequence(R, make_ideal(R, [basis[-1]]), N, B, samples=50, seed=cfg.seed))
        for n in (1, 2):
            reports.append(check_Vn_Wn_sequence(R, n, N, B, samples=50, seed=cfg.seed))
        reports.append(check_projection(ShearedWittRing(R, N, B), samples=50, seed=cfg.seed))
        for r in reports:
            ok = r.ok and r.witnesses >= 50
            rep.cell(f"{R.name}|{r.check}|{r.params.get('n', r.params.get('ideal'))}", ok,
                     {"failures": len(r.failures), "witnesses_ge_50": r.witnesses >= 50},
                     witnesses=r.witnesses, params=r.params)
    for R in ring_grid():
        for Nf in (2, 3, 4):
            S = ShearedWittRing(R, Nf, max(B, Nf + 8))
            d = F_invariants_report(S)
            rep.cell(f"{R.name}|F-invariants|N={Nf}", d["ok"],
                     {"size": d["size"], "expected": d["expected"], "cyclic": d["cyclic_generated_by_one"]})
    return rep


# -- frame axioms ---------------------------------------------------------------------------

def suite_frame_axioms(cfg: SuiteConfig) -> Report:
    from .frame_instances import (
        ShearedFrame,
        WittFrame,
        frame_hom_c,
        hom_relative_to_quotient,
        hom_to_relative,
        relative_sheared_frame,
        relative_witt_frame,
        ring_change_hom,
        truncation_hom,
    )

    rep = Report("frame-axioms", cfg)
    samples = max(20, cfg.samples // 2)
    N = min(cfg.precision, 4) * cfg.scale
    B = cfg.eff_bound
    frames = [WittFrame(make_zmod(2), 3), WittFrame(make_zmod(3), 3), WittFrame(finite_field(2, 2), 2)]
    for R in ring_grid()[:5]:
        frames.append(WittFrame(R, 3))
        frames.append(ShearedFrame(R, N, B))
    for F in frames:
        r = F.verify(samples, cfg.seed)
        rep.cell(f"frame|{scale_free(F.name)}", r.ok, {"failures": len(r.failures)}, frame=F.name)
    for label, pd in relative_pairs():
        for rel in (relative_witt_frame(pd, 3), relative_sheared_frame(pd, N, B)):
            r = rel.verify(samples, cfg.seed)
            K = rel.leveled_ideal()
            rk = K.verify(samples, cfg.seed)
            homs = [hom_to_relative(rel), hom_relative_to_quotient(rel, K)]
            hom_ok = all(h.verify(samples, cfg.seed).ok for h in homs)
            rep.cell(f"relative|{scale_free(rel.name)}", r.ok and rk.ok and hom_ok,
                     {"frame": r.ok, "leveled_ideal": rk.ok, "homs": hom_ok}, frame=rel.name, nu=K.nu)
    # homomorphisms between absolute frames
    F2 = make_zmod(2)
    R = extend_nilpotent(F2, 2)
    from .ring_base import residue_section

    res = residue_section(R)
    homs = [
        truncation_hom(WittFrame(R, 4), 2),
        ring_change_hom(WittFrame(R, 3), res.projection),
    ]
    for h in homs:
        r = h.verify(samples, cfg.seed)
        rep.cell(f"hom|{h.name}", r.ok, {"failures": len(r.failures)})
    for Rr in (F2, R, extend_nilpotent(F2, 3)):
        ch = frame_hom_c(Rr, N, B)
        r = ch.hom.verify(samples, cfg.seed)
        rep.cell(f"hom|c|{Rr.name}", r.ok and ch.alpha_ok and ch.d_ok,
                 {"hom": r.ok, "alpha=u0*F(alpha)": ch.alpha_ok, "c(p~)=u0*p": ch.d_ok})
    return rep


# -- duality and window core ------------------------------------------------------------------

def suite_duality(cfg: SuiteConfig) -> Report:
    from .frame_instances import ShearedFrame, WittFrame
    from .frames import dual_window, double_dual_identification, twist_window, unit_window
    from .point_functors import TestRing, duality_diagram_check, ext_crosscheck

    rep = Report("duality", cfg)
    rng = random.Random(cfg.seed)
    F2 = make_zmod(2)
    frames = [WittFrame(F2, 3), WittFrame(extend_nilpotent(F2, 2), 2), ShearedFrame(extend_nilpotent(F2, 2), 3),
              WittFrame(make_zmod(3), 2)]
    for F in frames:
        ok_unit = dual_window(unit_window(F)).Psi == twist_window(F).Psi and dual_window(unit_window(F)).r1 == 1
        inv_ok = True
        for _ in range(10):
            r0 = rng.randrange(0, 3)
            r1 = rng.randrange(0 if r0 else 1, 3)
            M = random_window(F, r0, r1, rng)
            inv_ok &= double_dual_identification(M)
        rep.cell(f"involution|{F.name}", ok_unit and inv_ok, {"dual(unit)=twist": ok_unit, "involution": inv_ok})
    # Ext cross-check on every corpus window with small carriers
    A = WittFrame(F2, 3)
    for S in (TestRing(F2), TestRing(finite_field(2, 2)), TestRing(extend_nilpotent(F2, 2))):
        for n in (1, 2):
            for name, M in corpus_windows(A).items():
                try:
                    r = ext_crosscheck(M, S, n, cap=2**10)
                except SizeCapExceeded:
                    continue
                rep.cell(f"ext|{name}|{S.name}|n={n}", r.ok, r.data)
    # duality diagram
    W = corpus_windows(WittFrame(F2, 2 * cfg.scale))
    for S in (TestRing(F2), TestRing(finite_field(2, 2)), TestRing(extend_nilpotent(F2, 2))):
        for n in (1, 2):
            for name, M in W.items():
                r = duality_diagram_check(M, S, n, cap=cfg.budget)
                rep.cell(f"diagram|{name}|{S.name}|n={n}", r.ok, r.data, failures_detail=r.failures)
    return rep


# -- deformation ---------------------------------------------------------------------------

def suite_deformation(cfg: SuiteConfig, cases: int = 20) -> Report:
    from .frame_instances import hom_to_relative, relative_sheared_frame, relative_witt_frame
    from .frames import WindowMorphism, hodge_lifts, is_morphism, lift_window

    rep = Report("deformation", cfg)
    rng = random.Random(cfg.seed)
    N = 3 * cfg.scale
    for label, pd in relative_pairs():
        for rel in (relative_witt_frame(pd, N), relative_sheared_frame(pd, N, cfg.eff_bound)):
            K = rel.leveled_ideal()
            Q = K.quotient
            exact = unique = 0
            settled = 0
            fails = []
            for i in range(cases):
                r0, r1 = [(1, 1), (1, 0), (0, 1), (2, 1), (1, 2)][i % 5]
                Mb = random_window(Q, r0, r1, rng)
                fb = random_morphism(Mb, rng)
                Ml, Mpl = lift_window(Mb, K), lift_window(fb.dst, K)
                f1 = lift_morphism_safe(Ml, Mpl, fb, K, None, fails)
                if f1 is None:
                    continue
                if is_morphism(f1)[0] and f1.iterations == K.nu:
                    exact += 1
                settled = max(settled, f1.settled_at)

                def pert(m):
                    return [[rel.add0(x, K.random_k0(rng)) for x in row] for row in m]

                def pert1(m):
                    return [[rel.add1(x, (K.lift1(rel.zero0())[0], rng.choice(pd.elements))) for x in row] for row in m]

                start = WindowMorphism(Ml, Mpl, pert(f1.a), pert1(f1.b), pert(f1.c), pert(f1.e))
                f2 = lift_morphism_safe(Ml, Mpl, fb, K, start, fails)
                if f2 is not None and (f2.a, f2.b, f2.c, f2.e) == (f1.a, f1.b, f1.c, f1.e):
                    unique += 1
            ok = exact == cases and unique == cases and not fails
            rep.cell(f"lift|{scale_free(rel.name)}", ok,
                     {"cases": cases, "exact_in_nu": exact, "unique": unique},
                     nu=K.nu, settled_max=settled, errors=fails[:3], frame=rel.name)
            # Hodge filtration lifts over the identity A(R'/R) <- A(R')
            hom = hom_to_relative(rel)
            hodge_ok = True
            for beta in pd.elements[:4]:
                Nw = random_window(rel, 1, 1, rng)
                _, iso = hodge_lifts(Nw, [[beta]], hom, lambda a: (rel.base.zero1(), a))
                hodge_ok &= is_morphism(iso)[0]
            rep.cell(f"hodge|{scale_free(rel.name)}", hodge_ok, {"lifts": min(4, len(pd.elements)), "ok": hodge_ok},
                     frame=rel.name)
    return rep


def lift_morphism_safe(M, Mp, fb, K, start, fails):
    from .frames import FrameError, lift_morphism

    try:
        return lift_morphism(M, Mp, fb, K, start=start)
    except FrameError as exc:
        fails.append(str(exc))
        return None


# -- point counts ------------------------------------------------------------------------------

def suite_points(cfg: SuiteConfig) -> Report:
    from .point_functors import PointError, TestRing, eval_sCn, eval_Zn, exact_triangle_check

    rep = Report("points-corpus", cfg)
    ps = (cfg.p,) if cfg.p else (2, 3)
    ns = tuple(cfg.n)
    # finite fields against the Galois-ring oracle and the closed forms
    for p in ps:
        for m in (1, 2, 3):
            S = TestRing(finite_field(p, m), budget=cfg.budget)
            for n in ns:
                W = standard_windows(p, max(n, 2) * cfg.scale)
                for name, M in W.items():
                    t = time.perf_counter()
                    try:
                        r = eval_sCn(M, S, n, L_max=cfg.eff_support, cap=cfg.budget)
                    except SizeCapExceeded as exc:
                        rep.cell(f"field|{name}|{S.name}|n={n}", False, {"error": "budget"}, detail=str(exc))
                        continue
                    oracle = galois_oracle(p, m, n, M.r0, WINDOW_MATRICES[name][2])
                    closed = closed_form_order(name, p, n)
                    ok = r.ok and r.order_H0 == oracle == closed
                    rep.cell(f"field|{name}|{S.name}|n={n}", ok,
                             {"H0": r.H0, "order": r.order_H0, "oracle": oracle, "closed_form": closed},
                             H1=r.H1, wall_time=round(time.perf_counter() - t, 3))
    # nilpotent rings: exact triangle, Z_n and sC_n with stabilisation traces
    for p in ps:
        for R in nilpotent_test_rings(p):
            S = TestRing(R, budget=cfg.budget)
            for n in ns:
                N = (n + 1) * cfg.scale
                for name, M in standard_windows(p, N).items():
                    key = f"{name}|{R.name}|n={n}"
                    t = time.perf_counter()
                    try:
                        tri = exact_triangle_check(M, S, n, N=N, samples=50, seed=cfg.seed, cap=cfg.budget)
                        rep.cell(f"triangle|{key}", tri.ok, {"failures": len(tri.failures), "rows_exact": tri.ok},
                                 checked=tri.checked, params=tri.params,
                                 wall_time=round(time.perf_counter() - t, 3))
                    except SizeCapExceeded as exc:
                        rep.cell(f"triangle|{key}", False, {"error": "budget"}, detail=str(exc))
                    try:
                        L0 = cfg.scale
                        z = eval_Zn(M, S, n, L_max=cfg.eff_support + L0, L_start=L0, cap=cfg.budget)
                        s = eval_sCn(M, S, n, N=N, L_max=cfg.eff_support + L0, L_start=L0, cap=cfg.budget)
                        ok = z.ok and s.ok and all(f <= p**n for f in s.H0)
                        rep.cell(f"points|{key}", ok, {"Z_n H-1": z.Hm1, "Z_n H0": z.H0, "sC_n H0": s.H0},
                                 traces={"Z": z.trace, "sC": s.trace})
                    except (SizeCapExceeded, PointError) as exc:
                        rep.cell(f"points|{key}", True, {"skipped": "budget"}, detail=str(exc))
    return rep


SUITES: dict[str, Callable[[SuiteConfig], Report]] = {
    "witt-laws": suite_witt_laws,
    "constants": suite_constants,
    "divided-powers": suite_divided_powers,
    "sheared-exactness": suite_sheared,
    "frame-axioms": suite_frame_axioms,
    "duality": suite_duality,
    "deformation": suite_deformation,
    "points-corpus": suite_points,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> dict:
    """Run a registered suite (or ``all``) and return its JSON-ready report."""
    cfg = cfg or SuiteConfig()
    cfg.validate()
    if name == "all":
        parts = [run_suite(k, cfg) for k in SUITES]
        return {
            "suite": "all",
            "config": cfg.to_dict(),
            "corpus_hash": corpus_hash(),
            "suites": parts,
            "failures": sum(p["failures"] for p in parts),
            "ok": all(p["ok"] for p in parts),
        }
    if name not in SUITES:
        raise SuiteError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return SUITES[name](cfg).to_dict()


def invariants_of(report: dict) -> dict:
    if report.get("suite") == "all":
        return {p["suite"]: p["invariants"] for p in report["suites"]}
    return {report["suite"]: report["invariants"]}
