"""Concrete frames: truncated Witt, sheared Witt, and their relative versions
for pd thickenings R' -> R = R'/a, plus the frame homomorphisms between them.

All carriers are finite: Witt frames work at a finite length n and sheared
frames at a precision N.  In characteristic p the unit u0 maps to 1, so the
sheared frame at precision N has tau = V~ = V and d = p~ = p.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .frames import Frame, FrameError, FrameHom, LeveledIdeal
from .ring_base import FpkAlgebra, RingHom, RingIdeal, make_ideal, make_quotient, set_section
from .sheared_witt import ShearedWitt, ShearedWittRing
from .witt import WittRing, compute_u0_alpha_ptilde


# -- truncated Witt frame ----------------------------------------------------------

class WittFrame(Frame):
    """W_n(R) with A1 = F_* W_n(R), tau = V, sigma1 = id, sigma0 = F, d = p."""

    kind = "witt-n"

    def __init__(self, R: FpkAlgebra, n: int, name: str | None = None):
        if R.k != 1:
            raise FrameError("truncated Witt frames need an F_p-algebra (k = 1)")
        self.R = R
        self.n = n
        self.p = R.p
        self.W = WittRing(R, n)
        self.base_ring = R
        self.d = self.W.from_int(self.p)
        self.name = name or f"W_{n}({R.name})"
        self._frob_image = {R.pow(a, R.p) for a in R.elements()}

    # A0
    def zero0(self): return self.W.zero
    def one0(self): return self.W.one
    def add0(self, x, y): return self.W.add(x, y)
    def neg0(self, x): return self.W.neg(x)
    def sub0(self, x, y): return self.W.sub(x, y)
    def mul0(self, x, y): return self.W.mul(x, y)
    def from_int0(self, c): return self.W.from_int(c)
    def is_unit0(self, x): return self.R.is_unit(x[0])
    def inv0(self, x): return self.W.inverse(x)
    def random0(self, rng): return self.W.random(rng)
    def elements0(self): return self.W.elements()

    def in_pA0(self, x) -> bool:
        # p W_n(R) = V F W_n(R)
        return x[0] == 0 and all(a in self._frob_image for a in x[1:])

    # A1
    def zero1(self): return self.W.zero
    def add1(self, x, y): return self.W.add(x, y)
    def neg1(self, x): return self.W.neg(x)
    def act(self, a, x): return self.W.mul(self.W.F(a), x)
    def random1(self, rng): return self.W.random(rng)
    def elements1(self): return self.W.elements()

    # structure
    def tau(self, x): return self.W.V(x)
    def sigma0(self, a): return self.W.F(a)
    def sigma1(self, x): return tuple(x)
    def proj(self, a): return a[0]

    def encode0(self, a): return list(a)
    def decode0(self, v): return tuple(int(t) for t in v)
    def encode1(self, x): return list(x)
    def decode1(self, v): return tuple(int(t) for t in v)

    # Witt coordinates (shared with the sheared frame)
    def to_witt(self, a): return tuple(a)
    def from_witt(self, w): return tuple(w)

    def describe(self) -> dict:
        return {"frame": self.name, "kind": self.kind, "p": self.p, "ring": self.R.name, "n": self.n}


def truncated_witt_frame(R: FpkAlgebra, n: int) -> WittFrame:
    return WittFrame(R, n)


# -- sheared frame ---------------------------------------------------------------------

class ShearedFrame(Frame):
    """sW(R) at precision N: A1 = F_* sW(R), tau = V~, sigma1 = id, sigma0 = F, d = p~."""

    kind = "sheared"

    def __init__(self, R: FpkAlgebra, N: int, B: int | None = None, name: str | None = None):
        self.S = ShearedWittRing(R, N, B)
        self.R = R
        self.n = N
        self.p = R.p
        self.base_ring = R
        self.d = self.S.ptilde()
        self.name = name or f"sW({R.name};N={N})"
        self._frob_image = {R.pow(a, R.p) for a in R.elements()}

    def zero0(self): return self.S.zero
    def one0(self): return self.S.one
    def add0(self, x, y): return self.S.s_add(x, y)
    def neg0(self, x): return self.S.s_neg(x)
    def sub0(self, x, y): return self.S.s_sub(x, y)
    def mul0(self, x, y): return self.S.s_mul(x, y)
    def from_int0(self, c): return self.S.from_int(c)
    def is_unit0(self, x): return self.R.is_unit(self.S.projection(x))
    def inv0(self, x): return self.S.split(self.S.W.inverse(self.S.embed(x)))
    def random0(self, rng): return self.S.random(rng)
    def elements0(self): return (self.S.split(w) for w in self.S.W.elements())

    def in_pA0(self, x) -> bool:
        w = self.S.embed(x)
        return w[0] == 0 and all(a in self._frob_image for a in w[1:])

    def zero1(self): return self.S.zero
    def add1(self, x, y): return self.S.s_add(x, y)
    def neg1(self, x): return self.S.s_neg(x)
    def act(self, a, x): return self.S.s_mul(self.S.s_F(a), x)
    def random1(self, rng): return self.S.random(rng)
    def elements1(self): return self.elements0()

    def tau(self, x): return self.S.s_Vtilde(x)
    def sigma0(self, a): return self.S.s_F(a)
    def sigma1(self, x): return x
    def proj(self, a): return self.S.projection(a)

    def encode0(self, a): return list(self.S.embed(a))
    def decode0(self, v): return self.S.split(tuple(int(t) for t in v))
    encode1 = encode0
    decode1 = decode0

    def to_witt(self, a): return self.S.embed(a)
    def from_witt(self, w): return self.S.split(tuple(w))

    def describe(self) -> dict:
        return {"frame": self.name, "kind": self.kind, "p": self.p, "ring": self.R.name, "N": self.n, "B": self.S.B}


def sheared_frame(R: FpkAlgebra, precision: int, bound: int | None = None) -> ShearedFrame:
    return ShearedFrame(R, precision, bound)


# -- divided powers -----------------------------------------------------------------------

@dataclass(frozen=True)
class DividedWittCoords:
    """c_{n,i} = p^(i-n) (p^(n-i))! for 0 <= i <= n < length."""

    p: int
    length: int

    def c(self, n: int, i: int) -> int:
        m = n - i
        num = math.factorial(self.p**m)
        q, r = divmod(num, self.p**m)
        if r:
            raise ArithmeticError("divided Witt coefficient is not integral")
        return q

    def table(self) -> list[list[int]]:
        return [[self.c(n, i) for i in range(n + 1)] for n in range(self.length)]


class PdIdeal:
    """A nilpotent ideal a of R' with divided powers gamma_m, m <= max_m.

    ``gamma`` maps (m, x) to gamma_m(x) for x in a; gamma_m is taken to vanish
    for m > max_m.  The default is the trivial structure on a square-zero
    ideal: gamma_m = 0 for m >= 2.
    """

    def __init__(self, R: FpkAlgebra, ideal: RingIdeal, gamma: Callable[[int, int], int] | None = None,
                 max_m: int | None = None, name: str = "a"):
        if R.k != 1:
            raise FrameError("pd ideals are only supported over F_p-algebras")
        self.R = R
        self.ideal = ideal
        self.name = name
        self.elements = sorted(ideal.elements())
        self._set = set(self.elements)
        for x in self.elements:
            if not R.is_nilpotent(x):
                raise FrameError("ideal is not nilpotent")
        if gamma is None:
            for x in self.elements:
                for y in self.elements:
                    if R.mul(x, y):
                        raise FrameError("trivial divided powers need a square-zero ideal")
            self.max_m = 1
            self._table = {1: {x: x for x in self.elements}}
        else:
            self.max_m = max_m if max_m is not None else R.p
            self._table = {m: {x: gamma(m, x) for x in self.elements} for m in range(1, self.max_m + 1)}
        self.trivial = gamma is None

    @classmethod
    def from_basis(cls, R: FpkAlgebra, ideal: RingIdeal, basis_gammas: dict[int, list[int]], name: str = "a") -> "PdIdeal":
        """Extend gamma from an F_p-basis of a by gamma_m(sum c_i b_i) = sum prod c_i^m_i gamma_m_i(b_i)."""
        basis = list(basis_gammas)
        max_m = max(len(v) for v in basis_gammas.values())
        p = R.p
        coeffs: dict[int, tuple[int, ...]] = {}
        for cs in itertools.product(range(p), repeat=len(basis)):
            x = R.sum(R.scale(c, b) for c, b in zip(cs, basis))
            coeffs.setdefault(x, cs)

        def g1(b, m):
            if m == 0:
                return R.one
            v = basis_gammas[b]
            return v[m - 1] if m <= len(v) else 0

        def gamma(m, x):
            cs = coeffs[x]
            total = 0
            for parts in _compositions(m, len(basis)):
                term = R.one
                for c, b, mi in zip(cs, basis, parts):
                    if mi:
                        term = R.mul(term, R.scale(pow(c, mi, p), g1(b, mi)))
                total = R.add(total, term)
            return total

        if len(coeffs) != len(ideal.elements()):
            raise FrameError("basis does not span the ideal")
        return cls(R, ideal, gamma, max_m, name)

    def gamma(self, m: int, x: int) -> int:
        if x not in self._set:
            raise FrameError("element is not in the pd ideal")
        if m == 0:
            return self.R.one
        if m > self.max_m:
            return 0
        return self._table[m][x]

    def verify(self) -> list[str]:
        """pd axioms exhaustively on the ideal; returns failure descriptions."""
        R, g, M = self.R, self.gamma, self.max_m
        out = []
        top = max(M, 1) * 2
        els = self.elements
        for x in els:
            if g(1, x) != x:
                out.append(f"gamma_1({x}) != {x}")
            for m in range(1, top + 1):
                if g(m, x) not in self._set:
                    out.append(f"gamma_{m}({x}) outside ideal")
            for m in range(top + 1):
                for n in range(top + 1 - m):
                    lhs = R.mul(g(m, x), g(n, x))
                    rhs = R.scale(math.comb(m + n, m), g(m + n, x))
                    if lhs != rhs:
                        out.append(f"gamma_{m} gamma_{n} != binom gamma_{m + n} at {x}")
            for m in range(1, top + 1):
                for n in range(1, top + 1):
                    if m * n > top:
                        continue
                    c = math.factorial(m * n) // (math.factorial(m) * math.factorial(n) ** m)
                    if g(m, g(n, x)) != R.scale(c, g(m * n, x)):
                        out.append(f"gamma_{m}(gamma_{n}) composition fails at {x}")
            for a in R.elements():
                ax = R.mul(a, x)
                for m in range(top + 1):
                    if g(m, ax) != R.mul(R.pow(a, m), g(m, x)):
                        out.append(f"gamma_{m}(a x) != a^m gamma_{m}(x)")
                        break
            for y in els:
                s = R.add(x, y)
                for m in range(top + 1):
                    rhs = R.sum(R.mul(g(i, x), g(m - i, y)) for i in range(m + 1))
                    if g(m, s) != rhs:
                        out.append(f"gamma_{m}(x+y) sum formula fails")
                        break
        return out[:20]


def _compositions(m: int, k: int):
    if k == 0:
        if m == 0:
            yield ()
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, k - 1):
            yield (first,) + rest


def trivial_pd(R: FpkAlgebra, generators: Sequence[int], name: str = "a") -> PdIdeal:
    return PdIdeal(R, make_ideal(R, generators), None, name=name)


class DividedGhost:
    """w'_n(x) = sum_i c_{n,i} gamma_{p^(n-i)}(x_i) on W_N(a) and its inverse."""

    def __init__(self, pd: PdIdeal, N: int):
        self.pd = pd
        self.N = N
        self.R = pd.R
        self.coords = DividedWittCoords(pd.R.p, N)
        p = pd.R.p
        # coefficients that survive in characteristic p
        self._terms = [
            [(i, self.coords.c(n, i) % p, p ** (n - i)) for i in range(n + 1) if self.coords.c(n, i) % p]
            for n in range(N)
        ]

    def forward(self, x: Sequence[int]) -> tuple[int, ...]:
        R, g = self.R, self.pd.gamma
        return tuple(
            R.sum(R.scale(c, g(m, x[i])) for i, c, m in terms) for terms in self._terms
        )

    def inverse(self, w: Sequence[int]) -> tuple[int, ...]:
        R, g = self.R, self.pd.gamma
        x: list[int] = []
        for n, terms in enumerate(self._terms):
            acc = w[n]
            for i, c, m in terms:
                if i < n:
                    acc = R.sub(acc, R.scale(c, g(m, x[i])))
            x.append(acc)
        if self.forward(x) != tuple(w):
            raise FrameError("divided ghost inversion left a residual")
        return tuple(x)

    def i_map(self, a: int) -> tuple[int, ...]:
        return self.inverse((a,) + (0,) * (self.N - 1))


# -- relative frames --------------------------------------------------------------------------

class RelativeFrame(Frame):
    """A(R'/R): A0 as for the base frame, A1 = (base A1) + a with tau = tau + i, sigma1 = sigma1 + 0."""

    def __init__(self, base: Frame, pd: PdIdeal, name: str | None = None):
        if base.base_ring != pd.R:
            raise FrameError("pd ideal lives over a different ring")
        self.base = base
        self.pd = pd
        self.p = base.p
        self.n = base.n
        self.Rp = pd.R
        self.kind = "rel-" + base.kind
        self.dg = DividedGhost(pd, base.n)
        Q, proj = make_quotient(pd.R, pd.ideal, name=f"{pd.R.name}/{pd.name}")
        self.base_ring = Q
        self.quot = proj
        self.d = base.d
        self.name = name or f"{base.name}/{pd.name}"
        self._i_cache: dict[int, object] = {}

    def i(self, a: int):
        v = self._i_cache.get(a)
        if v is None:
            v = self.base.from_witt(self.dg.i_map(a))
            self._i_cache[a] = v
        return v

    # A0 delegates
    def zero0(self): return self.base.zero0()
    def one0(self): return self.base.one0()
    def add0(self, x, y): return self.base.add0(x, y)
    def neg0(self, x): return self.base.neg0(x)
    def sub0(self, x, y): return self.base.sub0(x, y)
    def mul0(self, x, y): return self.base.mul0(x, y)
    def from_int0(self, c): return self.base.from_int0(c)
    def is_unit0(self, x): return self.base.is_unit0(x)
    def inv0(self, x): return self.base.inv0(x)
    def random0(self, rng): return self.base.random0(rng)
    def elements0(self): return self.base.elements0()
    def in_pA0(self, x): return self.base.in_pA0(x)

    # A1 = base A1 + a
    def zero1(self): return (self.base.zero1(), 0)
    def add1(self, x, y): return (self.base.add1(x[0], y[0]), self.Rp.add(x[1], y[1]))
    def neg1(self, x): return (self.base.neg1(x[0]), self.Rp.neg(x[1]))

    def act(self, a, x):
        a0 = self.base.to_witt(a)[0]
        return (self.base.act(a, x[0]), self.Rp.mul(a0, x[1]))

    def random1(self, rng): return (self.base.random1(rng), rng.choice(self.pd.elements))

    def elements1(self):
        return itertools.product(list(self.base.elements1()), self.pd.elements)

    def tau(self, x): return self.base.add0(self.base.tau(x[0]), self.i(x[1]))
    def sigma0(self, a): return self.base.sigma0(a)
    def sigma1(self, x): return self.base.sigma1(x[0])
    def proj(self, a): return self.quot(self.base.proj(a))

    def encode0(self, a): return self.base.encode0(a)
    def decode0(self, v): return self.base.decode0(v)
    def encode1(self, x): return {"x": self.base.encode1(x[0]), "a": x[1]}
    def decode1(self, v): return (self.base.decode1(v["x"]), int(v["a"]))

    def to_witt(self, a): return self.base.to_witt(a)
    def from_witt(self, w): return self.base.from_witt(w)

    def describe(self) -> dict:
        d = self.base.describe()
        d.update({"frame": self.name, "kind": self.kind, "pd_ideal": [self.Rp.coords(b) for b in self.pd.ideal.basis],
                  "pd_trivial": self.pd.trivial})
        return d

    # the leveled ideal K = (W(a), its canonical tau-preimage)
    def leveled_ideal(self, quotient: Frame | None = None) -> LeveledIdeal:
        N = self.n
        Rp = self.Rp
        aset = set(self.pd.elements)
        Q = self.base_ring
        quotient = quotient or _matching_quotient_frame(self.base, Q)
        if quotient.base_ring != Q:
            raise FrameError("quotient frame does not live over R'/a")
        sec = set_section(self.quot)
        base, qf = self.base, quotient

        def contains0(k):
            return all(c in aset for c in base.to_witt(k))

        def tau_inv(k):
            w = self.dg.forward(base.to_witt(k))
            x = self.dg.inverse(tuple(w[1:]) + (0,))
            return (base.from_witt(x), w[0])

        def reduce0(a):
            return qf.from_witt(tuple(self.quot(c) for c in base.to_witt(a)))

        def reduce1(x):
            return reduce0(x[0])

        def lift0(a):
            return base.from_witt(tuple(sec[c] for c in qf.to_witt(a)))

        def lift1(x):
            return (lift0(x), 0)

        def random_k0(rng):
            return base.from_witt(tuple(rng.choice(self.pd.elements) for _ in range(N)))

        return LeveledIdeal(self, qf, contains0, tau_inv, N, reduce0, reduce1, lift0, lift1, random_k0,
                            name=f"W({self.pd.name})")


def _matching_quotient_frame(base: Frame, Q: FpkAlgebra) -> Frame:
    if isinstance(base, ShearedFrame):
        return ShearedFrame(Q, base.n, base.S.B)
    return WittFrame(Q, base.n)


def relative_witt_frame(pd: PdIdeal, n: int) -> RelativeFrame:
    return RelativeFrame(WittFrame(pd.R, n), pd)


def relative_sheared_frame(pd: PdIdeal, precision: int, bound: int | None = None) -> RelativeFrame:
    if pd.R.p == 2 and pd.R.k != 1:
        raise FrameError("relative frames at p = 2 need an F_p-algebra")
    return RelativeFrame(ShearedFrame(pd.R, precision, bound), pd)


# -- frame homomorphisms ----------------------------------------------------------------------

def hom_to_relative(rel: RelativeFrame) -> FrameHom:
    """A(R') -> A(R'/R): identity on A0, x -> (x, 0) on A1, u = 1."""
    base = rel.base
    return FrameHom(base, rel, lambda a: a, lambda x: (x, 0), rel.one0(), name="abs->rel")


def hom_relative_to_quotient(rel: RelativeFrame, K: LeveledIdeal | None = None) -> FrameHom:
    """A(R'/R) -> A(R), the quotient by the leveled ideal; strict."""
    K = K or rel.leveled_ideal()
    Q = K.quotient
    return FrameHom(rel, Q, K.reduce0, K.reduce1, Q.one0(), name="rel->quot")


def truncation_hom(src: WittFrame, n: int) -> FrameHom:
    """W_N(R) -> W_n(R), n <= N."""
    if n > src.n:
        raise FrameError("cannot truncate to a longer length")
    dst = WittFrame(src.R, n)
    return FrameHom(src, dst, lambda a: tuple(a[:n]), lambda x: tuple(x[:n]), dst.one0(), name=f"trunc{n}")


def ring_change_hom(src: WittFrame, phi: RingHom, n: int | None = None, dst: WittFrame | None = None) -> FrameHom:
    """W_N(R) -> W_n(S) induced by a ring map phi: R -> S and truncation."""
    n = src.n if n is None else n
    if n > src.n:
        raise FrameError("target length exceeds source length")
    dst = dst or WittFrame(phi.dst, n)

    def g(a):
        return tuple(phi(c) for c in a[:n])

    return FrameHom(src, dst, g, g, dst.one0(), name=f"ring->{phi.dst.name}")


@dataclass
class CHom:
    hom: FrameHom
    u0: tuple
    alpha: tuple
    alpha_ok: bool
    d_ok: bool


def frame_hom_c(R: FpkAlgebra, precision: int, bound: int | None = None) -> CHom:
    """(c, u0): sW(R) -> W(R) at precision, with alpha = prod F^m(u0)."""
    src = ShearedFrame(R, precision, bound)
    dst = WittFrame(R, precision)
    W = dst.W
    consts = compute_u0_alpha_ptilde(R.p, precision, max(precision, R.k))
    u0 = consts.in_ring(W, "u0")
    alpha = consts.in_ring(W, "alpha")
    S = src.S
    hom = FrameHom(src, dst, S.embed, lambda x: W.mul(u0, S.embed(x)), u0, name="c")
    alpha_ok = W.mul(u0, W.F(alpha)) == alpha
    d_ok = S.embed(src.d) == W.mul(u0, dst.d)
    return CHom(hom, u0, alpha, alpha_ok, d_ok)


def quotient_frame_of(rel: RelativeFrame) -> Frame:
    return rel.leveled_ideal().quotient


def random_pd_element(pd: PdIdeal, rng: random.Random) -> int:
    return rng.choice(pd.elements)
