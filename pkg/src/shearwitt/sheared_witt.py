"""Sheared Witt vectors of finite Artinian local F_p-algebras.

For R local Artinian with perfect residue field k and ring section s: k -> R,
the sheared Witt vectors sit inside W(R) as W(k) + W^(m) with m = Nil(R), and
every element splits uniquely as W(s)(lambda) + eta.  Since
sW(R) / V~^N sW(R) = W_N(R) on points, an element at precision N is carried
as lambda in W_N(k) together with eta in W^(m) truncated below index N.  The
support bound B only guards sparse inputs that arrive with longer support.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .ring_base import (
    FpkAlgebra,
    RingError,
    RingHom,
    RingIdeal,
    is_perfect_field,
    make_quotient,
    residue_section,
    set_section,
)
from .witt import HatWittVec, WittError, WittRing


class ShearedError(ValueError):
    pass


class SupportOverflow(ShearedError):
    def __init__(self, support: int, bound: int):
        super().__init__(f"not representably sheared at this bound: support {support} > B={bound}")
        self.support = support
        self.bound = bound


@dataclass(frozen=True)
class ShearedWitt:
    ring: "ShearedWittRing"
    lam: tuple[int, ...]
    eta: HatWittVec

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ShearedWitt)
            and self.ring is other.ring
            and self.lam == other.lam
            and self.eta == other.eta
        )

    def __hash__(self) -> int:
        return hash((self.lam, self.eta))

    def to_dict(self) -> dict:
        return {"lambda": list(self.lam), "eta": {str(i): a for i, a in sorted(self.eta.entries.items())}}


class ShearedWittRing:
    """sW(R) at precision N with eta support bound B."""

    def __init__(self, R: FpkAlgebra, N: int, B: int | None = None):
        if R.k != 1:
            raise ShearedError("sheared Witt vectors need an F_p-algebra")
        if N < 1:
            raise ShearedError("precision must be >= 1")
        B = N + 8 if B is None else B
        if B < N:
            raise ShearedError("support bound B must be >= precision N")
        try:
            self.res = residue_section(R)
        except RingError as exc:
            raise ShearedError(f"{R.name} is not Artinian local with perfect residue field: {exc}") from exc
        self.R = R
        self.k = self.res.field
        self.N = N
        self.B = B
        self.p = R.p
        self.W = WittRing(R, N)
        self.Wk = WittRing(self.k, N)
        self.perfect = self.res.nil.is_zero()

    def __repr__(self) -> str:
        return f"sW({self.R.name}; N={self.N}, B={self.B})"

    @property
    def params(self) -> dict:
        return {"ring": self.R.name, "N": self.N, "B": self.B, "p": self.p}

    # -- conversion -------------------------------------------------------
    def lift_lambda(self, lam: Sequence[int]) -> tuple[int, ...]:
        sec = self.res.section
        return tuple(sec[a] for a in lam)

    def make(self, lam: Sequence[int], eta: HatWittVec | dict | None = None) -> ShearedWitt:
        lam = tuple(lam)
        if len(lam) != self.N:
            raise ShearedError(f"lambda must have length {self.N}")
        if eta is None:
            eta = HatWittVec(self.R)
        elif isinstance(eta, dict):
            eta = HatWittVec(self.R, eta)
        if eta.support > self.B:
            raise SupportOverflow(eta.support, self.B)
        # eta beyond index N is invisible at precision N
        if eta.support > self.N:
            eta = HatWittVec(self.R, {i: a for i, a in eta.entries.items() if i < self.N}, check=False)
        for a in eta.entries.values():
            if not self.res.nil.contains(a):
                raise ShearedError("eta entries must lie in the nilradical")
        return ShearedWitt(self, lam, eta)

    def embed(self, x: ShearedWitt, L: int | None = None) -> tuple[int, ...]:
        """W(s)(lambda) + eta in W_L(R)."""
        L = self.N if L is None else L
        if L > min(self.N, self.B):
            raise ShearedError(f"embedding length {L} exceeds min(N, B) = {min(self.N, self.B)}")
        lifted = self.lift_lambda(x.lam)
        full = self.W.add(lifted, x.eta.dense(self.N))
        return full[:L]

    def split(self, w: Sequence[int] | HatWittVec) -> ShearedWitt:
        if isinstance(w, HatWittVec):
            if w.support > self.B:
                raise SupportOverflow(w.support, self.B)
            w = w.dense(max(w.support, self.N))
        w = tuple(w)
        if len(w) > self.B:
            nz = max((i for i, a in enumerate(w) if a), default=-1) + 1
            if nz > self.B:
                raise SupportOverflow(nz, self.B)
        if len(w) < self.N:
            raise ShearedError(f"need at least {self.N} components to split at precision {self.N}")
        w = w[: self.N]
        proj = self.res.projection
        lam = tuple(proj(a) for a in w)
        eta_dense = self.W.sub(w, self.lift_lambda(lam))
        eta = HatWittVec.from_dense(self.R, eta_dense, check=False)
        for a in eta.entries.values():
            if not self.res.nil.contains(a):
                raise ShearedError("internal: eta part left the nilradical")
        return ShearedWitt(self, lam, eta)

    # -- ring structure -----------------------------------------------------
    @property
    def zero(self) -> ShearedWitt:
        return ShearedWitt(self, self.Wk.zero, HatWittVec(self.R))

    @property
    def one(self) -> ShearedWitt:
        return ShearedWitt(self, self.Wk.one, HatWittVec(self.R))

    def from_int(self, c: int) -> ShearedWitt:
        return ShearedWitt(self, self.Wk.from_int(c), HatWittVec(self.R))

    def teich(self, a: int) -> ShearedWitt:
        return self.split(self.W.teich(a))

    def _same(self, *xs: ShearedWitt) -> None:
        for x in xs:
            if x.ring is not self:
                raise ShearedError("operands belong to a different sheared Witt ring")

    def s_add(self, x: ShearedWitt, y: ShearedWitt) -> ShearedWitt:
        self._same(x, y)
        return self.split(self.W.add(self.embed(x), self.embed(y)))

    def s_neg(self, x: ShearedWitt) -> ShearedWitt:
        self._same(x)
        return self.split(self.W.neg(self.embed(x)))

    def s_sub(self, x: ShearedWitt, y: ShearedWitt) -> ShearedWitt:
        return self.s_add(x, self.s_neg(y))

    def s_mul(self, x: ShearedWitt, y: ShearedWitt) -> ShearedWitt:
        self._same(x, y)
        return self.split(self.W.mul(self.embed(x), self.embed(y)))

    def s_F(self, x: ShearedWitt) -> ShearedWitt:
        self._same(x)
        return self.split(self.W.F(self.embed(x)))

    def s_Vtilde(self, x: ShearedWitt) -> ShearedWitt:
        # in characteristic p the unit u0 maps to 1, so V~ = V
        self._same(x)
        return self.split(self.W.V(self.embed(x)))

    def s_scalar(self, c: int, x: ShearedWitt) -> ShearedWitt:
        return self.split(self.W.scalar(c, self.embed(x)))

    def ptilde(self) -> ShearedWitt:
        return self.s_F(self.s_Vtilde(self.one))

    def projection(self, x: ShearedWitt) -> int:
        """pi: sW(R) -> R, the first Witt component."""
        return self.embed(x, 1)[0]

    def random(self, rng: random.Random, eta_support: int | None = None) -> ShearedWitt:
        lam = tuple(rng.randrange(self.k.size) for _ in range(self.N))
        s = self.N if eta_support is None else min(eta_support, self.N)
        nil = self.res.nil.elements()
        eta = HatWittVec(self.R, {i: rng.choice(nil) for i in range(s)}, check=False)
        return ShearedWitt(self, lam, eta)

    def elements_count(self) -> int:
        return self.R.size**self.N

    # -- F-invariants -------------------------------------------------------
    def F_fixed_points(self) -> list[ShearedWitt]:
        """All x with s_F(x) = x at precision N (componentwise a^p = a)."""
        R = self.R
        fixed = [a for a in R.elements() if R.pow(a, R.p) == a]
        import itertools

        return [self.split(w) for w in itertools.product(fixed, repeat=self.N)]


# -- verifiers ----------------------------------------------------------------

@dataclass
class VerifyReport:
    check: str
    ring: str
    params: dict
    samples: int = 0
    witnesses: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "ring": self.ring,
            "params": self.params,
            "samples": self.samples,
            "witnesses": self.witnesses,
            "failures": self.failures,
            "ok": self.ok,
        }


def _accepted(R: FpkAlgebra) -> bool:
    if is_perfect_field(R):
        return True
    try:
        residue_section(R)
        return True
    except RingError:
        return False


def check_kernel_sequence(
    R: FpkAlgebra,
    ideal: RingIdeal,
    precision: int,
    bound: int | None = None,
    samples: int = 50,
    seed: int = 0,
) -> VerifyReport:
    """0 -> W^(N) -> sW(R) -> sW(R/N) at precision: kernel and surjectivity on samples."""
    rng = random.Random(seed)
    for a in ideal.basis:
        if not R.is_nilpotent(a):
            raise ShearedError("ideal is not nilpotent")
    Q, proj = make_quotient(R, ideal, name=f"{R.name}/I")
    if not _accepted(Q):
        raise ShearedError("quotient ring is not accepted")
    S = ShearedWittRing(R, precision, bound)
    T = ShearedWittRing(Q, precision, S.B)
    pre = set_section(proj)
    members = ideal.elements()
    rep = VerifyReport("kernel_sequence", R.name, {**S.params, "ideal": [R.coords(b) for b in ideal.basis], "seed": seed})

    def image(x: ShearedWitt) -> ShearedWitt:
        return T.split(S.W.map_ring(proj, S.embed(x)))

    for i in range(samples):
        rep.samples += 1
        # W^(N) maps to zero
        k = HatWittVec(R, {j: rng.choice(members) for j in range(rng.randrange(S.N + 1))}, check=False)
        kx = S.split(k)
        if image(kx) != T.zero:
            rep.failures.append({"kind": "ideal_not_killed", "eta": k.entries})
        # kernel elements have all components in N
        x = S.random(rng)
        y = image(x)
        lift_y = S.split(tuple(pre[a] for a in T.embed(y)))
        d = S.s_sub(x, lift_y)
        if image(d) != T.zero:
            rep.failures.append({"kind": "difference_not_in_kernel", "x": x.to_dict()})
        elif not all(ideal.contains(a) for a in S.embed(d)):
            rep.failures.append({"kind": "kernel_outside_ideal", "x": x.to_dict()})
        # constructive lift of a random target
        t = T.random(rng)
        lifted = S.split(tuple(pre[a] for a in T.embed(t)))
        if image(lifted) == t:
            rep.witnesses += 1
        else:
            rep.failures.append({"kind": "lift_failed", "target": t.to_dict()})
    return rep


def check_Vn_Wn_sequence(
    R: FpkAlgebra,
    n: int,
    precision: int,
    bound: int | None = None,
    samples: int = 50,
    seed: int = 0,
) -> VerifyReport:
    """0 -> sW --V~^n--> sW -> W_n -> 0 at precision on samples."""
    if not 1 <= n <= precision:
        raise ShearedError("need 1 <= n <= precision")
    rng = random.Random(seed)
    S = ShearedWittRing(R, precision, bound)
    Wn = WittRing(R, n)
    rep = VerifyReport("Vn_Wn_sequence", R.name, {**S.params, "n": n, "seed": seed})

    def vt_n(x: ShearedWitt) -> ShearedWitt:
        for _ in range(n):
            x = S.s_Vtilde(x)
        return x

    def to_Wn(x: ShearedWitt) -> tuple[int, ...]:
        return S.embed(x, n)

    seen: dict = {}
    for _ in range(samples):
        rep.samples += 1
        # injectivity of V~^n on the part that survives precision N
        x = S.random(rng)
        xt = S.split(S.embed(x)[: S.N - n] + (0,) * n) if n < S.N else S.zero
        img = vt_n(xt)
        key = (img.lam, img.eta)
        if key in seen and seen[key] != xt:
            rep.failures.append({"kind": "Vn_not_injective", "x": xt.to_dict()})
        seen[key] = xt
        # image of V~^n lies in the kernel
        if any(to_Wn(img)):
            rep.failures.append({"kind": "Vn_image_not_killed", "x": x.to_dict()})
        # kernel lies in the image
        y = S.random(rng)
        w = S.embed(y)
        k = S.split((0,) * n + w[n:])
        pre_k = S.split(w[n:] + (0,) * n)
        if vt_n(pre_k) != k:
            rep.failures.append({"kind": "kernel_not_in_image", "y": y.to_dict()})
        # surjectivity onto W_n with a constructive lift
        target = Wn.random(rng)
        try:
            lifted = S.split(tuple(target) + (0,) * (S.N - n))
        except ShearedError as exc:
            rep.failures.append({"kind": "lift_failed", "target": list(target), "error": str(exc)})
            continue
        if to_Wn(lifted) == tuple(target):
            rep.witnesses += 1
        else:
            rep.failures.append({"kind": "lift_mismatch", "target": list(target)})
    return rep


def check_projection(S: ShearedWittRing, samples: int = 100, seed: int = 0) -> VerifyReport:
    """pi is a ring map and its kernel is the image of V~."""
    rng = random.Random(seed)
    rep = VerifyReport("projection", S.R.name, {**S.params, "seed": seed})
    R = S.R
    for _ in range(samples):
        rep.samples += 1
        x, y = S.random(rng), S.random(rng)
        if S.projection(S.s_add(x, y)) != R.add(S.projection(x), S.projection(y)):
            rep.failures.append({"kind": "pi_not_additive"})
        if S.projection(S.s_mul(x, y)) != R.mul(S.projection(x), S.projection(y)):
            rep.failures.append({"kind": "pi_not_multiplicative"})
        k = S.s_sub(x, S.teich(S.projection(x)))
        if S.projection(k) != 0:
            rep.failures.append({"kind": "kernel_sample_wrong"})
            continue
        # kernel element equals V~ of its shift
        w = S.embed(k)
        if S.s_Vtilde(S.split(w[1:] + (0,))) != k:
            rep.failures.append({"kind": "kernel_not_Vtilde_image"})
        else:
            rep.witnesses += 1
    return rep


def F_invariants_report(S: ShearedWittRing) -> dict:
    """Size of the F-fixed set and whether 1 generates it."""
    fixed = S.F_fixed_points()
    one = S.one
    seen = []
    x = S.zero
    for _ in range(len(fixed) + 1):
        seen.append(x)
        x = S.s_add(x, one)
        if x == S.zero:
            break
    order_one = len(seen)
    cyclic = order_one == len(fixed) and set(fixed) == set(seen)
    return {
        "ring": S.R.name,
        "N": S.N,
        "size": len(fixed),
        "expected": S.p**S.N,
        "order_of_one": order_one,
        "cyclic_generated_by_one": cyclic,
        "ok": len(fixed) == S.p**S.N and cyclic,
    }
