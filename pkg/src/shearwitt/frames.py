"""Frames, windows in normal representation, morphisms, duality, base change,
Hodge lifts and the deformation lifting of morphisms.

Conventions
-----------
A window (r0, r1, Psi) over a frame A has M0 = A0^(r0+r1) (column vectors,
L0 block first) and M1 = L0 (x) A1 + L1 (x) A0.  A morphism f: M -> M' is given
by four blocks

* ``a``: r0' x r0 over A0      * ``b``: r0' x r1 over A1
* ``c``: r1' x r0 over A0      * ``e``: r1' x r1 over A0

and must satisfy ``X(f) Psi = Psi' Y(f)`` with

    X(f) = [[a, tau(b)], [c, e]],    Y(f) = [[s0(a), s1(b)], [d s0(c), s0(e)]].

Composition is X(f o g) = X(f) X(g), read back on blocks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .zmod_linalg import AbGroupMap, EnumGroup, SizeCapExceeded, DEFAULT_CAP

Matrix = list  # list of rows


class FrameError(ValueError):
    pass


class Frame:
    """Coefficient interface shared by all frame instances.

    Subclasses provide the A0 ring operations, the A1 module operations and
    the structure maps tau, sigma0, sigma1 and the element d.
    """

    name: str = "frame"
    p: int

    # A0
    def zero0(self): raise NotImplementedError
    def one0(self): raise NotImplementedError
    def add0(self, x, y): raise NotImplementedError
    def neg0(self, x): raise NotImplementedError
    def mul0(self, x, y): raise NotImplementedError
    def from_int0(self, c: int): raise NotImplementedError
    def is_unit0(self, x) -> bool: raise NotImplementedError
    def inv0(self, x): raise NotImplementedError
    def random0(self, rng: random.Random): raise NotImplementedError
    def in_pA0(self, x) -> bool: raise NotImplementedError

    # A1
    def zero1(self): raise NotImplementedError
    def add1(self, x, y): raise NotImplementedError
    def neg1(self, x): raise NotImplementedError
    def act(self, a, x): raise NotImplementedError
    def random1(self, rng: random.Random): raise NotImplementedError

    # structure
    def tau(self, x): raise NotImplementedError
    def sigma0(self, a): raise NotImplementedError
    def sigma1(self, x): raise NotImplementedError
    d: Any = None

    # base ring R = A0 / tau A1
    base_ring: Any = None
    def proj(self, a): raise NotImplementedError

    # encoding for JSON
    def encode0(self, a): return a
    def decode0(self, v): return v
    def encode1(self, x): return x
    def decode1(self, v): return v

    # enumeration of carriers (for point computations)
    def elements0(self) -> Iterable: raise NotImplementedError
    def elements1(self) -> Iterable: raise NotImplementedError

    def sub0(self, x, y):
        return self.add0(x, self.neg0(y))

    def sub1(self, x, y):
        return self.add1(x, self.neg1(y))

    def pow0(self, x, e: int):
        acc = self.one0()
        for _ in range(e):
            acc = self.mul0(acc, x)
        return acc

    def describe(self) -> dict:
        return {"frame": self.name, "p": self.p}

    def verify(self, samples: int = 100, seed: int = 0) -> "FrameReport":
        """Frame axioms on random samples."""
        rng = random.Random(seed)
        rep = FrameReport(self.name, samples)
        d = self.d
        for _ in range(samples):
            x1 = self.random1(rng)
            a, b = self.random0(rng), self.random0(rng)
            if self.sigma0(self.tau(x1)) != self.mul0(d, self.sigma1(x1)):
                rep.fail("sigma0(tau x) != d sigma1(x)", x1)
            if not self.in_pA0(self.sub0(self.sigma0(a), self.pow0(a, self.p))):
                rep.fail("sigma0 is not Frobenius mod p", a)
            if self.sigma0(self.mul0(a, b)) != self.mul0(self.sigma0(a), self.sigma0(b)):
                rep.fail("sigma0 not multiplicative", (a, b))
            if self.sigma0(self.add0(a, b)) != self.add0(self.sigma0(a), self.sigma0(b)):
                rep.fail("sigma0 not additive", (a, b))
            ax = self.act(a, x1)
            if self.tau(ax) != self.mul0(a, self.tau(x1)):
                rep.fail("tau not linear", (a, x1))
            if self.sigma1(ax) != self.mul0(self.sigma0(a), self.sigma1(x1)):
                rep.fail("sigma1 not sigma0-semilinear", (a, x1))
            y1 = self.random1(rng)
            if self.tau(self.add1(x1, y1)) != self.add0(self.tau(x1), self.tau(y1)):
                rep.fail("tau not additive", (x1, y1))
            if self.sigma1(self.add1(x1, y1)) != self.add0(self.sigma1(x1), self.sigma1(y1)):
                rep.fail("sigma1 not additive", (x1, y1))
        return rep


@dataclass
class FrameReport:
    frame: str
    samples: int
    failures: list = field(default_factory=list)

    def fail(self, what: str, witness) -> None:
        if len(self.failures) < 20:
            self.failures.append({"kind": what, "witness": repr(witness)})

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"check": "frame_axioms", "frame": self.frame, "samples": self.samples, "failures": self.failures, "ok": self.ok}


# -- matrices over A0 / A1 ------------------------------------------------------

def mat_zero0(F: Frame, r: int, c: int) -> Matrix:
    return [[F.zero0() for _ in range(c)] for _ in range(r)]


def mat_zero1(F: Frame, r: int, c: int) -> Matrix:
    return [[F.zero1() for _ in range(c)] for _ in range(r)]


def mat_id(F: Frame, n: int) -> Matrix:
    return [[F.one0() if i == j else F.zero0() for j in range(n)] for i in range(n)]


def mat_mul(F: Frame, A: Matrix, B: Matrix, cols: int | None = None) -> Matrix:
    if not A:
        return []
    inner = len(A[0])
    if inner != len(B):
        raise FrameError(f"matrix shape mismatch: {len(A)}x{inner} times {len(B)}x?")
    if cols is None:
        if not B:
            raise FrameError("empty inner dimension needs an explicit column count")
        cols = len(B[0])
    out = []
    for i in range(len(A)):
        row = []
        for j in range(cols):
            acc = F.zero0()
            for k in range(inner):
                acc = F.add0(acc, F.mul0(A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


def mat_act(F: Frame, A: Matrix, B1: Matrix, cols: int | None = None) -> Matrix:
    """A0-matrix times A1-matrix (A1 entries acted on by A0)."""
    if not A:
        return []
    inner = len(A[0])
    if inner != len(B1):
        raise FrameError("matrix shape mismatch in A0 x A1 product")
    cols = (len(B1[0]) if B1 else 0) if cols is None else cols
    return [
        [_sum1(F, (F.act(A[i][k], B1[k][j]) for k in range(inner))) for j in range(cols)]
        for i in range(len(A))
    ]


def mat_act_right(F: Frame, B1: Matrix, A: Matrix, cols: int | None = None) -> Matrix:
    """A1-matrix times A0-matrix."""
    if not B1:
        return []
    inner = len(B1[0])
    if inner != len(A):
        raise FrameError("matrix shape mismatch in A1 x A0 product")
    cols = (len(A[0]) if A else 0) if cols is None else cols
    return [
        [_sum1(F, (F.act(A[k][j], B1[i][k]) for k in range(inner))) for j in range(cols)]
        for i in range(len(B1))
    ]


def _sum1(F: Frame, xs) -> Any:
    acc = F.zero1()
    for x in xs:
        acc = F.add1(acc, x)
    return acc


def mat_add(F: Frame, A: Matrix, B: Matrix, one: bool = False) -> Matrix:
    add = F.add1 if one else F.add0
    return [[add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(F: Frame, A: Matrix, B: Matrix) -> Matrix:
    return [[F.sub0(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_map(f: Callable, A: Matrix) -> Matrix:
    return [[f(x) for x in row] for row in A]


def mat_transpose(A: Matrix, rows_if_empty: int = 0) -> Matrix:
    if not A:
        return [[] for _ in range(rows_if_empty)]
    return [list(col) for col in zip(*A)]


def mat_inv(F: Frame, A: Matrix) -> Matrix:
    """Inverse over the local ring A0 by Gauss-Jordan with unit pivots."""
    n = len(A)
    M = [list(row) + [F.one0() if i == j else F.zero0() for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if F.is_unit0(M[r][col])), None)
        if piv is None:
            raise FrameError("matrix is not invertible")
        M[col], M[piv] = M[piv], M[col]
        inv = F.inv0(M[col][col])
        M[col] = [F.mul0(inv, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != F.zero0():
                f = M[r][col]
                M[r] = [F.sub0(x, F.mul0(f, y)) for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def blocks(M: Matrix, r0: int) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    P = [row[:r0] for row in M[:r0]]
    Q = [row[r0:] for row in M[:r0]]
    R = [row[:r0] for row in M[r0:]]
    S = [row[r0:] for row in M[r0:]]
    return P, Q, R, S


def _stack(F: Frame, top_left, top_right, bot_left, bot_right, r_top: int, r_bot: int, c_left: int, c_right: int) -> Matrix:
    out = []
    for i in range(r_top):
        out.append([top_left[i][j] for j in range(c_left)] + [top_right[i][j] for j in range(c_right)])
    for i in range(r_bot):
        out.append([bot_left[i][j] for j in range(c_left)] + [bot_right[i][j] for j in range(c_right)])
    return out


# -- windows ----------------------------------------------------------------------

class Window:
    """A window (r0, r1, Psi) over a frame, Psi invertible over A0."""

    def __init__(self, frame: Frame, r0: int, r1: int, Psi: Matrix, Psi_inv: Matrix | None = None, name: str = ""):
        n = r0 + r1
        if r0 < 0 or r1 < 0:
            raise FrameError("ranks must be non-negative")
        if len(Psi) != n or any(len(row) != n for row in Psi):
            raise FrameError(f"Psi must be {n}x{n}")
        self.frame = frame
        self.r0, self.r1 = r0, r1
        self.Psi = [list(row) for row in Psi]
        self.Psi_inv = mat_inv(frame, self.Psi) if Psi_inv is None else [list(r) for r in Psi_inv]
        if n and mat_mul(frame, self.Psi, self.Psi_inv) != mat_id(frame, n):
            raise FrameError("stored inverse does not invert Psi")
        self.name = name

    @property
    def height(self) -> int:
        return self.r0 + self.r1

    @property
    def dimension(self) -> int:
        return self.r0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Window)
            and self.frame is other.frame
            and (self.r0, self.r1) == (other.r0, other.r1)
            and self.Psi == other.Psi
        )

    def __repr__(self) -> str:
        return f"Window({self.name or '?'}; r0={self.r0}, r1={self.r1}, frame={self.frame.name})"

    def to_dict(self) -> dict:
        F = self.frame
        return {
            "frame_id": F.name,
            "r0": self.r0,
            "r1": self.r1,
            "psi": [[F.encode0(x) for x in row] for row in self.Psi],
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, frame: Frame, data: dict) -> "Window":
        if data.get("frame_id") not in (None, frame.name):
            raise FrameError(f"window was written for frame {data['frame_id']!r}, not {frame.name!r}")
        Psi = [[frame.decode0(v) for v in row] for row in data["psi"]]
        return cls(frame, int(data["r0"]), int(data["r1"]), Psi, name=data.get("name", ""))


def unit_window(F: Frame) -> Window:
    return Window(F, 1, 0, [[F.one0()]], name="unit")


def twist_window(F: Frame) -> Window:
    return Window(F, 0, 1, [[F.one0()]], name="twist")


def direct_sum(M: Window, N: Window) -> Window:
    """Block sum, keeping the L0 blocks first."""
    F = M.frame
    if N.frame is not F:
        raise FrameError("windows over different frames")
    r0, r1 = M.r0 + N.r0, M.r1 + N.r1
    n = r0 + r1
    out = mat_zero0(F, n, n)
    idxM = list(range(M.r0)) + [r0 + j for j in range(M.r1)]
    idxN = [M.r0 + j for j in range(N.r0)] + [r0 + M.r1 + j for j in range(N.r1)]
    for W, idx in ((M, idxM), (N, idxN)):
        for i, gi in enumerate(idx):
            for j, gj in enumerate(idx):
                out[gi][gj] = W.Psi[i][j]
    return Window(F, r0, r1, out, name=f"{M.name}+{N.name}")


# -- morphisms --------------------------------------------------------------------

@dataclass
class WindowMorphism:
    src: Window
    dst: Window
    a: Matrix
    b: Matrix
    c: Matrix
    e: Matrix

    def check_shapes(self) -> None:
        r0, r1 = self.src.r0, self.src.r1
        s0, s1 = self.dst.r0, self.dst.r1
        for name, M, rows, cols in (("a", self.a, s0, r0), ("b", self.b, s0, r1), ("c", self.c, s1, r0), ("e", self.e, s1, r1)):
            if len(M) != rows or any(len(row) != cols for row in M):
                raise FrameError(f"block {name} must be {rows}x{cols}")

    def X(self) -> Matrix:
        F = self.src.frame
        self.check_shapes()
        tb = mat_map(F.tau, self.b)
        return _stack(F, self.a, tb, self.c, self.e, self.dst.r0, self.dst.r1, self.src.r0, self.src.r1)

    def Y(self) -> Matrix:
        F = self.src.frame
        self.check_shapes()
        s0 = F.sigma0
        return _stack(
            F,
            mat_map(s0, self.a),
            mat_map(F.sigma1, self.b),
            mat_map(lambda x: F.mul0(F.d, s0(x)), self.c),
            mat_map(s0, self.e),
            self.dst.r0, self.dst.r1, self.src.r0, self.src.r1,
        )

    def to_dict(self) -> dict:
        F = self.src.frame
        return {
            "a": [[F.encode0(x) for x in r] for r in self.a],
            "b": [[F.encode1(x) for x in r] for r in self.b],
            "c": [[F.encode0(x) for x in r] for r in self.c],
            "e": [[F.encode0(x) for x in r] for r in self.e],
        }


def is_morphism(f: WindowMorphism) -> tuple[bool, Matrix]:
    """Exact check of X(f) Psi = Psi' Y(f); returns (ok, residual)."""
    F = f.src.frame
    if f.dst.frame is not F:
        raise FrameError("source and target live over different frames")
    n = f.src.height
    lhs = mat_mul(F, f.X(), f.src.Psi, n)
    rhs = mat_mul(F, f.dst.Psi, f.Y(), n)
    res = mat_sub(F, lhs, rhs) if lhs else []
    z = F.zero0()
    ok = all(x == z for row in res for x in row)
    return ok, res


def identity_morphism(M: Window) -> WindowMorphism:
    F = M.frame
    return WindowMorphism(M, M, mat_id(F, M.r0), mat_zero1(F, M.r0, M.r1), mat_zero0(F, M.r1, M.r0), mat_id(F, M.r1))


def compose(f: WindowMorphism, g: WindowMorphism) -> WindowMorphism:
    """f o g for g: M -> M', f: M' -> M''."""
    if g.dst is not f.src and g.dst != f.src:
        raise FrameError("morphisms are not composable")
    F = f.src.frame
    r0, r1 = g.src.r0, g.src.r1
    s0, s1 = f.dst.r0, f.dst.r1
    tbg = mat_map(F.tau, g.b)
    tbf = mat_map(F.tau, f.b)
    a = mat_add(F, mat_mul(F, f.a, g.a, r0), mat_mul(F, tbf, g.c, r0))
    b = mat_add(F, mat_act(F, f.a, g.b, r1), mat_act_right(F, f.b, g.e, r1), one=True)
    c = mat_add(F, mat_mul(F, f.c, g.a, r0), mat_mul(F, f.e, g.c, r0))
    e = mat_add(F, mat_mul(F, f.c, tbg, r1), mat_mul(F, f.e, g.e, r1))
    return WindowMorphism(
        g.src, f.dst,
        _fix_shape(a, s0, r0, F.zero0), _fix_shape(b, s0, r1, F.zero1),
        _fix_shape(c, s1, r0, F.zero0), _fix_shape(e, s1, r1, F.zero0),
    )


def _fix_shape(M, rows, cols, zero):
    # products with an empty outer dimension come back as []
    if len(M) == rows and all(len(r) == cols for r in M):
        return M
    if rows == 0 or cols == 0 or not M:
        return [[zero() for _ in range(cols)] for _ in range(rows)]
    raise FrameError("internal shape error")


def morphism_from_X(src: Window, dst: Window, X: Matrix, b: Matrix) -> WindowMorphism:
    """Blocks from X together with an explicit A1-block b (tau(b) must match)."""
    F = src.frame
    s0 = dst.r0
    r0 = src.r0
    a = [row[:r0] for row in X[:s0]]
    c = [row[:r0] for row in X[s0:]]
    e = [row[r0:] for row in X[s0:]]
    tb = [row[r0:] for row in X[:s0]]
    if mat_map(F.tau, b) != tb:
        raise FrameError("tau(b) does not match the X block")
    return WindowMorphism(src, dst, a, b, c, e)


# -- duality ----------------------------------------------------------------------

def dual_window(M: Window) -> Window:
    """(L0, L1, Psi)^t = (L1^v, L0^v, (Psi^-1)^T with the block order swapped)."""
    F = M.frame
    n = M.height
    T = mat_transpose(M.Psi_inv, n)
    Tinv = mat_transpose(M.Psi, n)
    perm = list(range(M.r0, n)) + list(range(M.r0))
    P = [[T[i][j] for j in perm] for i in perm]
    Pinv = [[Tinv[i][j] for j in perm] for i in perm]
    return Window(F, M.r1, M.r0, P, Pinv, name=f"{M.name}^t" if M.name else "")


def double_dual_identification(M: Window) -> bool:
    """M^tt equals M on the nose (the block permutation is an involution)."""
    D = dual_window(dual_window(M))
    return (D.r0, D.r1) == (M.r0, M.r1) and D.Psi == M.Psi


# -- frame homomorphisms and base change -------------------------------------

@dataclass
class FrameHom:
    """(g, u): A -> B with g0 on A0, g1 on A1 and a unit u of B0."""

    src: Frame
    dst: Frame
    g0: Callable
    g1: Callable
    u: Any
    name: str = ""

    def verify(self, samples: int = 50, seed: int = 0) -> FrameReport:
        A, B = self.src, self.dst
        rng = random.Random(seed)
        rep = FrameReport(f"hom {self.name}", samples)
        if self.g0(A.d) != B.mul0(self.u, B.d):
            rep.fail("g0(d_A) != u d_B", None)
        for _ in range(samples):
            a, b = A.random0(rng), A.random0(rng)
            x = A.random1(rng)
            if self.g0(A.mul0(a, b)) != B.mul0(self.g0(a), self.g0(b)):
                rep.fail("g0 not multiplicative", (a, b))
            if self.g0(A.add0(a, b)) != B.add0(self.g0(a), self.g0(b)):
                rep.fail("g0 not additive", (a, b))
            if B.sigma0(self.g0(a)) != self.g0(A.sigma0(a)):
                rep.fail("g0 does not commute with sigma0", a)
            if B.tau(self.g1(x)) != self.g0(A.tau(x)):
                rep.fail("g1 does not commute with tau", x)
            if B.sigma1(self.g1(x)) != B.mul0(self.u, self.g0(A.sigma1(x))):
                rep.fail("sigma1 g1 != u g0 sigma1", x)
            if self.g1(A.act(a, x)) != B.act(self.g0(a), self.g1(x)):
                rep.fail("g1 not g0-linear", (a, x))
        return rep


def identity_hom(F: Frame) -> FrameHom:
    return FrameHom(F, F, lambda a: a, lambda x: x, F.one0(), name="id")


def compose_homs(h: FrameHom, g: FrameHom) -> FrameHom:
    """h o g."""
    if g.dst is not h.src:
        raise FrameError("frame homomorphisms are not composable")
    C = h.dst
    return FrameHom(g.src, C, lambda a: h.g0(g.g0(a)), lambda x: h.g1(g.g1(x)), C.mul0(h.u, h.g0(g.u)), name=f"{h.name}o{g.name}")


def base_change(M: Window, g: FrameHom) -> Window:
    """Psi' = g0(Psi) diag(1_{r0}, u 1_{r1})."""
    if M.frame is not g.src:
        raise FrameError("window does not live over the source frame")
    B = g.dst
    n = M.height
    Psi = mat_map(g.g0, M.Psi)
    D = [[B.zero0()] * n for _ in range(n)]
    for i in range(n):
        D[i][i] = B.one0() if i < M.r0 else g.u
    return Window(B, M.r0, M.r1, mat_mul(B, Psi, D) if n else [], name=M.name)


def base_change_morphism(f: WindowMorphism, g: FrameHom, src: Window | None = None, dst: Window | None = None) -> WindowMorphism:
    src = src or base_change(f.src, g)
    dst = dst or base_change(f.dst, g)
    return WindowMorphism(src, dst, mat_map(g.g0, f.a), mat_map(g.g1, f.b), mat_map(g.g0, f.c), mat_map(g.g0, f.e))


# -- leveled ideals and lifting of morphisms ------------------------------------

class LeveledIdeal:
    """An ideal K = (K0, K1) of a frame A with tau_K bijective onto K0.

    ``quotient`` is the frame A/K; ``reduce0/1`` project A -> A/K and
    ``lift0/1`` are set-theoretic sections.  ``tau_inv`` is the inverse of
    tau on K (with the canonical normalisation used at finite precision) and
    ``nu`` is a certified bound with sigma_dot^nu = 0.
    """

    def __init__(self, frame: Frame, quotient: Frame, contains0, tau_inv, nu: int,
                 reduce0, reduce1, lift0, lift1, random_k0, name: str = "K"):
        self.frame = frame
        self.quotient = quotient
        self.contains0 = contains0
        self.tau_inv = tau_inv
        self.nu = nu
        self.reduce0, self.reduce1 = reduce0, reduce1
        self.lift0, self.lift1 = lift0, lift1
        self.random_k0 = random_k0
        self.name = name

    def sigma_dot(self, k):
        return self.frame.sigma1(self.tau_inv(k))

    def verify(self, samples: int = 50, seed: int = 0) -> FrameReport:
        rng = random.Random(seed)
        F = self.frame
        rep = FrameReport(f"leveled {self.name}", samples)
        z = F.zero0()
        for _ in range(samples):
            k = self.random_k0(rng)
            if not self.contains0(k):
                rep.fail("sampler left K0", k)
            if F.tau(self.tau_inv(k)) != k:
                rep.fail("tau_inv is not a section of tau", k)
            x = k
            for _ in range(self.nu):
                x = self.sigma_dot(x)
                if not self.contains0(x):
                    rep.fail("sigma_dot leaves K0", k)
                    break
            if x != z:
                rep.fail("sigma_dot^nu != 0", k)
            a = F.random0(rng)
            if not self.contains0(F.mul0(a, k)):
                rep.fail("K0 not an ideal", (a, k))
        return rep


def lift_window(M_bar: Window, K: LeveledIdeal, name: str = "") -> Window:
    """Any lift of Psi-bar is a window over A (Psi stays invertible)."""
    F = K.frame
    if M_bar.frame is not K.quotient:
        raise FrameError("window does not live over the quotient frame")
    Psi = mat_map(K.lift0, M_bar.Psi)
    return Window(F, M_bar.r0, M_bar.r1, Psi, name=name or M_bar.name)


def _reduce_check(K: LeveledIdeal, M: Window, Mbar: Window) -> None:
    if mat_map(K.reduce0, M.Psi) != Mbar.Psi:
        raise FrameError("window over A does not reduce to the given window")


def lift_morphism(M: Window, Mp: Window, f_bar: WindowMorphism, K: LeveledIdeal,
                  start: WindowMorphism | None = None) -> WindowMorphism:
    """The unique morphism f: M -> M' over A lifting f_bar (normalised b).

    f = f0 + h with X(h) = H having entries in K0 solves
    H = (Psi' S(H) - R0) Psi^-1, R0 = X(f0) Psi - Psi' Y(f0), where S applies
    sigma_dot entrywise (times d, d^2 on the blocks where Y carries them).  The
    linear part is nilpotent of order nu, so exactly nu iterations are run.
    """
    F = K.frame
    if M.frame is not F or Mp.frame is not F:
        raise FrameError("windows must live over the frame of K")
    _reduce_check(K, M, f_bar.src)
    _reduce_check(K, Mp, f_bar.dst)
    if not is_morphism(f_bar)[0]:
        raise FrameError("f_bar is not a morphism over A/K")
    if start is None:
        f0 = WindowMorphism(
            M, Mp,
            mat_map(K.lift0, f_bar.a), mat_map(K.lift1, f_bar.b),
            mat_map(K.lift0, f_bar.c), mat_map(K.lift0, f_bar.e),
        )
    else:
        f0 = WindowMorphism(M, Mp, start.a, start.b, start.c, start.e)
        for blk, bb in ((f0.a, f_bar.a), (f0.c, f_bar.c), (f0.e, f_bar.e)):
            if mat_map(K.reduce0, blk) != bb:
                raise FrameError("start does not lift f_bar")
        if mat_map(K.reduce1, f0.b) != f_bar.b:
            raise FrameError("start does not lift f_bar (b block)")
        # normalise b: the part invisible to tau is fixed by the canonical lift
        base_b = mat_map(K.lift1, f_bar.b)
        f0.b = [
            [F.add1(bb, K.tau_inv(F.tau(F.sub1(x, bb)))) for x, bb in zip(r, rb)]
            for r, rb in zip(f0.b, base_b)
        ]
    s0, s1 = Mp.r0, Mp.r1
    r0, r1 = M.r0, M.r1
    X0 = f0.X()
    R0 = mat_sub(F, mat_mul(F, X0, M.Psi), mat_mul(F, Mp.Psi, f0.Y()))
    for row in R0:
        for x in row:
            if not K.contains0(x):
                raise FrameError("f_bar is not a morphism modulo K (residual outside K0)")
    d = F.d
    d2 = F.mul0(d, d)
    sd = K.sigma_dot
    n_src, n_dst = r0 + r1, s0 + s1

    def S(H: Matrix) -> Matrix:
        out = []
        for i in range(n_dst):
            row = []
            for j in range(n_src):
                v = sd(H[i][j])
                if i < s0 and j >= r0:
                    row.append(v)
                elif i >= s0 and j < r0:
                    row.append(F.mul0(d2, v))
                else:
                    row.append(F.mul0(d, v))
            out.append(row)
        return out

    H = mat_zero0(F, n_dst, n_src)
    negR0 = mat_map(F.neg0, R0)
    settled = 0
    for step in range(1, K.nu + 1):
        H_next = mat_mul(F, mat_add(F, mat_mul(F, Mp.Psi, S(H)), negR0), M.Psi_inv)
        if H_next != H:
            settled = step
        H = H_next
    Xf = mat_add(F, X0, H)
    Hb = [row[r0:] for row in H[:s0]]
    b = [[F.add1(x, K.tau_inv(h)) for x, h in zip(rb, rh)] for rb, rh in zip(f0.b, Hb)]
    f = WindowMorphism(
        M, Mp,
        [row[:r0] for row in Xf[:s0]], b,
        [row[:r0] for row in Xf[s0:]], [row[r0:] for row in Xf[s0:]],
    )
    ok, _ = is_morphism(f)
    if not ok:
        raise FrameError("iteration did not converge within nu steps (invalid leveled-ideal certificate)")
    f.iterations = K.nu
    f.settled_at = settled
    return f


def deformation_lift(M_bar: Window, K: LeveledIdeal, lift0: Matrix | None = None) -> Window:
    """A window over A lifting M_bar; with lift0 given it is checked and used."""
    if lift0 is None:
        return lift_window(M_bar, K)
    W = Window(K.frame, M_bar.r0, M_bar.r1, lift0, name=M_bar.name)
    _reduce_check(K, W, M_bar)
    return W


# -- Hodge filtration lifts --------------------------------------------------------

def hodge_filtration(M: Window) -> Matrix:
    """Columns spanning the Hodge filtration in M0 (x) R: the L1 block."""
    F = M.frame
    R = F.base_ring
    n = M.height
    return [[R.one if i == M.r0 + j else R.zero for j in range(M.r1)] for i in range(n)]


def hodge_lifts(N: Window, beta: Matrix, hom: FrameHom, incl_a: Callable) -> tuple[Window, WindowMorphism]:
    """Window over A from (N over B, L) with L the graph of beta: L1 -> L0 in a.

    ``hom`` is A -> B with g0 bijective (identity on A0 = B0); ``incl_a``
    sends a in the pd ideal to the B1 element 0 + a.  Returns the window over
    A and the isomorphism from its base change to N.
    """
    A, B = hom.src, hom.dst
    if N.frame is not B:
        raise FrameError("N must live over the target frame")
    r0, r1 = N.r0, N.r1
    if len(beta) != r0 or any(len(r) != r1 for r in beta):
        raise FrameError(f"beta must be {r0}x{r1}")
    n = r0 + r1
    try:
        b_blk = [[incl_a(x) for x in row] for row in beta]
    except Exception as exc:
        raise FrameError(f"L is not a direct summand lift of the Hodge filtration: {exc}") from exc
    tb = mat_map(B.tau, b_blk)
    g = _stack(B, mat_id(B, r0), tb, mat_zero0(B, r1, r0), mat_id(B, r1), r0, r1, r0, r1)
    g_inv = _stack(B, mat_id(B, r0), mat_map(B.neg0, tb), mat_zero0(B, r1, r0), mat_id(B, r1), r0, r1, r0, r1)
    PsiA = mat_mul(B, g_inv, N.Psi)
    if hom.u != B.one0():
        raise FrameError("hodge_lifts needs a strict homomorphism")
    M = Window(A, r0, r1, PsiA, name=f"{N.name}[L]")
    MB = base_change(M, hom)
    iso = WindowMorphism(MB, N, mat_id(B, r0), b_blk, mat_zero0(B, r1, r0), mat_id(B, r1))
    return M, iso


def hodge_filtration_of_lift(M: Window, beta: Matrix, F_proj: Callable) -> Matrix:
    """Hodge filtration of the lifted window expressed in the original basis: [[beta],[I]]."""
    R = M.frame.base_ring
    out = []
    for i in range(M.r0):
        out.append([F_proj(x) for x in beta[i]])
    for i in range(M.r1):
        out.append([R.one if i == j else R.zero for j in range(M.r1)])
    return out


# -- the complex Gamma(M) on points ----------------------------------------------

def gamma_map(M: Window) -> Callable:
    """gamma(x, l) = Psi (sigma1 x ; sigma0 l) - (tau x ; l) on M1 -> M0."""
    F = M.frame
    r0, n = M.r0, M.height
    Psi = M.Psi

    def gamma(v):
        x, l = v[:r0], v[r0:]
        phi_in = [F.sigma1(t) for t in x] + [F.sigma0(t) for t in l]
        tau_in = [F.tau(t) for t in x] + list(l)
        out = []
        for i in range(n):
            acc = F.zero0()
            for j in range(n):
                acc = F.add0(acc, F.mul0(Psi[i][j], phi_in[j]))
            out.append(F.sub0(acc, tau_in[i]))
        return tuple(out)

    return gamma


def _product_group(F: Frame, kinds: Sequence[int], cap: int, name: str) -> EnumGroup:
    import itertools

    pools = [list(F.elements1()) if k == 1 else list(F.elements0()) for k in kinds]
    size = 1
    for pool in pools:
        size *= len(pool)
    if size > cap:
        raise SizeCapExceeded(name, size, cap)
    adds = [F.add1 if k == 1 else F.add0 for k in kinds]
    zeros = tuple(F.zero1() if k == 1 else F.zero0() for k in kinds)
    elements = list(itertools.product(*pools)) if pools else [()]

    def add(u, v):
        return tuple(f(a, b) for f, a, b in zip(adds, u, v))

    return EnumGroup(elements, add, zeros, name=name)


def gamma_complex_map(M: Window, cap: int = DEFAULT_CAP, check_cap: int = 2**10) -> AbGroupMap:
    """gamma: M1 -> M0 on the frame's (finite) carriers, additivity verified."""
    F = M.frame
    src = _product_group(F, [1] * M.r0 + [0] * M.r1, cap, "M1")
    tgt = _product_group(F, [0] * M.height, cap, "M0")
    f = AbGroupMap(src, tgt, gamma_map(M))
    if len(src) ** 2 <= check_cap:
        f.check_additivity(cap=check_cap)
    else:
        rng = random.Random(0)
        f.check_additivity(pairs=[(rng.choice(src.elements), rng.choice(src.elements)) for _ in range(256)])
    return f


def morphisms_from_twist(M: Window, cap: int = DEFAULT_CAP) -> list:
    """All morphisms A(1) -> M by direct enumeration of (b, e) and is_morphism."""
    import itertools

    F = M.frame
    T = twist_window(F)
    pool1 = list(F.elements1())
    pool0 = list(F.elements0())
    size = len(pool1) ** M.r0 * len(pool0) ** M.r1
    if size > cap:
        raise SizeCapExceeded("Hom(A(1), M)", size, cap)
    out = []
    for bs in itertools.product(pool1, repeat=M.r0):
        for es in itertools.product(pool0, repeat=M.r1):
            f = WindowMorphism(T, M, [[] for _ in range(M.r0)], [[x] for x in bs], [[] for _ in range(M.r1)], [[x] for x in es])
            if is_morphism(f)[0]:
                out.append(tuple(bs) + tuple(es))
    return out
