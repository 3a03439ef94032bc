"""p-typical Witt vectors over finite Z/p^k-algebras.

Two interchangeable engines.  The default reads the structure constants of R
over Z/p^M as a flat lift, adds/multiplies ghost components there and divides
back exactly.  The fallback evaluates the universal sum/product/negation and
Frobenius polynomials over Z, built once per (p, length) from the ghost
recursion ``w_m = sum_{i<=m} p^i x_i^(p^(m-i))``.  Vectors are plain tuples of
ring elements (ints, see :mod:`ring_base`).
"""

from __future__ import annotations

import math
import os
import pickle
import random
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .ring_base import FpkAlgebra, RingError, nilpotency_index

Poly = dict  # exponent tuple -> int coefficient

DEFAULT_LENGTH_CAP = {2: 8, 3: 6}
FALLBACK_LENGTH_CAP = 4


class WittError(ValueError):
    pass


def length_cap(p: int) -> int:
    return DEFAULT_LENGTH_CAP.get(p, FALLBACK_LENGTH_CAP)


# -- integer polynomials -----------------------------------------------------

def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


def _pscale(a: Poly, c: int) -> Poly:
    return {e: v * c for e, v in a.items() if v * c}


def _ppow(a: Poly, n: int, nvars: int) -> Poly:
    result: Poly = {(0,) * nvars: 1}
    base = a
    while n:
        if n & 1:
            result = _pmul(result, base)
        n >>= 1
        if n:
            base = _pmul(base, base)
    return result


def _pdiv_exact(a: Poly, d: int) -> Poly:
    out = {}
    for e, c in a.items():
        q, r = divmod(c, d)
        if r:
            raise ArithmeticError("universal polynomial not integral (ghost recursion bug)")
        out[e] = q
    return out


def _var(i: int, nvars: int, power: int = 1) -> Poly:
    e = [0] * nvars
    e[i] = power
    return {tuple(e): 1}


class WittPolyCache:
    """Universal Witt polynomials for a prime p, memoised per length."""

    def __init__(self, p: int):
        self.p = p
        self._sum: list[Poly] = []
        self._prod: list[Poly] = []
        self._neg: list[Poly] = []
        self._frob: list[Poly] = []
        self._nvars_bin = 0
        self._lock = threading.RLock()

    # binary polys are stored in variables x_0..x_{L-1}, y_0..y_{L-1} for the
    # current maximal length L; growing L re-indexes the stored polys.
    def _ghost(self, offset: int, m: int, nvars: int) -> Poly:
        p = self.p
        out: Poly = {}
        for i in range(m + 1):
            out = _padd(out, _pscale(_var(offset + i, nvars, p ** (m - i)), p**i))
        return out

    def _build_binary(self, L: int) -> None:
        p = self.p
        nv = 2 * L
        S: list[Poly] = []
        P: list[Poly] = []
        for m in range(L):
            wx = self._ghost(0, m, nv)
            wy = self._ghost(L, m, nv)
            accS = _padd(wx, wy)
            accP = _pmul(wx, wy)
            for i in range(m):
                accS = _padd(accS, _pscale(_ppow(S[i], p ** (m - i), nv), p**i), -1)
                accP = _padd(accP, _pscale(_ppow(P[i], p ** (m - i), nv), p**i), -1)
            S.append(_pdiv_exact(accS, p**m))
            P.append(_pdiv_exact(accP, p**m))
        self._sum, self._prod, self._nvars_bin = S, P, L

    def _build_unary(self, L: int) -> None:
        p = self.p
        nv = L + 1
        N: list[Poly] = []
        Fr: list[Poly] = []
        for m in range(L):
            acc = _pscale(self._ghost(0, m, nv), -1)
            accF = self._ghost(0, m + 1, nv)
            for i in range(m):
                acc = _padd(acc, _pscale(_ppow(N[i], p ** (m - i), nv), p**i), -1)
                accF = _padd(accF, _pscale(_ppow(Fr[i], p ** (m - i), nv), p**i), -1)
            N.append(_pdiv_exact(acc, p**m))
            Fr.append(_pdiv_exact(accF, p**m))
        self._neg, self._frob = N, Fr

    def ensure(self, L: int) -> None:
        with self._lock:
            if self._nvars_bin < L:
                self._build_binary(L)
            if len(self._neg) < L:
                self._build_unary(L)

    def sum_polys(self, L: int) -> tuple[list[Poly], int]:
        self.ensure(L)
        return self._sum[:L], self._nvars_bin

    def prod_polys(self, L: int) -> tuple[list[Poly], int]:
        self.ensure(L)
        return self._prod[:L], self._nvars_bin

    def neg_polys(self, L: int) -> list[Poly]:
        self.ensure(L)
        return self._neg[:L]

    def frob_polys(self, L: int) -> list[Poly]:
        self.ensure(L)
        return self._frob[:L]


_CACHES: dict[int, WittPolyCache] = {}
_CACHE_LOCK = threading.Lock()


def poly_cache(p: int) -> WittPolyCache:
    with _CACHE_LOCK:
        cache = _CACHES.get(p)
        if cache is None:
            cache = _load_disk_cache(p) or WittPolyCache(p)
            _CACHES[p] = cache
        return cache


def _cache_path(p: int) -> str | None:
    d = os.environ.get("SHEARWITT_CACHE_DIR")
    if not d:
        return None
    return os.path.join(d, f"witt_polys_p{p}.pkl")


def _load_disk_cache(p: int) -> WittPolyCache | None:
    path = _cache_path(p)
    if not path or not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        state = pickle.load(fh)
    cache = WittPolyCache(p)
    cache._sum, cache._prod, cache._nvars_bin, cache._neg, cache._frob = state
    return cache


def save_disk_cache(p: int) -> str | None:
    path = _cache_path(p)
    if not path:
        return None
    c = poly_cache(p)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as fh:
        pickle.dump((c._sum, c._prod, c._nvars_bin, c._neg, c._frob), fh)
    return path


# -- compiled evaluation -------------------------------------------------------

def _compile(poly: Poly, q: int, var_map) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    out = []
    for e, c in poly.items():
        c %= q
        if not c:
            continue
        mono = tuple((var_map(i), k) for i, k in enumerate(e) if k)
        out.append((c, mono))
    return out


# -- ghost engine over a flat lift -------------------------------------------

class LiftedAlgebra:
    """The structure constants of R read over Z/p^M.

    Valid as a flat lift when the lifted constants are still commutative,
    associative and unital; :meth:`try_build` returns None otherwise.
    """

    def __init__(self, R: FpkAlgebra, M: int):
        self.R = R
        self.M = M
        self.P = R.p**M
        self.rank = R.rank
        self.sc = [[list(R.struct_consts[i][j]) for j in range(R.rank)] for i in range(R.rank)]
        self.one = list(R.one_coords)

    @classmethod
    def try_build(cls, R: FpkAlgebra, M: int) -> "LiftedAlgebra | None":
        L = cls(R, M)
        r = R.rank
        e = [[1 if t == i else 0 for t in range(r)] for i in range(r)]
        for i in range(r):
            if L.mul(L.one, e[i]) != e[i]:
                return None
            for j in range(i + 1, r):
                if L.mul(e[i], e[j]) != L.mul(e[j], e[i]):
                    return None
        for i in range(r):
            for j in range(r):
                eij = L.mul(e[i], e[j])
                for t in range(r):
                    if L.mul(eij, e[t]) != L.mul(e[i], L.mul(e[j], e[t])):
                        return None
        return L

    def mul(self, a, b):
        P = self.P
        if self.rank == 1:
            return [(a[0] * b[0] * self.sc[0][0][0]) % P]
        acc = [0] * self.rank
        sc = self.sc
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for t, v in enumerate(sc[i][j]):
                    if v:
                        acc[t] += c * v
        return [x % P for x in acc]

    def ppow(self, a, j: int):
        """a^(p^j)."""
        p = self.R.p
        for _ in range(j):
            b = a
            r = self.one
            e = p
            while e:
                if e & 1:
                    r = self.mul(r, b)
                e >>= 1
                if e:
                    b = self.mul(b, b)
            a = r
        return a

    def ghost(self, vec: Sequence[int], m_count: int) -> list[list[int]]:
        R, p, P = self.R, self.R.p, self.P
        lifts = [list(R.coords(x)) for x in vec]
        out = []
        for m in range(m_count):
            acc = [0] * self.rank
            for i in range(m + 1):
                if not any(lifts[i]):
                    continue
                t = self.ppow(lifts[i], m - i)
                acc = [(u + p**i * v) % P for u, v in zip(acc, t)]
            out.append(acc)
        return out

    def unghost(self, w: Sequence[Sequence[int]]) -> tuple[int, ...]:
        R, p, P, q = self.R, self.R.p, self.P, self.R.q
        comps: list[list[int]] = []
        for m, wm in enumerate(w):
            acc = list(wm)
            for i, xi in enumerate(comps):
                if not any(xi):
                    continue
                t = self.ppow(xi, m - i)
                acc = [(u - p**i * v) % P for u, v in zip(acc, t)]
            d = p**m
            if any(a % d for a in acc):
                raise ArithmeticError("ghost vector not divisible; lift is not flat")
            comps.append([(a // d) % q for a in acc])
        return tuple(R.elem(c) for c in comps)


def _lift_for(R: FpkAlgebra, n: int) -> "LiftedAlgebra | None":
    cache = R.__dict__.setdefault("_witt_lifts", {})
    M = R.k + n + 1
    if M not in cache:
        cache[M] = LiftedAlgebra.try_build(R, M)
    return cache[M]


_MEMO_LIMIT = 1 << 19


class WittRing:
    """The ring W_n(R) of length-n Witt vectors over a finite algebra R."""

    def __init__(self, R: FpkAlgebra, n: int, allow_long: bool = False, engine: str = "auto"):
        if n < 1:
            raise WittError("length must be >= 1")
        if engine not in ("auto", "ghost", "poly"):
            raise WittError(f"unknown engine {engine!r}")
        self.R = R
        self.p = R.p
        self.n = n
        self._compiled: dict = {}
        self._lock = threading.Lock()
        self._lift = None
        self._memo: dict = {}
        if engine in ("auto", "ghost"):
            self._lift = _lift_for(R, n)
            if self._lift is None and engine == "ghost":
                raise WittError("structure constants do not lift to a flat algebra")
        self.engine = "ghost" if self._lift is not None else "poly"
        if self.engine == "poly" and n > length_cap(R.p) and not allow_long:
            raise WittError(f"length {n} exceeds default cap {length_cap(R.p)} for p={R.p}")

    def __repr__(self) -> str:
        return f"W_{self.n}({self.R.name})"

    # construction
    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.n

    @property
    def one(self) -> tuple[int, ...]:
        return (self.R.one,) + (0,) * (self.n - 1)

    def teich(self, a: int) -> tuple[int, ...]:
        return (a,) + (0,) * (self.n - 1)

    def vec(self, comps: Sequence[int]) -> tuple[int, ...]:
        comps = tuple(comps)
        if len(comps) != self.n:
            raise WittError(f"expected {self.n} components, got {len(comps)}")
        return comps

    def from_int(self, c: int) -> tuple[int, ...]:
        """Image of the integer c under Z -> W_n(R)."""
        comps = int_witt_components(c, self.p, self.n, self.R.q)
        return tuple(self.R.from_int(x) for x in comps)

    def elements(self) -> Iterator[tuple[int, ...]]:
        import itertools

        return itertools.product(range(self.R.size), repeat=self.n)

    @property
    def size(self) -> int:
        return self.R.size**self.n

    def random(self, rng: random.Random) -> tuple[int, ...]:
        return tuple(rng.randrange(self.R.size) for _ in range(self.n))

    # compiled universal polynomials
    def _get(self, kind: str):
        c = self._compiled.get(kind)
        if c is not None:
            return c
        with self._lock:
            c = self._compiled.get(kind)
            if c is not None:
                return c
            cache = poly_cache(self.p)
            n, q = self.n, self.R.q
            if kind in ("sum", "prod"):
                polys, L = cache.sum_polys(n) if kind == "sum" else cache.prod_polys(n)
                c = [_compile(P, q, lambda i, L=L: i if i < L else n + (i - L)) for P in polys]
            elif kind == "neg":
                c = [_compile(P, q, lambda i: i) for P in cache.neg_polys(n)]
            elif kind == "frob":
                # F: W_{n+1} -> W_n uses components 0..n of the input
                c = [_compile(P, q, lambda i: i) for P in cache.frob_polys(n)]
            else:
                raise KeyError(kind)
            self._compiled[kind] = c
            return c

    def _eval(self, compiled, values: Sequence[int]) -> tuple[int, ...]:
        R = self.R
        mul, add, pw, scale = R.mul, R.add, R.pow, R.scale
        powcache: dict = {}
        out = []
        for terms in compiled:
            acc = 0
            for coeff, mono in terms:
                t = None
                zero = False
                for var, e in mono:
                    v = values[var]
                    if v == 0:
                        zero = True
                        break
                    key = (var, e)
                    pv = powcache.get(key)
                    if pv is None:
                        pv = v if e == 1 else pw(v, e)
                        powcache[key] = pv
                    if pv == 0:
                        zero = True
                        break
                    t = pv if t is None else mul(t, pv)
                    if t == 0:
                        zero = True
                        break
                if zero:
                    continue
                if t is None:
                    t = R.one
                acc = add(acc, scale(coeff, t) if coeff != 1 else t)
            out.append(acc)
        return tuple(out)

    def _check(self, *xs) -> None:
        for x in xs:
            if len(x) != self.n:
                raise WittError(f"length mismatch: expected {self.n}, got {len(x)}")

    def _remember(self, key, value):
        if len(self._memo) > _MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = value
        return value

    def add(self, x, y):
        self._check(x, y)
        if not any(y):
            return tuple(x)
        if not any(x):
            return tuple(y)
        key = ("+", x, y)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        return self._remember(key, self._add(x, y))

    def _add(self, x, y):
        if self._lift is not None:
            L = self._lift
            gx, gy = L.ghost(x, self.n), L.ghost(y, self.n)
            return L.unghost([[a + b for a, b in zip(u, v)] for u, v in zip(gx, gy)])
        return self._eval(self._get("sum"), tuple(x) + tuple(y))

    def mul(self, x, y):
        self._check(x, y)
        if not any(x) or not any(y):
            return self.zero
        key = ("*", x, y)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        return self._remember(key, self._mul(x, y))

    def _mul(self, x, y):
        if self._lift is not None:
            L = self._lift
            gx, gy = L.ghost(x, self.n), L.ghost(y, self.n)
            return L.unghost([L.mul(u, v) for u, v in zip(gx, gy)])
        return self._eval(self._get("prod"), tuple(x) + tuple(y))

    def neg(self, x):
        self._check(x)
        if self.p != 2:
            return tuple(self.R.neg(a) for a in x)
        key = ("-", x)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        return self._remember(key, self._neg2(x))

    def _neg2(self, x):
        if self._lift is not None:
            L = self._lift
            return L.unghost([[-a for a in u] for u in L.ghost(x, self.n)])
        return self._eval(self._get("neg"), tuple(x))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def sum(self, xs: Iterable) -> tuple[int, ...]:
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def scalar(self, c: int, x):
        """Integer multiple c*x via double-and-add."""
        if c < 0:
            return self.scalar(-c, self.neg(x))
        acc = self.zero
        base = tuple(x)
        while c:
            if c & 1:
                acc = self.add(acc, base)
            c >>= 1
            if c:
                base = self.add(base, base)
        return acc

    def pow(self, x, e: int):
        acc = self.one
        base = tuple(x)
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return acc

    def V(self, x):
        """Verschiebung, truncated: (x_0,...,x_{n-1}) -> (0, x_0, ..., x_{n-2})."""
        self._check(x)
        return (0,) + tuple(x[:-1])

    def V_pow(self, x, r: int):
        for _ in range(r):
            x = self.V(x)
        return x

    def F(self, x):
        """Frobenius W_n -> W_n over F_p-algebras (componentwise p-th power)."""
        self._check(x)
        if not self.R.is_fp_algebra:
            raise WittError("F on W_n -> W_n needs an F_p-algebra; use F_long for W_{n+1} -> W_n")
        return tuple(self.R.pow(a, self.p) for a in x)

    def F_universal(self, x_long: Sequence[int]):
        """Frobenius W_{n+1}(R) -> W_n(R) through the universal polynomials."""
        if len(x_long) != self.n + 1:
            raise WittError(f"F_universal expects length {self.n + 1}")
        if self._lift is not None:
            L = _lift_for(self.R, self.n + 1)
            return L.unghost(L.ghost(x_long, self.n + 1)[1:])
        return self._eval(self._get("frob"), tuple(x_long))

    def truncate(self, x, m: int):
        return tuple(x[:m])

    def extend(self, x, m: int):
        return tuple(x) + (0,) * (m - len(x))

    def map_ring(self, hom, x):
        return tuple(hom(a) for a in x)

    def is_unit(self, x) -> bool:
        return self.R.is_unit(x[0])

    def inverse(self, x):
        """Inverse of a unit by Newton iteration y <- y*(2 - x*y)."""
        a0 = self.R.inverse(x[0])
        if a0 is None:
            raise WittError("not a unit")
        y = self.teich(a0)
        two = self.from_int(2)
        for _ in range(2 * self.n + 2 * self.R.k + 2):
            y2 = self.mul(y, self.sub(two, self.mul(x, y)))
            if y2 == y:
                break
            y = y2
        if self.mul(x, y) != self.one:
            raise WittError("Newton iteration failed to invert")
        return y


# -- integer helpers (ghost side) ----------------------------------------------

def int_witt_components(c: int, p: int, n: int, q: int) -> list[int]:
    """Witt components of the integer c, reduced mod q.

    Uses the ghost recursion modulo p^(e+n) where q = p^e, which is exact for
    the residues mod q.
    """
    e = 0
    while p**e < q:
        e += 1
    mod = p ** (e + n)
    comps: list[int] = []
    for m in range(n):
        acc = c
        for i, x in enumerate(comps):
            acc -= p**i * pow(x, p ** (m - i), mod * p**m)
        acc %= mod * p**m
        if acc % p**m:
            raise ArithmeticError("integer Witt recursion not integral")
        comps.append((acc // p**m) % mod)
    return [x % q for x in comps]


def ghost_vector(x: Sequence[int], p: int) -> list[int]:
    """Ghost components of an integral Witt vector (exact, over Z)."""
    return [sum(p**i * x[i] ** (p ** (m - i)) for i in range(m + 1)) for m in range(len(x))]


def from_ghost(w: Sequence[int], p: int) -> list[int]:
    """Inverse ghost map over Z; raises if w is not a ghost vector."""
    x: list[int] = []
    for m, wm in enumerate(w):
        acc = wm - sum(p**i * x[i] ** (p ** (m - i)) for i in range(m))
        if acc % p**m:
            raise ArithmeticError("not in the image of the ghost map")
        x.append(acc // p**m)
    return x


class GhostZpk:
    """W_n(Z/p^k) computed through ghost components modulo p^(k+n).

    Independent of the universal polynomials; used for constants that need
    long vectors and as an oracle in tests.
    """

    def __init__(self, p: int, k: int, n: int):
        self.p, self.k, self.n = p, k, n
        self.q = p**k
        self.mod = p ** (k + n)

    def ghost(self, x: Sequence[int]) -> list[int]:
        p, mod = self.p, self.mod
        return [sum(p**i * pow(x[i], p ** (m - i), mod) for i in range(m + 1)) % mod for m in range(self.n)]

    def unghost(self, w: Sequence[int]) -> list[int]:
        p, mod = self.p, self.mod
        x: list[int] = []
        for m in range(self.n):
            acc = (w[m] - sum(p**i * pow(x[i], p ** (m - i), mod) for i in range(m))) % mod
            if acc % p**m:
                raise ArithmeticError("not a ghost vector mod p^(k+n)")
            x.append((acc // p**m) % self.q)
        return x

    def add(self, x, y):
        return self.unghost([a + b for a, b in zip(self.ghost(x), self.ghost(y))])

    def sub(self, x, y):
        return self.unghost([a - b for a, b in zip(self.ghost(x), self.ghost(y))])

    def mul(self, x, y):
        return self.unghost([a * b for a, b in zip(self.ghost(x), self.ghost(y))])

    def teich(self, a: int):
        return [a % self.q] + [0] * (self.n - 1)

    def from_int(self, c: int):
        return self.unghost([c] * self.n)


# -- modified Verschiebung constants ------------------------------------------

@dataclass(frozen=True)
class WittConstants:
    """u0, alpha and p~ in W_n(Z/p^K)."""

    p: int
    n: int
    K: int
    u0: tuple[int, ...]
    alpha: tuple[int, ...]
    ptilde: tuple[int, ...]
    V_u0: tuple[int, ...]

    def in_ring(self, W: WittRing, which: str) -> tuple[int, ...]:
        """Image of a constant in W_m(R) for a Z/p^k-algebra R (needs m <= n, k <= K)."""
        vec = getattr(self, which)
        if W.n > self.n or W.R.k > self.K:
            raise WittError("constant computed at insufficient precision")
        return tuple(W.R.from_int(c) for c in vec[: W.n])


_CONST_CACHE: dict = {}


def compute_u0_alpha_ptilde(p: int, precision: int, K: int | None = None) -> WittConstants:
    """Constants for the modified Verschiebung at the given Witt length.

    For p = 2, u0 is pinned by V(u0) = 2 - [2]; for p >= 3, u0 = 1.
    alpha = prod_{m>=0} F^m(u0) is accumulated until the partial products
    stabilise in W_n(Z/p^K).
    """
    if precision < 1:
        raise WittError("precision must be >= 1")
    K = K or precision
    if K < precision:
        raise WittError("K must be >= precision")
    key = (p, precision, K)
    if key in _CONST_CACHE:
        return _CONST_CACHE[key]
    n = precision
    if p != 2:
        one = (1,) + (0,) * (n - 1)
        pt = tuple(int_witt_components(p, p, n, p**K))
        c = WittConstants(p, n, K, one, one, pt, tuple(int_witt_components(p, p, n, p**K)))
        _CONST_CACHE[key] = c
        return c
    # long working length so that F^m(u0) can be truncated back to n
    extra = 4 * K + 8
    L = n + 1 + extra
    G = GhostZpk(p, K, L)
    target = G.sub(G.from_int(p), G.teich(p))  # p - [p]
    if target[0] % p**K:
        raise WittError("p - [p] does not lie in the image of V")
    u0_long = target[1:] + [0]  # V(u0) = target, valid on the first L-1 components
    # F on ghost side: shift ghost components; F^m(u0) truncated to n
    Gn = GhostZpk(p, K, n)
    alpha = Gn.from_int(1)
    cur = u0_long[: L - 1]
    Gcur = GhostZpk(p, K, L - 1)
    for _ in range(extra):
        f_trunc = cur[:n]
        new_alpha = Gn.mul(alpha, f_trunc)
        wc = Gcur.ghost(cur)
        nxt_len = len(cur) - 1
        Gnext = GhostZpk(p, K, nxt_len)
        cur = Gnext.unghost(wc[1:])
        Gcur = Gnext
        if f_trunc == Gn.from_int(1) and new_alpha == alpha:
            break
        alpha = new_alpha
        if len(cur) <= n:
            raise WittError("alpha did not stabilise; raise K")
    u0 = tuple(u0_long[:n])
    Gp = GhostZpk(p, K, n)
    ptilde = tuple(Gp.mul(Gp.from_int(p), list(u0)))
    V_u0 = tuple(target[:n])
    c = WittConstants(p, n, K, u0, tuple(alpha), ptilde, V_u0)
    _CONST_CACHE[key] = c
    return c


def Vtilde(W: WittRing, x, consts: WittConstants | None = None):
    """Modified Verschiebung x -> V(u0 * x) in W_n(R)."""
    if W.p != 2:
        return W.V(x)
    consts = consts or compute_u0_alpha_ptilde(2, W.n, max(W.n, W.R.k))
    u0 = consts.in_ring(W, "u0")
    return W.V(W.mul(u0, x))


# -- divided powers on V W_n(R) ------------------------------------------------

def _pd_constant(m: int, p: int, mod: int) -> int:
    """p^(m-1)/m! as an element of Z/mod (a p-adic integer)."""
    f = math.factorial(m)
    v = 0
    while f % p == 0:
        f //= p
        v += 1
    if m - 1 < v:
        raise ArithmeticError("p^(m-1)/m! is not integral")
    return (p ** (m - 1 - v) * pow(f, -1, mod)) % mod


def divided_gamma(W: WittRing, m: int, x) -> tuple[int, ...]:
    """gamma_m on the ideal V W_n(R): gamma_m(V y) = (p^(m-1)/m!) V(y^m).

    For m = p this is (p-1)! gamma_p(V y) = p^(p-2) V(y^p).  Over p = 2 the
    formula is only used on F_p-algebras, where u0 = 1 and V~ = V.
    """
    if m < 1:
        raise WittError("m must be >= 1")
    if x[0] != 0:
        raise WittError("element is not in the image of V")
    if W.p == 2 and not W.R.is_fp_algebra:
        raise WittError("divided powers on V~ W at p=2 need an F_p-algebra")
    if m == 1:
        return tuple(x)
    y = tuple(x[1:]) + (0,)
    mod = W.p ** (W.n + W.R.k + 1)
    c = _pd_constant(m, W.p, mod)
    return W.mul(W.from_int(c), W.V(W.pow(y, m)))


def gamma0(W: WittRing, x):
    return W.one


# -- sparse hat-Witt vectors ---------------------------------------------------

class HatWittVec:
    """Finitely supported Witt vector with nilpotent entries."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: FpkAlgebra, entries: dict[int, int] | None = None, check: bool = True):
        self.ring = ring
        ent = {int(i): int(a) for i, a in (entries or {}).items() if a}
        if check:
            for i, a in ent.items():
                if i < 0:
                    raise WittError("negative index")
                if not ring.is_nilpotent(a):
                    raise WittError(f"entry at {i} is not nilpotent")
        self.entries = ent

    @property
    def support(self) -> int:
        """One past the largest nonzero index (0 for the zero vector)."""
        return max(self.entries) + 1 if self.entries else 0

    def dense(self, L: int) -> tuple[int, ...]:
        if self.support > L:
            raise WittError(f"support {self.support} exceeds requested length {L}")
        return tuple(self.entries.get(i, 0) for i in range(L))

    @classmethod
    def from_dense(cls, ring: FpkAlgebra, vec: Sequence[int], check: bool = True) -> "HatWittVec":
        return cls(ring, {i: a for i, a in enumerate(vec) if a}, check=check)

    def __eq__(self, other) -> bool:
        return isinstance(other, HatWittVec) and self.ring == other.ring and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.entries.items())))

    def __repr__(self) -> str:
        return f"HatWittVec({dict(sorted(self.entries.items()))})"


def hat_growth(ring: FpkAlgebra) -> int:
    """Extra support an operation can create: ceil(log_p e) for Nil(R)^e = 0."""
    e = nilpotency_index(ring)
    g = 0
    while ring.p**g < e:
        g += 1
    return g


def _hat_dense_ring(ring: FpkAlgebra, support: int) -> tuple[WittRing, int]:
    L = support + hat_growth(ring) + 1
    return WittRing(ring, max(L, 1), allow_long=True), L


def _hat_result(ring, vec, L) -> HatWittVec:
    out = HatWittVec.from_dense(ring, vec, check=False)
    if out.support >= L:
        raise WittError("internal: hat-Witt support reached the safe length")
    for a in out.entries.values():
        if not ring.is_nilpotent(a):
            raise WittError("internal: non-nilpotent entry in hat-Witt result")
    return out


def hat_add(x: HatWittVec, y: HatWittVec) -> HatWittVec:
    W, L = _hat_dense_ring(x.ring, max(x.support, y.support))
    return _hat_result(x.ring, W.add(x.dense(L), y.dense(L)), L)


def hat_neg(x: HatWittVec) -> HatWittVec:
    W, L = _hat_dense_ring(x.ring, x.support)
    return _hat_result(x.ring, W.neg(x.dense(L)), L)


def hat_sub(x: HatWittVec, y: HatWittVec) -> HatWittVec:
    return hat_add(x, hat_neg(y))


def hat_scale(w: Sequence[int], x: HatWittVec) -> HatWittVec:
    """w * x for a dense Witt vector w; w must be long enough to cover the result."""
    W, L = _hat_dense_ring(x.ring, x.support)
    if len(w) < L:
        raise WittError(f"scalar needs at least {L} components, got {len(w)}")
    return _hat_result(x.ring, W.mul(tuple(w[:L]), x.dense(L)), L)


def hat_V(x: HatWittVec) -> HatWittVec:
    return HatWittVec(x.ring, {i + 1: a for i, a in x.entries.items()}, check=False)


def hat_F(x: HatWittVec) -> HatWittVec:
    R = x.ring
    if R.is_fp_algebra:
        return HatWittVec(R, {i: R.pow(a, R.p) for i, a in x.entries.items()}, check=False)
    W, L = _hat_dense_ring(R, x.support)
    return _hat_result(R, W.F_universal(x.dense(L + 1)), L)


def hat_teich(ring: FpkAlgebra, a: int) -> HatWittVec:
    return HatWittVec(ring, {0: a})


def hat_support_bound_product(x: HatWittVec) -> int:
    return x.support + hat_growth(x.ring)
