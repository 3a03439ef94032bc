"""Finite commutative Z/p^k-algebras presented by structure constants.

Elements are encoded as plain ``int`` values: the coordinate vector
``(c_0, ..., c_{r-1})`` with respect to the basis is packed as
``sum(c_i * q**i)`` with ``q = p**k``.  This keeps elements hashable and
cheap, which matters for the enumeration-heavy code further up the stack.
Small algebras get lazily built addition and multiplication tables.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from sympy import isprime

from .zmod_linalg import howell_form, howell_reduce, smith_normal_form

TABLE_LIMIT = 729


class RingError(ValueError):
    """Raised for invalid ring data or unsupported operations."""


class FpkAlgebra:
    """A finite commutative algebra over Z/p^k with an explicit basis."""

    def __init__(
        self,
        p: int,
        k: int,
        struct_consts: Sequence[Sequence[Sequence[int]]],
        one_coords: Sequence[int],
        labels: Sequence[str] | None = None,
        name: str | None = None,
        check: bool = True,
    ):
        if not isprime(p):
            raise RingError(f"p={p} is not prime")
        if k < 1:
            raise RingError("k must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        self.rank = len(one_coords)
        q = self.q
        self.struct_consts = tuple(
            tuple(tuple(int(c) % q for c in struct_consts[i][j]) for j in range(self.rank))
            for i in range(self.rank)
        )
        self.one_coords = tuple(int(c) % q for c in one_coords)
        self.labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(self.rank))
        if len(self.labels) != self.rank:
            raise RingError("labels length differs from rank")
        self.name = name or f"R(p={p},k={k},rank={self.rank})"
        self.size = q**self.rank
        self._weights = tuple(q**i for i in range(self.rank))
        self._lock = threading.Lock()
        self._add_table: list[int] | None = None
        self._mul_table: list[int] | None = None
        self._basis_prod = [
            [self._pack(self.struct_consts[i][j]) for j in range(self.rank)] for i in range(self.rank)
        ]
        self.zero = 0
        self.one = self._pack(self.one_coords)
        if check:
            self.verify_axioms()

    # -- encoding ---------------------------------------------------------
    def _pack(self, coords: Iterable[int]) -> int:
        q = self.q
        return sum((int(c) % q) * w for c, w in zip(coords, self._weights))

    def elem(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise RingError(f"expected {self.rank} coordinates, got {len(coords)}")
        return self._pack(coords)

    def coords(self, x: int) -> tuple[int, ...]:
        q = self.q
        out = []
        for _ in range(self.rank):
            x, c = divmod(x, q)
            out.append(c)
        return tuple(out)

    def basis(self) -> list[int]:
        return [self._weights[i] for i in range(self.rank)]

    def elements(self) -> Iterator[int]:
        return iter(range(self.size))

    def from_int(self, n: int) -> int:
        return self.scale(n, self.one)

    # -- arithmetic -------------------------------------------------------
    def _raw_add(self, x: int, y: int) -> int:
        if self.rank == 1:
            return (x + y) % self.q
        a, b = self.coords(x), self.coords(y)
        return self._pack(s + t for s, t in zip(a, b))

    def _raw_mul(self, x: int, y: int) -> int:
        q = self.q
        if self.rank == 1:
            return (x * y * self.one_coords[0]) % q if self.one_coords[0] != 1 else (x * y) % q
        a, b = self.coords(x), self.coords(y)
        acc = [0] * self.rank
        sc = self.struct_consts
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
        return self._pack(acc)

    def _build_tables(self) -> None:
        with self._lock:
            if self._mul_table is not None:
                return
            n = self.size
            add = [0] * (n * n)
            mul = [0] * (n * n)
            for x in range(n):
                base = x * n
                for y in range(x, n):
                    s = self._raw_add(x, y)
                    m = self._raw_mul(x, y)
                    add[base + y] = s
                    add[y * n + x] = s
                    mul[base + y] = m
                    mul[y * n + x] = m
            self._add_table = add
            self._mul_table = mul

    def tables(self) -> tuple[list[int], list[int]] | None:
        if self.size > TABLE_LIMIT:
            return None
        if self._mul_table is None:
            self._build_tables()
        return self._add_table, self._mul_table  # type: ignore[return-value]

    def add(self, x: int, y: int) -> int:
        if self.rank == 1:
            return (x + y) % self.q
        t = self.tables()
        if t is not None:
            return t[0][x * self.size + y]
        return self._raw_add(x, y)

    def neg(self, x: int) -> int:
        if self.rank == 1:
            return (-x) % self.q
        return self._pack(-c for c in self.coords(x))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.rank == 1 and self.one_coords[0] == 1:
            return (x * y) % self.q
        t = self.tables()
        if t is not None:
            return t[1][x * self.size + y]
        return self._raw_mul(x, y)

    def scale(self, n: int, x: int) -> int:
        n %= self.q
        if self.rank == 1:
            return (n * x) % self.q
        return self._pack(n * c for c in self.coords(x))

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            raise RingError("negative exponent")
        result = self.one
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def sum(self, xs: Iterable[int]) -> int:
        acc = 0
        for x in xs:
            acc = self.add(acc, x)
        return acc

    # -- structure --------------------------------------------------------
    def verify_axioms(self) -> None:
        """Exhaustive commutativity, associativity and unit checks on the basis."""
        r = self.rank
        bp = self._basis_prod
        for i in range(r):
            for j in range(r):
                if bp[i][j] != bp[j][i]:
                    raise RingError(f"not commutative on basis pair ({i},{j})")
        basis = self.basis()
        for i, j, l in itertools.product(range(r), repeat=3):
            lhs = self._raw_mul(bp[i][j], basis[l])
            rhs = self._raw_mul(basis[i], bp[j][l])
            if lhs != rhs:
                raise RingError(f"not associative on basis triple ({i},{j},{l})")
        for i in range(r):
            if self._raw_mul(self.one, basis[i]) != basis[i]:
                raise RingError(f"unit law fails on basis element {i}")

    @property
    def is_fp_algebra(self) -> bool:
        return self.k == 1

    def nilpotency_bound(self) -> int:
        return self.q * self.rank

    def is_nilpotent(self, x: int) -> bool:
        return self.pow(x, self.nilpotency_bound()) == 0

    def is_unit(self, x: int) -> bool:
        return self.inverse(x) is not None

    def inverse(self, x: int) -> int | None:
        # the unit group is finite, so x^(order) = 1 for units; use x^-1 = x^(|R^*|-1)
        # only when cheap; otherwise solve the linear system a*x = 1.
        if self.rank == 1 and self.one_coords[0] == 1:
            try:
                return pow(x, -1, self.q)
            except ValueError:
                return None
        rows = [self.coords(self.mul(b, x)) for b in self.basis()]
        sol = solve_left(rows, self.one_coords, self.q)
        if sol is None:
            return None
        return self._pack(sol)

    def __repr__(self) -> str:
        return f"<FpkAlgebra {self.name}>"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "p": self.p,
            "k": self.k,
            "rank": self.rank,
            "labels": list(self.labels),
            "struct_consts": [[list(v) for v in row] for row in self.struct_consts],
            "one_coords": list(self.one_coords),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "FpkAlgebra":
        for key in ("p", "k", "rank", "struct_consts", "one_coords"):
            if key not in data:
                raise RingError(f"missing field '{key}'")
        if len(data["one_coords"]) != data["rank"]:
            raise RingError("one_coords length differs from rank")
        return cls(
            data["p"],
            data["k"],
            data["struct_consts"],
            data["one_coords"],
            labels=data.get("labels"),
            name=data.get("name"),
        )

    @classmethod
    def from_json(cls, text: str) -> "FpkAlgebra":
        return cls.from_dict(json.loads(text))

    # equality is structural
    def key(self) -> tuple:
        return (self.p, self.k, self.struct_consts, self.one_coords)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FpkAlgebra) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


def solve_left(rows: Sequence[Sequence[int]], target: Sequence[int], q: int) -> list[int] | None:
    """Find c with sum(c_i * rows[i]) == target over Z/q, or None."""
    n = len(rows)
    m = len(target)
    # augmented system on columns: rows are unknown coefficients
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    h = howell_form(aug, q)
    # reduce target (padded) against the coordinate part; track coefficients
    vec = [int(t) % q for t in target] + [0] * n
    for row in h:
        piv = next((c for c in range(m) if row[c]), None)
        if piv is None:
            continue
        a = row[piv]
        if vec[piv] % a:
            return None
        f = vec[piv] // a
        vec = [(v - f * r) % q for v, r in zip(vec, row)]
    if any(vec[:m]):
        return None
    return [(-c) % q for c in vec[m:]]


@dataclass(frozen=True)
class RingHom:
    """A Z/p^k-linear ring map given by images of basis elements."""

    src: FpkAlgebra
    dst: FpkAlgebra
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        if self.src.rank == 1:
            return self.dst.scale(x, self.images[0])
        acc = 0
        for c, img in zip(self.src.coords(x), self.images):
            if c:
                acc = self.dst.add(acc, self.dst.scale(c, img))
        return acc

    def verify(self) -> None:
        src, dst = self.src, self.dst
        if self(src.one) != dst.one:
            raise RingError("map does not preserve 1")
        b = src.basis()
        for i in range(src.rank):
            for j in range(i, src.rank):
                if self(src.mul(b[i], b[j])) != dst.mul(self.images[i], self.images[j]):
                    raise RingError(f"map not multiplicative on basis pair ({i},{j})")
        # additivity on coefficients: scaling must be compatible with dst characteristic
        if dst.scale(src.q, dst.one) != 0:
            raise RingError("target characteristic incompatible with source")


class RingIdeal:
    """Ideal of an FpkAlgebra with a Howell-reduced basis of its coordinate module."""

    def __init__(self, ring: FpkAlgebra, generators: Iterable[int]):
        self.ring = ring
        self.generators = tuple(generators)
        rows = [ring.coords(ring.mul(g, b)) for g in self.generators for b in ring.basis()]
        self.basis_rows = tuple(tuple(r) for r in howell_form(rows, ring.q))

    @property
    def basis(self) -> list[int]:
        return [self.ring.elem(r) for r in self.basis_rows]

    def contains(self, x: int) -> bool:
        return howell_reduce(self.basis_rows, self.ring.coords(x), self.ring.q) is not None

    def __contains__(self, x: int) -> bool:
        return self.contains(x)

    def is_zero(self) -> bool:
        return not self.basis_rows

    def verify(self) -> None:
        for x in self.basis:
            for b in self.ring.basis():
                if not self.contains(self.ring.mul(x, b)):
                    raise RingError("generating set does not span an ideal")

    def elements(self) -> list[int]:
        """All elements, by closing the span (finite)."""
        seen = {0}
        frontier = [0]
        gens = self.basis
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.ring.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingIdeal) and self.ring == other.ring and self.basis_rows == other.basis_rows

    def __hash__(self) -> int:
        return hash(self.basis_rows)

    def __repr__(self) -> str:
        return f"<RingIdeal of {self.ring.name} basis={list(self.basis_rows)}>"


# -- constructors ------------------------------------------------------------

def make_zmod(p: int, k: int = 1) -> FpkAlgebra:
    if not isprime(p):
        raise RingError(f"p={p} is not prime")
    name = f"F{p}" if k == 1 else f"Z/{p**k}"
    return FpkAlgebra(p, k, [[[1]]], [1], labels=["1"], name=name)


def make_field(p: int, poly: Sequence[int], k: int = 1, name: str | None = None, var: str = "a") -> FpkAlgebra:
    """Z/p^k[a]/(poly) for a monic poly given as coefficients low-to-high.

    For k == 1 and poly irreducible mod p this is the field F_{p^d}; for k > 1
    it is the corresponding Galois ring.  Irreducibility is checked mod p.
    """
    d = len(poly) - 1
    if d < 1 or poly[-1] % p != 1:
        raise RingError("poly must be monic of degree >= 1")
    if not _irreducible_mod_p(poly, p):
        raise RingError(f"{list(poly)} is not irreducible mod {p}")
    q = p**k
    struct = _monomial_struct(d, lambda e: _reduce_power(e, poly, q), q)
    labels = ["1"] + [f"{var}" if i == 1 else f"{var}^{i}" for i in range(1, d)]
    return FpkAlgebra(p, k, struct, [1] + [0] * (d - 1), labels=labels,
                      name=name or (f"F{p**d}" if k == 1 else f"GR({q},{d})"))


def _reduce_power(e: int, poly: Sequence[int], q: int) -> list[int]:
    d = len(poly) - 1
    vec = [0] * d
    if e < d:
        vec[e] = 1
        return vec
    cur = [0] * d
    cur[0] = 1
    for _ in range(e):
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(c - top * poly[i]) % q for i, c in enumerate(cur)]
    return cur


def _monomial_struct(d: int, power: Callable[[int], list[int]], q: int) -> list[list[list[int]]]:
    return [[power(i + j) for j in range(d)] for i in range(d)]


def _poly_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    while a and a[-1] == 0:
        a.pop()
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        f = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _irreducible_mod_p(poly: Sequence[int], p: int) -> bool:
    poly = [c % p for c in poly]
    d = len(poly) - 1
    if d == 1:
        return True
    # brute force: no monic factor of degree <= d/2
    for deg in range(1, d // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            f = list(tail) + [1]
            if not _poly_mod(list(poly), f, p):
                return False
    return True


def extend_nilpotent(R: FpkAlgebra, m: int, var: str = "t", name: str | None = None) -> FpkAlgebra:
    """R[var]/(var^m) with basis e_i * var^j."""
    if m < 1:
        raise RingError("m must be >= 1")
    r = R.rank
    labels = []
    for j in range(m):
        for i in range(r):
            base = R.labels[i]
            if j == 0:
                labels.append(base)
            else:
                mono = var if j == 1 else f"{var}^{j}"
                labels.append(mono if base == "1" else f"{base}*{mono}")
    n = r * m
    struct = []
    for a in range(n):
        ja, ia = divmod(a, r)
        row = []
        for b in range(n):
            jb, ib = divmod(b, r)
            vec = [0] * n
            if ja + jb < m:
                for t, c in enumerate(R.struct_consts[ia][ib]):
                    vec[(ja + jb) * r + t] = c
            row.append(vec)
        struct.append(row)
    one = list(R.one_coords) + [0] * (n - r)
    return FpkAlgebra(R.p, R.k, struct, one, labels=labels,
                      name=name or f"{R.name}[{var}]/({var}^{m})")


def make_ideal(R: FpkAlgebra, generators: Iterable[int]) -> RingIdeal:
    return RingIdeal(R, generators)


def make_quotient(R: FpkAlgebra, I: RingIdeal, name: str | None = None) -> tuple[FpkAlgebra, RingHom]:
    """Quotient algebra R/I together with the projection."""
    if I.ring != R:
        raise RingError("ideal belongs to a different ring")
    I.verify()
    q, r = R.q, R.rank
    rel = [list(row) for row in I.basis_rows] + [[q if i == j else 0 for j in range(r)] for i in range(r)]
    diag, _U, V = smith_normal_form(rel)
    Vinv = _unimodular_inverse(V)
    kept = [i for i in range(r) if i >= len(diag) or diag[i] != 1]
    exps = {(diag[i] if i < len(diag) else 0) for i in kept}
    if 0 in exps:
        raise RingError("internal: quotient not torsion")
    if len(exps) > 1:
        raise RingError(f"quotient module is not free over a single Z/p^e (invariant factors {sorted(exps)})")
    if not kept:
        raise RingError("quotient is the zero ring")
    mod = exps.pop()
    k2 = 0
    while R.p**k2 < mod:
        k2 += 1
    if R.p**k2 != mod:
        raise RingError("internal: non prime-power invariant factor")

    def project_coords(coords: Sequence[int]) -> list[int]:
        row = [sum(coords[a] * V[a][i] for a in range(r)) for i in range(r)]
        return [row[i] % mod for i in kept]

    basis_elems = [R.elem([c % q for c in Vinv[i]]) for i in kept]
    struct = [[project_coords(R.coords(R.mul(bi, bj))) for bj in basis_elems] for bi in basis_elems]
    one = project_coords(R.coords(R.one))
    Q = FpkAlgebra(R.p, k2, struct, one, name=name or f"{R.name}/I")
    proj = RingHom(R, Q, tuple(Q.elem(project_coords(R.coords(b))) for b in R.basis()))
    proj.verify()
    return Q, proj


def _unimodular_inverse(V: list[list[int]]) -> list[list[int]]:
    from sympy import Matrix

    inv = Matrix(V).inv()
    return [[int(inv[i, j]) for j in range(inv.cols)] for i in range(inv.rows)]


def nilradical(R: FpkAlgebra) -> RingIdeal:
    """Ideal of nilpotent elements, found by exhausting R."""
    cached = getattr(R, "_nilradical", None)
    if cached is not None:
        return cached
    nil = [x for x in R.elements() if x and R.is_nilpotent(x)]
    ideal = RingIdeal(R, nil)
    R._nilradical = ideal  # type: ignore[attr-defined]
    return ideal


def nilpotency_index(R: FpkAlgebra) -> int:
    """Least e with x_1*...*x_e = 0 for all x_i in Nil(R)."""
    nil = nilradical(R)
    basis = nil.basis
    if not basis:
        return 1
    e = 1
    current = [b for b in basis]
    while True:
        if all(x == 0 for x in current):
            return e
        current = RingIdeal(R, [R.mul(x, b) for x in current for b in basis]).basis
        e += 1
        if not current:
            return e


def frobenius_endo(R: FpkAlgebra) -> RingHom:
    """x -> x^p on an F_p-algebra."""
    if R.k != 1:
        raise RingError("frobenius_endo needs an F_p-algebra (k == 1)")
    hom = RingHom(R, R, tuple(R.pow(b, R.p) for b in R.basis()))
    hom.verify()
    return hom


@dataclass(frozen=True)
class ResidueData:
    ring: FpkAlgebra
    field: FpkAlgebra
    projection: RingHom
    section: tuple[int, ...]
    nil: RingIdeal

    @property
    def degree(self) -> int:
        return self.field.rank

    def lift(self, a: int) -> int:
        return self.section[a]


def residue_section(R: FpkAlgebra) -> ResidueData:
    """Residue field of a local Artinian F_p-algebra and its multiplicative section."""
    cached = getattr(R, "_residue", None)
    if cached is not None:
        return cached
    if R.k != 1:
        raise RingError(f"{R.name} is not an F_p-algebra")
    nil = nilradical(R)
    k, proj = make_quotient(R, nil, name=f"{R.name}_red")
    # local iff the reduction is a field: every nonzero element invertible
    for a in k.elements():
        if a and k.inverse(a) is None:
            raise RingError(f"{R.name} is not local (reduction is not a field)")
    d = k.rank
    frob_d = R.p**d
    images = []
    for b in k.basis():
        x = _any_preimage(proj, b)
        for _ in range(R.size.bit_length() + 2):
            y = R.pow(x, frob_d)
            if y == x:
                break
            x = y
        else:
            raise RingError("Frobenius iteration did not stabilise (residue field not perfect?)")
        images.append(x)
    sec_hom = RingHom(k, R, tuple(images))
    section = tuple(sec_hom(a) for a in k.elements())
    for a in k.elements():
        if proj(section[a]) != a:
            raise RingError("section is not a right inverse of the projection")
        for b in k.elements():
            if section[k.mul(a, b)] != R.mul(section[a], section[b]):
                raise RingError("section is not multiplicative")
    data = ResidueData(R, k, proj, section, nil)
    R._residue = data  # type: ignore[attr-defined]
    return data


def _any_preimage(hom: RingHom, y: int) -> int:
    for x in hom.src.elements():
        if hom(x) == y:
            return x
    raise RingError("projection is not surjective")


def set_section(hom: RingHom) -> dict[int, int]:
    """Some set-theoretic preimage for every element of the target."""
    out: dict[int, int] = {}
    for x in hom.src.elements():
        out.setdefault(hom(x), x)
    if len(out) != hom.dst.size:
        raise RingError("map is not surjective")
    return out


def is_artinian_local_fp(R: FpkAlgebra) -> bool:
    try:
        residue_section(R)
    except RingError:
        return False
    return True


def is_perfect_field(R: FpkAlgebra) -> bool:
    if R.k != 1:
        return False
    return nilradical(R).is_zero() and is_artinian_local_fp(R)
