"""Smith and Howell normal forms, and homology of maps of finite abelian p-groups."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Hashable, Iterable, Sequence

DEFAULT_CAP = 2**20


class SizeCapExceeded(RuntimeError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: {size} elements exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


# -- Smith normal form over Z -------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(inner)) for j in range(cols)] for i in range(len(A))]


def _round_div(a: int, b: int) -> int:
    # nearest-integer quotient keeps remainders within |b|/2 and entries small
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else -1
    return q


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Return (diag, U, V) with U*M*V diagonal, diag the nonzero invariant factors.

    ``diag`` lists the positive diagonal entries in divisibility order; U and V
    are unimodular.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f*row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    f = _round_div(A[i][t], A[t][t])
                    add_row(i, t, -f)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    f = _round_div(A[t][j], A[t][t])
                    add_col(j, t, -f)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility: pivot must divide the rest of the block
                for i in range(t + 1, m):
                    bad = next((j for j in range(t + 1, n) if A[i][j] % A[t][t]), None)
                    if bad is not None:
                        add_row(t, i, 1)
                        done = False
                        break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    diag = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    return diag, U, V


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    return smith_normal_form(M)[0]


class PresentedGroup:
    """A finite abelian group spanned by ``generators`` inside an ambient addition.

    Built coset by coset: each kept generator g with H the span so far adds the
    cosets H + g, H + 2g, ... until m*g lands in H, giving the relation
    m*e_g - coords(m*g).  ``coords`` maps every element to integer
    coordinates in the kept generators; ``relations`` has full rank.
    """

    def __init__(self, generators: Iterable[Hashable], add, zero: Hashable, cap: int = DEFAULT_CAP,
                 name: str = "group"):
        group = [zero]
        coords: dict = {zero: ()}
        kept: list = []
        rels: list = []
        for g in generators:
            if g in coords:
                continue
            k = len(kept)
            kept.append(g)
            H = list(group)
            step, m = g, 1
            while step not in coords:
                for h in H:
                    y = add(h, step)
                    coords[y] = coords[h] + (0,) * (k - len(coords[h])) + (m,)
                    group.append(y)
                if len(coords) > cap:
                    raise SizeCapExceeded(name, len(coords), cap)
                step, m = add(step, g), m + 1
            c = coords[step]
            rels.append([-x for x in c] + [0] * (k - len(c)) + [m])
        r = len(kept)
        self.name = name
        self.zero = zero
        self.add = add
        self.generators = kept
        self.coords = {x: c + (0,) * (r - len(c)) for x, c in coords.items()}
        self.relations = [row + [0] * (r - len(row)) for row in rels]
        self.elements = group

    def __len__(self) -> int:
        return len(self.coords)

    def __contains__(self, x) -> bool:
        return x in self.coords


def block_diagonal(blocks: Sequence[Sequence[Sequence[int]]], widths: Sequence[int]) -> list[list[int]]:
    """Stack relation blocks on disjoint coordinate ranges."""
    total = sum(widths)
    out = []
    off = 0
    for rows, w in zip(blocks, widths):
        for row in rows:
            full = [0] * total
            full[off:off + w] = row
            out.append(full)
        off += w
    return out


def presented_map_homology(rel_src: Sequence[Sequence[int]], rel_tgt: Sequence[Sequence[int]],
                           images: Sequence[Sequence[int]]) -> tuple[list[int], list[int]]:
    """Kernel and cokernel of A = Z^r/rel_src -> B = Z^s/rel_tgt, generator i -> images[i].

    Both relation lattices must have full rank (finite groups).  Returns the
    nontrivial invariant factors of (kernel, cokernel).
    """
    r = len(images)
    s = len(rel_tgt[0]) if rel_tgt else (len(images[0]) if images else 0)
    if s:
        d, _, _ = smith_normal_form([list(row) for row in rel_tgt] + [list(row) for row in images])
        if len(d) != s:
            raise ValueError("cokernel is infinite; target relations are not of full rank")
        coker = sorted(x for x in d if x != 1)
    else:
        coker = []
    if r == 0:
        return [], coker
    if not s:
        kd, _, _ = smith_normal_form(rel_src)
        return sorted(x for x in kd if x != 1), coker
    ker = _pgroup_kernel(rel_src, rel_tgt, images)
    if ker is not None:
        return ker, coker
    # left kernel of [images; rel_tgt], projected to the source coordinates
    stacked = [list(row) for row in images] + [list(row) for row in rel_tgt]
    d, U, _ = smith_normal_form(stacked)
    span = [U[i][:r] for i in range(len(d), len(stacked))]
    span = [row for row in span if any(row)]
    if not span:
        raise ValueError("kernel lattice is degenerate")
    # basis of the kernel lattice is diag(kd) V^-1; rel_src = C * basis with C = rel_src V diag(kd)^-1
    kd, _, V = smith_normal_form(span)
    if len(kd) != r:
        raise ValueError("kernel lattice does not have full rank")
    C = []
    for row in rel_src:
        rv = [sum(row[t] * V[t][j] for t in range(r)) for j in range(r)]
        if any(rv[j] % kd[j] for j in range(r)):
            raise ValueError("source relations do not lie in the kernel lattice")
        C.append([rv[j] // kd[j] for j in range(r)])
    cd, _, _ = smith_normal_form(C)
    if len(cd) != r:
        raise ValueError("source relations are not of full rank")
    return sorted(x for x in cd if x != 1), coker


def _prime_of(values: Iterable[int]) -> int | None:
    """The unique prime dividing every value > 1, or None (also when all are 1)."""
    p = None
    for v in values:
        if v == 1:
            continue
        q = next(d for d in range(2, v + 1) if v % d == 0)
        while v % q == 0:
            v //= q
        if v != 1 or (p is not None and p != q):
            return None
        p = q
    return p


def _unimodular_inverse(V: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(V)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c])
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    out = [[int(x) for x in row[n:]] for row in A]
    if any(x.denominator != 1 for row in A for x in row[n:]):
        raise ValueError("matrix is not unimodular")
    return out


def _pgroup_kernel(rel_src, rel_tgt, images) -> list[int] | None:
    """Kernel type of a map of finite p-groups from the counts |ker[p^j]|.

    Works in Smith coordinates of source and target and measures images of
    the p^j-torsion with Howell forms over Z/q, so no transform of the
    stacked matrix is ever formed.  Returns None when the groups are not
    p-groups for a single prime.
    """
    a, _, Va = smith_normal_form(rel_src)
    b, _, Vb = smith_normal_form(rel_tgt)
    r, s = len(images), len(images[0])
    if len(a) != r or len(b) != s:
        return None
    p = _prime_of(list(a) + list(b))
    if p is None:
        return None if any(x != 1 for x in a) else []
    Vinv = _unimodular_inverse(Va)
    # image of source SNF generator i in target SNF coordinates
    T = matmul(matmul(Vinv, images), Vb)
    cols = [j for j in range(s) if b[j] != 1]
    q = max((b[j] for j in cols), default=1)
    top = 0
    while p**top < max(a):
        top += 1
    counts = {}
    for j in range(top + 1):
        pj = p**j
        size_tors = 1
        gens = []
        for i in range(r):
            g = gcd(a[i], pj)
            size_tors *= g
            m = a[i] // g
            gens.append([(m * T[i][c] % b[c]) * (q // b[c]) for c in cols])
        img = 1
        if cols:
            for row in howell_form(gens, q):
                pc = next(c for c in range(len(row)) if row[c])
                img *= q // row[pc]
        counts[j] = size_tors // img
    return type_from_order_counts(p, counts) if counts[top] > 1 else []


# -- Howell form over Z/p^k ---------------------------------------------------

def howell_form(rows: Iterable[Sequence[int]], q: int) -> list[list[int]]:
    """Canonical Howell form of the row span over Z/q, q a prime power.

    Pivots are divisors of q, entries above a pivot are reduced below it, and
    annihilator multiples of every pivot row are fed back so the result has
    the Howell property (membership is decided by plain reduction).
    """
    pool = [[int(c) % q for c in r] for r in rows]
    pool = [r for r in pool if any(r)]
    if not pool:
        return []
    ncols = len(pool[0])
    result: list[list[int]] = []
    for col in range(ncols):
        cand = [i for i, r in enumerate(pool) if r[col]]
        if not cand:
            continue
        best = min(cand, key=lambda i: gcd(pool[i][col], q))
        row = pool[best]
        g = gcd(row[col], q)
        inv = pow(row[col] // g, -1, q)
        piv = [(c * inv) % q for c in row]
        newpool = []
        for i, r in enumerate(pool):
            if i == best:
                continue
            if r[col]:
                f = r[col] // g
                r = [(a - f * b) % q for a, b in zip(r, piv)]
            if any(r):
                newpool.append(r)
        ann = [(c * (q // g)) % q for c in piv]
        if any(ann):
            newpool.append(ann)
        pool = newpool
        result.append(piv)
    for i in range(len(result)):
        pc = next(c for c in range(ncols) if result[i][c])
        pv = result[i][pc]
        for j in range(i):
            f = result[j][pc] // pv
            if f:
                result[j] = [(a - f * b) % q for a, b in zip(result[j], result[i])]
    return result


def howell_reduce(basis: Sequence[Sequence[int]], vec: Sequence[int], q: int) -> list[int] | None:
    """Coefficients-free membership: reduce vec by a Howell basis; None if not a member."""
    v = [int(c) % q for c in vec]
    for row in basis:
        pc = next((c for c in range(len(row)) if row[c]), None)
        if pc is None:
            continue
        pv = row[pc]
        if v[pc] % pv:
            return None
        f = v[pc] // pv
        if f:
            v = [(a - f * b) % q for a, b in zip(v, row)]
    if any(v):
        return None
    return v


def same_row_span(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], q: int) -> bool:
    return howell_form(A, q) == howell_form(B, q)


# -- finite abelian p-groups -------------------------------------------------

def type_from_order_counts(p: int, counts: dict[int, int]) -> list[int]:
    """Invariant factors p^e from counts[j] = #{x : p^j x = 0}.

    For a p-group with invariant factors p^{e_i}, log_p of counts[j] equals
    sum(min(e_i, j)); consecutive differences give the number of e_i >= j.
    """
    logs = {}
    for j, c in counts.items():
        e = 0
        while p**e < c:
            e += 1
        if p**e != c:
            raise ValueError(f"count {c} is not a power of {p}")
        logs[j] = e
    top = max(logs)
    ge = [logs[j] - logs[j - 1] for j in range(1, top + 1)]  # ge[j-1] = #{e_i >= j}
    factors = []
    for j in range(1, top + 1):
        n_exact = ge[j - 1] - (ge[j] if j < top else 0)
        factors.extend([p**j] * n_exact)
    return sorted(factors)


@dataclass
class EnumGroup:
    """A finite abelian group given by an explicit element list and addition."""

    elements: list[Hashable]
    add: Callable[[Hashable, Hashable], Hashable]
    zero: Hashable
    neg: Callable[[Hashable], Hashable] | None = None
    name: str = ""

    def __post_init__(self):
        self._index = None

    def __len__(self) -> int:
        return len(self.elements)

    def index(self) -> set:
        if self._index is None:
            self._index = set(self.elements)
        return self._index

    def check_closure(self, samples: int | None = None) -> None:
        idx = self.index()
        els = self.elements if samples is None else self.elements[:samples]
        for x in els:
            for y in els:
                if self.add(x, y) not in idx:
                    raise ValueError(f"{self.name}: not closed under addition")

    def multiple(self, n: int, x: Hashable) -> Hashable:
        acc = self.zero
        base = x
        while n:
            if n & 1:
                acc = self.add(acc, base)
            n >>= 1
            if n:
                base = self.add(base, base)
        return acc


def element_order(add, zero, x, limit: int) -> int:
    acc = x
    n = 1
    while acc != zero:
        acc = add(acc, x)
        n += 1
        if n > limit:
            raise ValueError("element order exceeds group size")
    return n


def classify_elements(p: int, elements: Iterable[Hashable], add, zero) -> list[int]:
    """Invariant factors of a finite abelian p-group from its element orders."""
    els = list(elements)
    size = len(els)
    orders = Counter()
    for x in els:
        orders[element_order(add, zero, x, size)] += 1
    return _factors_from_orders(p, orders, size)


def _factors_from_orders(p: int, orders: Counter, size: int) -> list[int]:
    if size == 1:
        return []
    counts = {}
    j = 0
    while True:
        c = sum(v for o, v in orders.items() if p**j % o == 0)
        counts[j] = c
        if c == size:
            break
        j += 1
        if j > 64:
            raise ValueError("not a p-group")
    return type_from_order_counts(p, counts)


def group_order(factors: Sequence[int]) -> int:
    out = 1
    for f in factors:
        out *= f
    return out


def torsion_count(factors: Sequence[int], p: int, n: int) -> int:
    """|G[p^n]| for G with the given invariant factors."""
    out = 1
    for f in factors:
        out *= min(f, p**n)
    return out


@dataclass
class AbGroupMap:
    """Additive map between enumerated finite groups."""

    source: EnumGroup
    target: EnumGroup
    func: Callable[[Hashable], Hashable]
    additivity_checked: str = "none"

    def __call__(self, x):
        return self.func(x)

    def check_additivity(self, pairs: Iterable[tuple] | None = None, cap: int = 2**10) -> None:
        src = self.source
        if pairs is None:
            if len(src) > cap:
                raise SizeCapExceeded("additivity check", len(src), cap)
            pairs = ((x, y) for x in src.elements for y in src.elements)
            self.additivity_checked = "exhaustive"
        else:
            self.additivity_checked = "sampled"
        for x, y in pairs:
            if self.func(src.add(x, y)) != self.target.add(self.func(x), self.func(y)):
                raise ValueError("map is not additive")


@dataclass
class Homology:
    H0: list[int]
    H1: list[int]
    source_size: int
    target_size: int
    kernel: list = field(default_factory=list, repr=False)

    @property
    def order_H0(self) -> int:
        return group_order(self.H0)

    @property
    def order_H1(self) -> int:
        return group_order(self.H1)

    def euler_ok(self) -> bool:
        return self.order_H0 * self.target_size == self.order_H1 * self.source_size


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def complex_homology(f: AbGroupMap, p: int, cap: int = DEFAULT_CAP, classify_cokernel: bool = True) -> Homology:
    """Kernel and cokernel of an additive map of finite p-groups, by enumeration."""
    src, tgt = f.source, f.target
    for g in (src, tgt):
        if len(g) > cap:
            raise SizeCapExceeded(g.name or "group", len(g), cap)
    image = set()
    kernel = []
    for x in src.elements:
        y = f(x)
        image.add(y)
        if y == tgt.zero:
            kernel.append(x)
    if len(image) * len(kernel) != len(src):
        raise ValueError("map is not additive (|image|*|kernel| != |source|)")
    H0 = classify_elements(p, kernel, src.add, src.zero)
    coker_size = len(tgt) // len(image)
    if coker_size * len(image) != len(tgt):
        raise ValueError("image size does not divide target size")
    if classify_cokernel:
        H1 = _classify_quotient(p, tgt, image, coker_size)
    else:
        H1 = [coker_size] if coker_size > 1 else []
    return Homology(H0, H1, len(src), len(tgt), kernel)


def _classify_quotient(p: int, tgt: EnumGroup, image: set, coker_size: int) -> list[int]:
    """Invariant factors of tgt/image via coset union-find and coset orders."""
    if coker_size == 1:
        return []
    els = tgt.elements
    pos = {x: i for i, x in enumerate(els)}
    uf = _UnionFind(len(els))
    zero_i = pos[tgt.zero]
    for y in image:
        uf.union(zero_i, pos[y])
    gens = _small_generating_set(list(image), tgt.add, tgt.zero)
    # translate cosets: x ~ x + g for image generators g
    for x in els:
        xi = pos[x]
        for g in gens:
            uf.union(xi, pos[tgt.add(x, g)])
    reps = {}
    for x in els:
        r = uf.find(pos[x])
        reps.setdefault(r, x)
    if len(reps) != coker_size:
        raise ValueError("coset enumeration inconsistent with cokernel size")
    orders = Counter()
    for r, x in reps.items():
        acc, n = x, 1
        while uf.find(pos[acc]) != uf.find(zero_i):
            acc = tgt.add(acc, x)
            n += 1
        orders[n] += 1
    return _factors_from_orders(p, orders, coker_size)


def _small_generating_set(elements: list, add, zero) -> list:
    """Greedy generating set of the subgroup spanned by ``elements``."""
    span = {zero}
    gens = []
    for x in elements:
        if x in span:
            continue
        gens.append(x)
        frontier = list(span)
        new = set(span)
        # close span under adding x repeatedly
        while frontier:
            nxt = []
            for s in frontier:
                t = add(s, x)
                if t not in new:
                    new.add(t)
                    nxt.append(t)
            frontier = nxt
        span = new
        if len(span) == len(set(elements)) and set(elements) <= span:
            break
    return gens
