"""Named test rings, windows and relative pairs used by the suites and the CLI."""

from __future__ import annotations

import itertools
from typing import Callable

from .frame_instances import PdIdeal, WittFrame, trivial_pd
from .frames import Frame, Window, direct_sum, twist_window, unit_window
from .ring_base import FpkAlgebra, extend_nilpotent, make_field, make_zmod

# irreducible polynomials, low-to-high
FIELD_POLYS = {
    (2, 1): [0, 1],
    (2, 2): [1, 1, 1],
    (2, 3): [1, 1, 0, 1],
    (3, 1): [0, 1],
    (3, 2): [1, 0, 1],
    (3, 3): [1, 2, 0, 1],
}


def finite_field(p: int, m: int) -> FpkAlgebra:
    if m == 1:
        return make_zmod(p)
    return make_field(p, FIELD_POLYS[(p, m)])


def square_zero_ring(R: FpkAlgebra, d: int, names: str = "xyzw", name: str | None = None) -> FpkAlgebra:
    """R[x_1..x_d]/(x_i x_j), a local ring whose maximal ideal squares to zero."""
    r = R.rank
    n = r * (d + 1)
    struct = []
    for a in range(n):
        ja, ia = divmod(a, r)
        row = []
        for b in range(n):
            jb, ib = divmod(b, r)
            vec = [0] * n
            if ja == 0 or jb == 0:
                j = ja + jb
                for t, c in enumerate(R.struct_consts[ia][ib]):
                    vec[j * r + t] = c
            row.append(vec)
        struct.append(row)
    labels = []
    for j in range(d + 1):
        for i in range(r):
            base = R.labels[i]
            if j == 0:
                labels.append(base)
            else:
                labels.append(names[j - 1] if base == "1" else f"{base}*{names[j - 1]}")
    one = list(R.one_coords) + [0] * (n - r)
    vs = ",".join(names[:d])
    sq = ",".join(f"{a}{b}" if a != b else f"{a}^2" for a, b in itertools.combinations_with_replacement(names[:d], 2))
    return FpkAlgebra(R.p, R.k, struct, one, labels=labels, name=name or f"{R.name}[{vs}]/({sq})")


def ring_grid() -> list[FpkAlgebra]:
    """Artinian local rings with perfect residue field used across the suites."""
    F2, F3 = make_zmod(2), make_zmod(3)
    F4, F9 = finite_field(2, 2), finite_field(3, 2)
    return [
        extend_nilpotent(F2, 2),
        extend_nilpotent(F2, 3),
        extend_nilpotent(F4, 2),
        extend_nilpotent(F3, 2),
        square_zero_ring(F2, 2),
        extend_nilpotent(F9, 2),
    ]


def witt_law_rings() -> list[FpkAlgebra]:
    """Rings for the Witt law suite: fields, nilpotent extensions, Z/p^k."""
    F2, F3 = make_zmod(2), make_zmod(3)
    return [
        F2, F3, finite_field(2, 2), finite_field(3, 2), finite_field(2, 3),
        extend_nilpotent(F2, 2), extend_nilpotent(F2, 3), extend_nilpotent(F3, 2),
        square_zero_ring(F2, 2), make_zmod(2, 2), make_zmod(3, 2),
    ]


def nilpotent_test_rings(p: int = 2) -> list[FpkAlgebra]:
    F = make_zmod(p)
    return [extend_nilpotent(F, 2), extend_nilpotent(F, 3), square_zero_ring(F, 2)]


def relative_pairs() -> list[tuple[str, PdIdeal]]:
    """Surjections R' -> R = R'/a with a^2 = 0, as (label, trivial pd ideal)."""
    out = []
    F2, F3 = make_zmod(2), make_zmod(3)
    specs = [
        (extend_nilpotent(F2, 2), "t"),
        (extend_nilpotent(F2, 3), "t^2"),
        (extend_nilpotent(F2, 4), "t^2"),
        (extend_nilpotent(F3, 2), "t"),
        (square_zero_ring(F2, 2), "x"),
    ]
    for R, gen in specs:
        g = R.elem([1 if lab == gen else 0 for lab in R.labels])
        out.append((f"{R.name} -> /({gen})", trivial_pd(R, [g], name=gen)))
    return out


# -- windows -----------------------------------------------------------------------------

WINDOW_MATRICES = {
    # name: (r0, r1, integer Psi)
    "unit": (1, 0, [[1]]),
    "twist": (0, 1, [[1]]),
    "ordinary": (1, 1, [[1, 0], [0, 1]]),
    "supersingular": (1, 1, [[0, 1], [1, 0]]),
}


def window_from_ints(F: Frame, r0: int, r1: int, Psi: list[list[int]], name: str) -> Window:
    return Window(F, r0, r1, [[F.from_int0(c) for c in row] for row in Psi], name=name)


def corpus_windows(F: Frame) -> dict[str, Window]:
    out = {}
    for name, (r0, r1, Psi) in WINDOW_MATRICES.items():
        if name == "ordinary":
            out[name] = direct_sum(unit_window(F), twist_window(F))
            out[name].name = name
        else:
            out[name] = window_from_ints(F, r0, r1, Psi, name)
    return out


def standard_windows(p: int, N: int) -> dict[str, Window]:
    return corpus_windows(WittFrame(make_zmod(p), N))


# -- independent oracle -------------------------------------------------------------------

def galois_oracle(p: int, m: int, n: int, r0: int, Psi: list[list[int]]) -> int:
    """Count (x, l) in G^r0 x G^r1 with Psi (x ; s(l)) = (p s^-1(x) ; l).

    G = GR(p^n, m) is built directly as Z/p^n[a]/(f) and s is its Frobenius
    lift, found as the root of f congruent to a^p; this is W_n(F_{p^m})
    with F = s and V = p s^-1, computed without any Witt arithmetic.
    """
    f = FIELD_POLYS[(p, m)]
    G = make_field(p, f, k=n) if m > 1 else make_zmod(p, n)
    elems = list(G.elements())
    if m == 1:
        sigma = {x: x for x in elems}
    else:
        a = G.basis()[1]
        ap = G.pow(a, p)

        def f_at(r):
            acc = 0
            for c in reversed(f):
                acc = G.add(G.mul(acc, r), G.from_int(c))
            return acc

        roots = [r for r in elems if f_at(r) == 0 and G.is_nilpotent(G.sub(r, ap))]
        if len(roots) != 1:
            raise ValueError("Frobenius lift not unique")
        root = roots[0]
        powers = [G.one]
        for _ in range(m - 1):
            powers.append(G.mul(powers[-1], root))
        sigma = {}
        for x in elems:
            cs = G.coords(x)
            sigma[x] = G.sum(G.scale(c, pw) for c, pw in zip(cs, powers))
    sigma_inv = {v: k for k, v in sigma.items()}
    pe = G.from_int(p)
    h = len(Psi)
    P = [[G.from_int(c) for c in row] for row in Psi]
    count = 0
    for vec in itertools.product(elems, repeat=h):
        xs, ls = vec[:r0], vec[r0:]
        ins = list(xs) + [sigma[l] for l in ls]
        rhs = [G.mul(pe, sigma_inv[x]) for x in xs] + list(ls)
        if all(G.sum(G.mul(P[i][j], ins[j]) for j in range(h)) == rhs[i] for i in range(h)):
            count += 1
    return count


def closed_form_order(name: str, p: int, n: int) -> int | None:
    """|H^0(sC_n)| over finite fields for the named corpus windows."""
    return {"unit": 1, "twist": p**n, "ordinary": p**n, "supersingular": 1}.get(name)


# -- random data ---------------------------------------------------------------------------

def random_invertible(F: Frame, n: int, rng, tries: int = 200) -> list:
    from .frames import FrameError, mat_inv

    for _ in range(tries):
        M = [[F.random0(rng) for _ in range(n)] for _ in range(n)]
        try:
            mat_inv(F, M)
            return M
        except FrameError:
            continue
    raise RuntimeError("no invertible matrix found")


def random_window(F: Frame, r0: int, r1: int, rng, name: str = "random") -> Window:
    return Window(F, r0, r1, random_invertible(F, r0 + r1, rng) if r0 + r1 else [], name=name)


def random_morphism(M: Window, rng, tries: int = 200):
    """A random isomorphism M -> M' where M' is defined by conjugation."""
    from .frames import FrameError, WindowMorphism, mat_inv, mat_mul

    F = M.frame
    r0, r1 = M.r0, M.r1
    for _ in range(tries):
        a = [[F.random0(rng) for _ in range(r0)] for _ in range(r0)]
        b = [[F.random1(rng) for _ in range(r1)] for _ in range(r0)]
        c = [[F.random0(rng) for _ in range(r0)] for _ in range(r1)]
        e = [[F.random0(rng) for _ in range(r1)] for _ in range(r1)]
        f = WindowMorphism(M, M, a, b, c, e)
        try:
            X = f.X()
            mat_inv(F, X)
            Yi = mat_inv(F, f.Y())
        except FrameError:
            continue
        f.dst = Window(F, r0, r1, mat_mul(F, mat_mul(F, X, M.Psi), Yi), name=f"{M.name}'")
        return f
    raise RuntimeError("no invertible morphism found")


# -- registry for the command line -----------------------------------------------------------

def named_rings() -> dict[str, FpkAlgebra]:
    out: dict[str, FpkAlgebra] = {}
    for p in (2, 3):
        for m in (1, 2, 3):
            F = finite_field(p, m)
            out[F.name] = F
    for R in ring_grid() + witt_law_rings() + nilpotent_test_rings(2) + nilpotent_test_rings(3):
        out.setdefault(R.name, R)
    for _, pd in relative_pairs():
        out.setdefault(pd.R.name, pd.R)
    return out


def load_ring(ref) -> FpkAlgebra:
    """A ring from a corpus name, a JSON file path or an algebra dict."""
    import json
    import os

    if isinstance(ref, FpkAlgebra):
        return ref
    if isinstance(ref, dict):
        return FpkAlgebra.from_dict(ref)
    rings = named_rings()
    if ref in rings:
        return rings[ref]
    if os.path.exists(ref):
        with open(ref) as fh:
            return FpkAlgebra.from_dict(json.load(fh))
    raise KeyError(f"unknown ring {ref!r}; corpus names: {sorted(rings)}")


FRAME_KINDS = ("witt-n", "witt-prec", "sheared", "rel-witt", "rel-sheared")


def build_frame(spec: dict) -> Frame:
    """Frame from a JSON block {kind, ring, n | precision, bound, pd}.

    ``pd`` is {"generators": [coords, ...], "gammas": {"i": [[coords of gamma_2], ...]}}
    where gammas are given on the generators (trivial structure if absent).
    """
    from .frame_instances import (
        PdIdeal,
        ShearedFrame,
        relative_sheared_frame,
        relative_witt_frame,
    )
    from .frames import FrameError
    from .ring_base import make_ideal

    kind = spec.get("kind")
    if kind not in FRAME_KINDS:
        raise FrameError(f"kind must be one of {FRAME_KINDS}, got {kind!r}")
    R = load_ring(spec["ring"])
    n = int(spec.get("n", spec.get("precision", 0)))
    if n < 1:
        raise FrameError("frame needs a positive length/precision (field 'n' or 'precision')")
    bound = spec.get("bound")
    if kind == "witt-n":
        return WittFrame(R, n)
    if kind == "witt-prec":
        return WittFrame(R, n, name=f"W({R.name})@{n}")
    if kind == "sheared":
        return ShearedFrame(R, n, bound)
    pdspec = spec.get("pd")
    if not pdspec or not pdspec.get("generators"):
        raise FrameError("relative frames need pd.generators")
    gens = [R.elem(c) for c in pdspec["generators"]]
    gammas = pdspec.get("gammas")
    if gammas:
        basis = {g: [g] + [R.elem(c) for c in gammas.get(str(i), [])] for i, g in enumerate(gens)}
        pd = PdIdeal.from_basis(R, make_ideal(R, gens), basis, name=pdspec.get("name", "a"))
    else:
        pd = trivial_pd(R, gens, name=pdspec.get("name", "a"))
    if kind == "rel-witt":
        return relative_witt_frame(pd, n)
    return relative_sheared_frame(pd, n, bound)
