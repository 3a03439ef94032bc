"""Acceptance criteria AC1 to AC11, one test each.

Every test prints a single ``ACk PASS|FAIL ...`` line; the lines are also
collected into a summary section at the end of the pytest run.  Suite
reports at the base configuration are computed once and shared, and the
stabilisation check (AC11) reruns every suite with doubled bounds.
"""

import time

import pytest

from shearwitt.corpus import WINDOW_MATRICES, finite_field, ring_grid, witt_law_rings
from shearwitt.sheared_witt import F_invariants_report, ShearedWittRing
from shearwitt.suites import SUITES, SuiteConfig, canonical_json, run_suite

BASE = SuiteConfig()
_cache: dict[str, tuple[dict, float]] = {}


def suite(name: str) -> tuple[dict, float]:
    if name not in _cache:
        t = time.perf_counter()
        rep = run_suite(name, BASE)
        _cache[name] = (rep, time.perf_counter() - t)
    return _cache[name]


@pytest.fixture
def verdict(acceptance_log):
    def record(ac: int, ok: bool, detail: str):
        line = f"AC{ac} {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        acceptance_log.append(line)
        assert ok, line

    return record


def cells(rep: dict, prefix: str = "") -> list[dict]:
    return [c for c in rep["cells"] if c["key"].startswith(prefix)]


def test_ac1_witt_laws(verdict):
    rep, secs = suite("witt-laws")
    cs = cells(rep)
    rings = {c["ring"] for c in cs}
    primes = {R.p for R in witt_law_rings() if R.name in rings}
    ok = (rep["ok"] and len(rings) >= 10 and primes == {2, 3} and all(c["n"] <= 4 for c in cs)
          and all(c["invariant"]["samples"] >= 100 for c in cs) and secs < 30)
    verdict(1, ok, f"{len(rings)} rings, {len(cs)} cells, failures={rep['failures']}, {secs:.1f}s (< 30s)")


def test_ac2_constants(verdict):
    rep, secs = suite("constants")
    vals = [c for c in cells(rep, "p=2|Z/") if c["key"].endswith("|values")]
    ids = [c for c in cells(rep, "p=2|") if c["key"].endswith("identities")]
    p3 = cells(rep, "p=3|u0=alpha=1")
    ok = (rep["ok"] and vals and all(c["invariant"]["V(u0)=2-[2]"] and c["invariant"]["p~=2-[4]"] for c in vals)
          and all(int(c["key"].split("N=")[1].split("|")[0]) >= 4 for c in vals)
          and ids and all(c["invariant"]["samples"] >= 100 and not c["invariant"]["failures"] for c in ids)
          and len(p3) == 1 and p3[0]["ok"] and secs < 10)
    verdict(2, ok, f"{len(vals)} value cells, {len(ids)} identity cells, p=3 u0=alpha=1: {p3[0]['ok']}, {secs:.1f}s (< 10s)")


def test_ac3_divided_powers(verdict):
    rep, secs = suite("divided-powers")
    cs = cells(rep)
    primes = {c["p"] for c in cs}
    ok = (rep["ok"] and primes == {2, 3} and all(c["invariant"]["samples"] >= 100 for c in cs) and secs < 30)
    verdict(3, ok, f"{len(cs)} rings, failures={rep['failures']}, {secs:.1f}s (< 30s)")


GRID_NAMES = {"F2[t]/(t^2)", "F2[t]/(t^3)", "F4[t]/(t^2)", "F3[t]/(t^2)", "F2[x,y]/(x^2,xy,y^2)", "F9[t]/(t^2)"}


def test_ac4_sheared_exactness(verdict):
    rep, secs = suite("sheared-exactness")
    seq = [c for c in cells(rep) if "|kernel_sequence|" in c["key"] or "|Vn_Wn_sequence|" in c["key"]]
    rings = {c["params"]["ring"] for c in seq}
    ok = (rep["ok"] and GRID_NAMES <= rings
          and all(c["ok"] and c["invariant"]["failures"] == 0 and c["witnesses"] >= 50 for c in seq)
          and all(c["params"]["N"] == 4 and c["params"]["B"] == 12 for c in seq) and secs < 120)
    verdict(4, ok, f"{len(seq)} sequence cells over {len(rings)} rings, N=4 B=12, {secs:.1f}s (< 120s)")


def test_ac5_f_invariants(verdict):
    t = time.perf_counter()
    bad = []
    count = 0
    for R in ring_grid():
        for N in (2, 3, 4):
            d = F_invariants_report(ShearedWittRing(R, N, N + 8))
            count += 1
            if not (d["size"] == R.p**N and d["cyclic_generated_by_one"]):
                bad.append((R.name, N, d["size"]))
    secs = time.perf_counter() - t
    verdict(5, not bad and count >= 18 and secs < 60, f"{count} cells, |Fix F| = p^N everywhere: {not bad}, {secs:.1f}s (< 60s)")


def test_ac6_window_core(verdict):
    rep, secs = suite("duality")
    inv = cells(rep, "involution|")
    ext = cells(rep, "ext|")
    names = {c["key"].split("|")[1] for c in ext}
    ok = (all(c["ok"] and c["invariant"]["dual(unit)=twist"] and c["invariant"]["involution"] for c in inv)
          and ext and all(c["ok"] for c in ext) and names == set(WINDOW_MATRICES) and secs < 60)
    verdict(6, ok, f"{len(inv)} involution cells, {len(ext)} Ext cells, {secs:.1f}s for the duality suite (< 60s)")


def test_ac7_deformation(verdict):
    rep, secs = suite("deformation")
    lifts = cells(rep, "lift|")
    ok = (rep["ok"] and lifts and all(
        c["invariant"]["cases"] >= 20 and c["invariant"]["exact_in_nu"] == c["invariant"]["cases"]
        and c["invariant"]["unique"] == c["invariant"]["cases"] for c in lifts) and secs < 120)
    verdict(7, ok, f"{len(lifts)} relative frames x 20 cases, exact in nu and unique, {secs:.1f}s (< 120s)")


def test_ac8_field_point_counts(verdict):
    rep, _ = suite("points-corpus")
    fc = cells(rep, "field|")
    secs = sum(c["wall_time"] for c in fc)
    expected = {(p, m, n, w) for p in (2, 3) for m in (1, 2, 3) for n in (1, 2) for w in WINDOW_MATRICES}
    fields = {finite_field(p, m).name: (p, m) for p in (2, 3) for m in (1, 2, 3)}
    seen = set()
    closed = True
    for c in fc:
        _, w, ring, n = c["key"].split("|")
        p, m = fields[ring]
        n = int(n[2:])
        seen.add((p, m, n, w))
        want = {"unit": 1, "twist": p**n, "ordinary": p**n}.get(w)
        closed &= want is None or c["invariant"]["order"] == want
    ok = (seen == expected and all(c["ok"] and c["invariant"]["order"] == c["invariant"]["oracle"] for c in fc)
          and closed and secs < 300)
    verdict(8, ok, f"{len(fc)} field cells match the brute-force oracle, {secs:.1f}s of field cells (< 300s)")


def test_ac9_exact_triangle(verdict):
    rep, _ = suite("points-corpus")
    tri = cells(rep, "triangle|")
    secs = sum(c["wall_time"] for c in tri)
    rings = {c["key"].split("|")[2] for c in tri}
    per_p = {p: {r for r in rings if r.startswith(f"F{p}")} for p in (2, 3)}
    combos = {(c["key"].split("|")[1], c["key"].split("|")[2], c["key"].split("|")[3]) for c in tri}
    ok = (all(len(v) >= 3 for v in per_p.values())
          and len(combos) == len(rings) * len(WINDOW_MATRICES) * 2
          and all(c["ok"] and c["invariant"]["failures"] == 0 for c in tri) and secs < 180)
    verdict(9, ok, f"{len(tri)} triangle cells over {len(rings)} nilpotent rings, zero failures, {secs:.1f}s (< 180s)")


def test_ac10_duality_diagram(verdict):
    rep, secs = suite("duality")
    dia = cells(rep, "diagram|")
    combos = {tuple(c["key"].split("|")[1:]) for c in dia}
    want = {(w, S, f"n={n}") for w in WINDOW_MATRICES for S in ("F2", "F4", "F2[t]/(t^2)") for n in (1, 2)}
    ok = combos == want and all(c["ok"] for c in dia) and secs < 120
    verdict(10, ok, f"{len(dia)} diagram cells, both squares and kernel/cokernel claims exact, {secs:.1f}s (< 120s)")


@pytest.mark.slow
def test_ac11_stabilisation(verdict):
    doubled = BASE.doubled()
    changed = []
    t = time.perf_counter()
    for name in SUITES:
        base, _ = suite(name)
        big = run_suite(name, doubled)
        if canonical_json(base["invariants"]) != canonical_json(big["invariants"]):
            changed += [k for k in base["invariants"] if base["invariants"][k] != big["invariants"].get(k)] or [name]
    secs = time.perf_counter() - t
    verdict(11, not changed, f"{len(SUITES)} suites rerun at scale {doubled.scale}, changed invariants: "
                              f"{changed[:5] or 'none'}, {secs:.1f}s")
