"""Command-line front end: ``shearwitt <group> <command> ...``.

Every command prints JSON on stdout (``--format csv`` where tables make
sense) and exits nonzero when a check fails.
"""

from __future__ import annotations

import ast
import csv
import io
import json
import os
import sys
from importlib import resources

import click

from . import corpus as C
from .frames import (
    FrameError,
    Window,
    WindowMorphism,
    base_change,
    deformation_lift,
    dual_window,
    is_morphism,
    lift_morphism,
)
from .ring_base import FpkAlgebra, RingError, extend_nilpotent, make_field, make_ideal, make_quotient, make_zmod
from .zmod_linalg import SizeCapExceeded, smith_normal_form

SCHEMA_NAMES = ("algebra", "frame", "window", "report")


# -- output helpers --------------------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(obj, output: str | None = None) -> None:
    text = dumps(obj)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def emit_rows(rows: list[dict], fmt: str, output: str | None) -> None:
    if fmt == "json":
        emit(rows, output)
        return
    keys: list[str] = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    if output:
        with open(output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)


def fail(msg: str, code: int = 2):
    click.echo(dumps({"error": msg}), err=True, nl=False)
    sys.exit(code)


def read_json(ref: str):
    """JSON from a file path or an inline literal."""
    if os.path.exists(ref):
        with open(ref) as fh:
            return json.load(fh)
    try:
        return json.loads(ref)
    except json.JSONDecodeError:
        fail(f"{ref!r} is neither a file nor valid JSON")


def schema(name: str) -> dict:
    text = resources.files("shearwitt").joinpath("schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(data, name: str) -> None:
    """Schema check; violations are reported with their field path."""
    import jsonschema
    from referencing import Registry, Resource

    registry = Registry().with_resources(
        [(f"{n}.schema.json", Resource.from_contents(schema(n))) for n in SCHEMA_NAMES]
    )
    v = jsonschema.Draft202012Validator(schema(name), registry=registry)
    errors = sorted(v.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = ["/" + "/".join(str(x) for x in e.absolute_path) + ": " + e.message for e in errors]
        raise click.ClickException("schema violation: " + "; ".join(msgs))


def ring_arg(ref: str) -> FpkAlgebra:
    try:
        return C.load_ring(ref)
    except (KeyError, RingError) as exc:
        raise click.ClickException(str(exc))


# -- frames and windows on disk ---------------------------------------------------------------

def frame_spec_of(ref: str) -> dict:
    spec = read_json(ref)
    validate(spec, "frame")
    return spec


def frame_from(ref_or_spec):
    spec = ref_or_spec if isinstance(ref_or_spec, dict) else frame_spec_of(ref_or_spec)
    try:
        F = C.build_frame(spec)
    except (FrameError, RingError, KeyError) as exc:
        raise click.ClickException(f"cannot build frame: {exc}")
    if spec.get("frame_id") not in (None, F.name):
        raise click.ClickException(f"frame_id {spec['frame_id']!r} does not match the frame description ({F.name!r})")
    return F, spec


def _psi_witness(F, Psi) -> dict:
    """Reduction of Psi to the residue field with its determinant (0 means singular)."""
    from .ring_base import residue_section

    R = F.base_ring
    res = residue_section(R)
    k = res.field
    M = [[res.projection(F.proj(x)) for x in row] for row in Psi]
    n = len(M)
    A = [row[:] for row in M]
    det = k.one
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            det = 0
            break
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = k.neg(det)
        det = k.mul(det, A[c][c])
        inv = k.inverse(A[c][c])
        for r in range(c + 1, n):
            f = k.mul(A[r][c], inv)
            A[r] = [k.sub(a, k.mul(f, b)) for a, b in zip(A[r], A[c])]
    return {"residue_field": k.name, "psi_mod_m": [[k.coords(x) for x in row] for row in M], "det": k.coords(det)}


def window_from(ref: str, frame_ref: str | None = None) -> Window:
    data = read_json(ref)
    validate(data, "window")
    if frame_ref:
        F, spec = frame_from(frame_ref)
    elif "frame" in data:
        F, spec = frame_from(data["frame"])
    else:
        raise click.ClickException(f"unknown frame id {data['frame_id']!r}: pass --frame or embed a frame block")
    if data["frame_id"] != F.name:
        raise click.ClickException(f"unknown frame id {data['frame_id']!r} (frame is {F.name!r})")
    n = data["r0"] + data["r1"]
    if len(data["psi"]) != n or any(len(r) != n for r in data["psi"]):
        raise click.ClickException(f"schema violation: /psi: must be a {n}x{n} matrix")
    try:
        Psi = [[F.decode0(v) for v in row] for row in data["psi"]]
    except Exception as exc:
        raise click.ClickException(f"schema violation: /psi: cannot decode entries ({exc})")
    try:
        W = Window(F, data["r0"], data["r1"], Psi, name=data.get("name", ""))
    except FrameError as exc:
        raise click.ClickException(f"{exc}; witness: {json.dumps(_psi_witness(F, Psi))}")
    W.spec = spec
    return W


def window_json(W: Window, spec: dict | None) -> dict:
    d = W.to_dict()
    if spec is not None:
        s = dict(spec)
        s["frame_id"] = W.frame.name
        d["frame"] = s
    return d


def corpus_window(name: str, p: int, precision: int) -> tuple[Window, dict]:
    spec = {"kind": "witt-n", "ring": f"F{p}", "n": precision}
    F, _ = frame_from(spec)
    ws = C.corpus_windows(F)
    if name not in ws:
        raise click.ClickException(f"unknown corpus window {name!r}; choose from {sorted(ws)}")
    return ws[name], spec


def window_ref(ref: str, frame: str | None, p: int, precision: int) -> tuple[Window, dict | None]:
    if ref in C.WINDOW_MATRICES:
        return corpus_window(ref, p, precision)
    W = window_from(ref, frame)
    return W, W.spec


# -- root -------------------------------------------------------------------------------------

@click.group()
@click.version_option(package_name="artifact")
def main():
    """Truncated and sheared Witt vectors, frames, windows and point counts."""


# -- ring -------------------------------------------------------------------------------------

@main.group()
def ring():
    """Finite algebras given by structure constants."""


@ring.command("new-zmod")
@click.argument("p", type=int)
@click.option("-k", type=int, default=1, show_default=True)
@click.option("-o", "--output")
def ring_new_zmod(p, k, output):
    try:
        emit(make_zmod(p, k).to_dict(), output)
    except RingError as exc:
        raise click.ClickException(str(exc))


@ring.command("new-field")
@click.argument("p", type=int)
@click.option("--poly", required=True, help="monic polynomial, coefficients low to high, e.g. 1,1,1")
@click.option("-k", type=int, default=1, show_default=True, help="k > 1 gives the Galois ring")
@click.option("-o", "--output")
def ring_new_field(p, poly, k, output):
    try:
        emit(make_field(p, [int(c) for c in poly.split(",")], k).to_dict(), output)
    except (RingError, ValueError) as exc:
        raise click.ClickException(str(exc))


@ring.command("extend-nilpotent")
@click.argument("ring_ref")
@click.argument("m", type=int)
@click.option("--var", default="t", show_default=True)
@click.option("-o", "--output")
def ring_extend(ring_ref, m, var, output):
    emit(extend_nilpotent(ring_arg(ring_ref), m, var).to_dict(), output)


@ring.command("quotient")
@click.argument("ring_ref")
@click.option("--gen", "gens", multiple=True, required=True, help="generator coordinates as JSON, e.g. [0,0,1]")
@click.option("-o", "--output")
def ring_quotient(ring_ref, gens, output):
    R = ring_arg(ring_ref)
    try:
        I = make_ideal(R, [R.elem(json.loads(g)) for g in gens])
        Q, _ = make_quotient(R, I)
    except (RingError, ValueError) as exc:
        raise click.ClickException(str(exc))
    emit(Q.to_dict(), output)


@ring.command("info")
@click.argument("ring_ref")
def ring_info(ring_ref):
    from .ring_base import is_artinian_local_fp, is_perfect_field, nilpotency_index, nilradical

    R = ring_arg(ring_ref)
    info = {"name": R.name, "p": R.p, "k": R.k, "rank": R.rank, "size": R.size, "labels": list(R.labels),
            "is_fp_algebra": R.is_fp_algebra, "perfect_field": is_perfect_field(R),
            "artinian_local_fp": is_artinian_local_fp(R)}
    if R.is_fp_algebra:
        info["nilradical_basis"] = [R.coords(b) for b in nilradical(R).basis]
        info["nilpotency_index"] = nilpotency_index(R)
    emit(info)


# -- linalg -----------------------------------------------------------------------------------

@main.group()
def linalg():
    """Ad-hoc integer linear algebra."""


@linalg.command("snf")
@click.argument("matrix")
def linalg_snf(matrix):
    """Smith normal form of an integer matrix (JSON or file)."""
    M = read_json(matrix)
    d, U, V = smith_normal_form(M)
    emit({"diagonal": d, "U": U, "V": V})


# -- expression evaluation ----------------------------------------------------------------------

class _Evaluator:
    def __init__(self, ops: dict, variables: dict, const):
        self.ops = ops
        self.vars = variables
        self.const = const

    def __call__(self, node):
        if isinstance(node, ast.Expression):
            return self(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return self.const(node.value)
        if isinstance(node, ast.Name):
            if node.id in self.vars:
                return self.vars[node.id]
            if node.id in self.ops and self.ops[node.id][0] == 0:
                return self.ops[node.id][1]()
            raise click.ClickException(f"unknown name {node.id!r}")
        if isinstance(node, ast.BinOp):
            a, b = self(node.left), self(node.right)
            key = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul"}.get(type(node.op))
            if key is None:
                raise click.ClickException("only + - * are supported")
            return self.ops[key][1](a, b)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return self.ops["neg"][1](self(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            if name == "teich":
                arg = node.args[0]
                val = ast.literal_eval(arg)
                return self.ops["teich"][1](val)
            if name not in self.ops:
                raise click.ClickException(f"unknown function {name!r}")
            arity, fn = self.ops[name]
            args = [self(a) for a in node.args]
            if len(args) != arity:
                raise click.ClickException(f"{name} takes {arity} argument(s)")
            return fn(*args)
        raise click.ClickException(f"unsupported expression element {ast.dump(node)[:40]}")


def _parse_vars(pairs) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise click.ClickException("variables are given as name=[components]")
        k, v = item.split("=", 1)
        out[k.strip()] = json.loads(v)
    return out


def _ring_elem(R, v):
    return R.elem(v) if isinstance(v, list) else int(v)


# -- witt ------------------------------------------------------------------------------------

@main.group()
def witt():
    """Truncated Witt vectors."""


@witt.command("eval")
@click.option("--ring", "ring_ref", required=True)
@click.option("-n", "length", type=int, required=True)
@click.option("--var", "vars_", multiple=True, help="x=[c0,c1,...] with ring elements as ints or coordinate lists")
@click.argument("expr")
def witt_eval(ring_ref, length, vars_, expr):
    """Evaluate e.g. 'mul(x, V(y)) + teich(1) - ptilde'."""
    from .witt import WittError, WittRing, Vtilde, compute_u0_alpha_ptilde

    R = ring_arg(ring_ref)
    try:
        W = WittRing(R, length)
    except WittError as exc:
        raise click.ClickException(str(exc))
    variables = {k: W.vec([_ring_elem(R, c) for c in v]) for k, v in _parse_vars(vars_).items()}

    def consts(which):
        c = compute_u0_alpha_ptilde(R.p, length, max(length, R.k))
        return c.in_ring(W, which)

    ops = {
        "add": (2, W.add), "sub": (2, W.sub), "mul": (2, W.mul), "neg": (1, W.neg),
        "F": (1, W.F), "V": (1, W.V), "Vt": (1, lambda x: Vtilde(W, x)),
        "teich": (1, lambda a: W.teich(_ring_elem(R, a))),
        "u0": (0, lambda: consts("u0")), "ptilde": (0, lambda: consts("ptilde")),
    }
    try:
        val = _Evaluator(ops, variables, W.from_int)(ast.parse(expr, mode="eval"))
    except (WittError, SyntaxError) as exc:
        raise click.ClickException(str(exc))
    emit({"ring": R.name, "n": length, "expr": expr, "components": [R.coords(a) for a in val], "packed": list(val)})


# -- sheared ----------------------------------------------------------------------------------

@main.group()
def sheared():
    """Sheared Witt vectors at finite precision."""


@sheared.command("eval")
@click.option("--ring", "ring_ref", required=True)
@click.option("--precision", type=int, default=4, show_default=True)
@click.option("--bound", type=int, default=None)
@click.option("--var", "vars_", multiple=True, help="x=[w0,...,w_{N-1}] Witt components")
@click.argument("expr")
def sheared_eval(ring_ref, precision, bound, vars_, expr):
    from .sheared_witt import ShearedError, ShearedWittRing

    R = ring_arg(ring_ref)
    try:
        S = ShearedWittRing(R, precision, bound)
        variables = {k: S.split(tuple(_ring_elem(R, c) for c in v)) for k, v in _parse_vars(vars_).items()}
    except ShearedError as exc:
        raise click.ClickException(str(exc))
    ops = {
        "add": (2, S.s_add), "sub": (2, S.s_sub), "mul": (2, S.s_mul), "neg": (1, S.s_neg),
        "F": (1, S.s_F), "Vt": (1, S.s_Vtilde), "teich": (1, lambda a: S.teich(_ring_elem(R, a))),
        "ptilde": (0, S.ptilde),
    }
    try:
        val = _Evaluator(ops, variables, S.from_int)(ast.parse(expr, mode="eval"))
    except (ShearedError, SyntaxError) as exc:
        raise click.ClickException(str(exc))
    emit({"ring": R.name, "params": S.params, "expr": expr, "value": val.to_dict(),
          "witt_components": [R.coords(a) for a in S.embed(val)]})


@sheared.command("verify")
@click.argument("check", type=click.Choice(["kernel-sequence", "vn-wn", "projection", "f-invariants"]))
@click.option("--ring", "ring_ref", required=True)
@click.option("--precision", type=int, default=4, show_default=True)
@click.option("--bound", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("-n", "n", type=int, default=1, show_default=True)
@click.option("--ideal", "gens", multiple=True, help="ideal generator coordinates (default: nilradical)")
@click.option("-o", "--output")
def sheared_verify(check, ring_ref, precision, bound, seed, samples, n, gens, output):
    from .ring_base import nilradical
    from .sheared_witt import (
        F_invariants_report,
        ShearedError,
        ShearedWittRing,
        check_kernel_sequence,
        check_projection,
        check_Vn_Wn_sequence,
    )

    R = ring_arg(ring_ref)
    try:
        if check == "kernel-sequence":
            I = make_ideal(R, [R.elem(json.loads(g)) for g in gens]) if gens else nilradical(R)
            rep = check_kernel_sequence(R, I, precision, bound, samples, seed).to_dict()
        elif check == "vn-wn":
            rep = check_Vn_Wn_sequence(R, n, precision, bound, samples, seed).to_dict()
        elif check == "projection":
            rep = check_projection(ShearedWittRing(R, precision, bound), samples, seed).to_dict()
        else:
            rep = F_invariants_report(ShearedWittRing(R, precision, bound))
            rep = {"check": "F_invariants", "ring": R.name, "params": {"N": precision}, "samples": 0,
                   "failures": [] if rep["ok"] else [rep], "data": rep, "ok": rep["ok"]}
    except ShearedError as exc:
        raise click.ClickException(str(exc))
    emit(rep, output)
    sys.exit(0 if rep.get("ok", not rep.get("failures")) else 1)


# -- frame ------------------------------------------------------------------------------------

@main.group()
def frame():
    """Frames: Witt, sheared and relative."""


@frame.command("new")
@click.option("--kind", type=click.Choice(C.FRAME_KINDS), required=True)
@click.option("--ring", "ring_ref", required=True)
@click.option("-n", "--precision", "n", type=int, required=True, help="length / precision")
@click.option("--bound", type=int, default=None)
@click.option("--pd-gen", "pd_gens", multiple=True, help="pd ideal generator coordinates, e.g. [0,1]")
@click.option("--pd-gammas", default=None, help='JSON {"0": [[coords of gamma_2], ...]} per generator')
@click.option("--verify/--no-verify", default=True, show_default=True)
@click.option("--samples", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output")
def frame_new(kind, ring_ref, n, bound, pd_gens, pd_gammas, verify, samples, seed, output):
    R = ring_arg(ring_ref)
    spec = {"kind": kind, "ring": ring_ref if ring_ref in C.named_rings() else R.to_dict(), "n": n}
    if bound is not None:
        spec["bound"] = bound
    if pd_gens:
        spec["pd"] = {"generators": [json.loads(g) for g in pd_gens]}
        if pd_gammas:
            spec["pd"]["gammas"] = json.loads(pd_gammas)
    F, _ = frame_from(spec)
    spec["frame_id"] = F.name
    out = {"spec": spec, "describe": F.describe()}
    ok = True
    if verify:
        rep = F.verify(samples, seed)
        out["verify"] = rep.to_dict()
        ok = rep.ok
    if output:
        emit(spec, output)
        click.echo(dumps(out), nl=False)
    else:
        emit(out)
    sys.exit(0 if ok else 1)


# -- display ----------------------------------------------------------------------------------

@main.group()
def display():
    """Windows (displays) in normal representation."""


@display.command("new")
@click.option("--frame", "frame_ref", required=True)
@click.option("--r0", type=int, required=True)
@click.option("--r1", type=int, required=True)
@click.option("--psi", required=True, help="matrix of encoded A0 elements (JSON or file)")
@click.option("--name", default="")
@click.option("-o", "--output")
def display_new(frame_ref, r0, r1, psi, name, output):
    F, spec = frame_from(frame_ref)
    data = {"frame_id": F.name, "r0": r0, "r1": r1, "psi": read_json(psi), "name": name, "frame": spec}
    tmp = dumps(data)
    W = window_from(tmp)
    emit(window_json(W, spec), output)


@display.command("dual")
@click.argument("window")
@click.option("--frame", "frame_ref", default=None)
@click.option("-o", "--output")
def display_dual(window, frame_ref, output):
    W = window_from(window, frame_ref)
    emit(window_json(dual_window(W), W.spec), output)


@display.command("basechange")
@click.argument("window")
@click.option("--frame", "frame_ref", default=None)
@click.option("--truncate", type=int, default=None, help="Witt frame: truncate to this length")
@click.option("--to-witt", is_flag=True, help="sheared frame: apply (c, u0) to the Witt frame")
@click.option("--residue", is_flag=True, help="Witt frame: change ring to the residue field")
@click.option("-o", "--output")
def display_basechange(window, frame_ref, truncate, to_witt, residue, output):
    from .frame_instances import ShearedFrame, WittFrame, frame_hom_c, ring_change_hom, truncation_hom
    from .ring_base import residue_section

    W = window_from(window, frame_ref)
    F = W.frame
    spec = dict(W.spec)
    if sum(map(bool, (truncate, to_witt, residue))) != 1:
        raise click.ClickException("choose exactly one of --truncate, --to-witt, --residue")
    if truncate:
        if not isinstance(F, WittFrame):
            raise click.ClickException("--truncate needs a Witt frame")
        hom = truncation_hom(F, truncate)
        spec["n"] = truncate
    elif to_witt:
        if not isinstance(F, ShearedFrame):
            raise click.ClickException("--to-witt needs a sheared frame")
        hom = frame_hom_c(F.R, F.n, F.S.B).hom
        G = hom.src
        W = Window(G, W.r0, W.r1, [[G.decode0(F.encode0(x)) for x in row] for row in W.Psi], name=W.name)
        spec = {"kind": "witt-n", "ring": spec["ring"], "n": F.n}
    else:
        if not isinstance(F, WittFrame):
            raise click.ClickException("--residue needs a Witt frame")
        res = residue_section(F.R)
        hom = ring_change_hom(F, res.projection)
        spec = {"kind": "witt-n", "ring": res.field.to_dict(), "n": F.n}
    try:
        M = base_change(W, hom)
    except FrameError as exc:
        raise click.ClickException(str(exc))
    out = window_json(M, spec)
    out["frame"]["frame_id"] = M.frame.name
    emit(out, output)


def _morphism_from(data: dict, src: Window, dst: Window) -> WindowMorphism:
    F = src.frame
    try:
        f = WindowMorphism(
            src, dst,
            [[F.decode0(v) for v in r] for r in data["a"]],
            [[F.decode1(v) for v in r] for r in data["b"]],
            [[F.decode0(v) for v in r] for r in data["c"]],
            [[F.decode0(v) for v in r] for r in data["e"]],
        )
        f.check_shapes()
    except (KeyError, FrameError) as exc:
        raise click.ClickException(f"bad morphism: {exc}")
    return f


@display.command("check-morphism")
@click.argument("src")
@click.argument("dst")
@click.argument("morphism")
@click.option("--frame", "frame_ref", default=None)
def display_check_morphism(src, dst, morphism, frame_ref):
    """Check X Psi = Psi' Y for blocks {a, b, c, e}."""
    M, Mp = window_from(src, frame_ref), window_from(dst, frame_ref)
    Mp.frame = M.frame
    f = _morphism_from(read_json(morphism), M, Mp)
    ok, res = is_morphism(f)
    F = M.frame
    emit({"ok": ok, "residual": [[F.encode0(x) for x in r] for r in res]})
    sys.exit(0 if ok else 1)


@display.command("lift")
@click.option("--frame", "frame_ref", required=True, help="relative frame spec")
@click.option("--window", "window_refs", multiple=True, required=True,
              help="window(s) over the quotient frame; two windows with --morphism lift a morphism")
@click.option("--morphism", default=None)
@click.option("-o", "--output")
def display_lift(frame_ref, window_refs, morphism, output):
    """Deformation lifting across the leveled ideal of a relative frame."""
    from .frame_instances import RelativeFrame

    rel, spec = frame_from(frame_ref)
    if not isinstance(rel, RelativeFrame):
        raise click.ClickException("lift needs a rel-witt or rel-sheared frame")
    K = rel.leveled_ideal()
    Q = K.quotient
    wins = []
    for ref in window_refs:
        data = read_json(ref)
        validate(data, "window")
        if data["frame_id"] != Q.name:
            # accept an embedded frame with the same kind, length and ring structure
            same = False
            if "frame" in data:
                G, _ = frame_from(data["frame"])
                same = (type(G) is type(Q) and G.n == Q.n and G.base_ring == Q.base_ring
                        and data["frame_id"] == G.name)
            if not same:
                raise click.ClickException(
                    f"unknown frame id {data['frame_id']!r} (quotient frame is {Q.name!r})")
        Psi = [[Q.decode0(v) for v in r] for r in data["psi"]]
        wins.append(Window(Q, data["r0"], data["r1"], Psi, name=data.get("name", "")))
    lifts = [deformation_lift(W, K) for W in wins]
    out = {"frame_id": rel.name, "nu": K.nu, "windows": [window_json(L, spec) for L in lifts]}
    if morphism:
        if len(wins) != 2:
            raise click.ClickException("--morphism needs exactly two windows")
        fb = _morphism_from(read_json(morphism), wins[0], wins[1])
        try:
            f = lift_morphism(lifts[0], lifts[1], fb, K)
        except FrameError as exc:
            raise click.ClickException(str(exc))
        out["morphism"] = f.to_dict()
        out["iterations"] = f.iterations
    emit(out, output)


# -- points -----------------------------------------------------------------------------------

def _points_common(f):
    f = click.option("--window", "window_ref", required=True, help="corpus window name or window file")(f)
    f = click.option("--frame", "frame_ref", default=None)(f)
    f = click.option("-p", "p", type=int, default=2, show_default=True, help="prime for corpus windows")(f)
    f = click.option("--precision", type=int, default=4, show_default=True, help="window precision N")(f)
    f = click.option("--support", type=int, default=6, show_default=True, help="maximal support bound L")(f)
    f = click.option("--budget", type=int, default=2**20, show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(f)
    f = click.option("-o", "--output")(f)
    return f


def _test_ring(ref: str, budget: int):
    from .point_functors import TestRing

    return TestRing(ring_arg(ref), budget=budget)


def _provenance(**kw) -> dict:
    return {k: v for k, v in kw.items() if v is not None}


@main.group()
def points():
    """Point counts of C_n, Z_n and sC_n on finite test rings."""


@points.command("eval")
@_points_common
@click.option("--ring", "ring_ref", required=True)
@click.option("-n", "n", type=int, default=1, show_default=True)
@click.option("--complex", "cplx", type=click.Choice(["sC", "C", "Z"]), default="sC", show_default=True)
def points_eval(window_ref, frame_ref, p, precision, support, budget, seed, fmt, output, ring_ref, n, cplx):
    from .point_functors import PointError, eval_Cn, eval_sCn, eval_Zn

    M, _ = window_ref_(window_ref, frame_ref, p, precision)
    S = _test_ring(ring_ref, budget)
    try:
        if cplx == "C":
            rep = eval_Cn(M, S, n, budget)
        elif cplx == "Z":
            rep = eval_Zn(M, S, n, L_max=support, cap=budget)
        else:
            rep = eval_sCn(M, S, n, L_max=support, cap=budget)
    except (PointError, SizeCapExceeded, FrameError) as exc:
        raise click.ClickException(str(exc))
    row = rep.to_dict()
    row["provenance"] = _provenance(window=window_ref, p=p, precision=precision, support=support, budget=budget, seed=seed)
    emit_rows([row], fmt, output) if fmt == "csv" else emit(row, output)
    sys.exit(0 if rep.ok else 1)


def window_ref_(ref, frame_ref, p, precision):
    try:
        return window_ref(ref, frame_ref, p, precision)
    except FrameError as exc:
        raise click.ClickException(str(exc))


@points.command("table")
@_points_common
@click.option("--ring", "ring_refs", multiple=True, help="test rings (default: F_p, F_p^2, F_p^3)")
@click.option("-n", "ns", type=int, multiple=True)
@click.option("--complex", "cplx", type=click.Choice(["sC", "C", "Z"]), default="sC", show_default=True)
def points_table(window_ref, frame_ref, p, precision, support, budget, seed, fmt, output, ring_refs, ns, cplx):
    from .point_functors import point_count_table

    M, _ = window_ref_(window_ref, frame_ref, p, precision)
    rings = [_test_ring(r, budget) for r in ring_refs] or [_test_ring(C.finite_field(p, m).name, budget) for m in (1, 2, 3)]
    ns = ns or (1, 2)
    oracle = None
    if window_ref in C.WINDOW_MATRICES:
        r0, _, Psi = C.WINDOW_MATRICES[window_ref]

        def oracle(S, n):
            q = S.S.size
            m = 1
            while p**m < q:
                m += 1
            if S.S.rank != m or p**m != q:
                return None
            return C.galois_oracle(p, m, n, r0, Psi)

    kw = {"L_max": support} if cplx != "C" else {}
    rows = point_count_table(M, rings, ns, cplx, oracle=oracle, **kw)
    for r in rows:
        r["provenance"] = _provenance(p=p, precision=precision, support=support, budget=budget, seed=seed)
        if r.get("oracle") is None:
            r.pop("oracle", None)
            r.pop("matches_oracle", None)
    emit_rows(rows, fmt, output)
    bad = [r for r in rows if not r.get("ok") or r.get("matches_oracle") is False]
    sys.exit(1 if bad else 0)


@points.command("triangle")
@_points_common
@click.option("--ring", "ring_ref", required=True)
@click.option("-n", "n", type=int, default=1, show_default=True)
def points_triangle(window_ref, frame_ref, p, precision, support, budget, seed, fmt, output, ring_ref, n):
    from .point_functors import PointError, exact_triangle_check

    M, _ = window_ref_(window_ref, frame_ref, p, precision)
    try:
        rep = exact_triangle_check(M, _test_ring(ring_ref, budget), n, N=min(precision, n + 1) if precision > n else None,
                                   seed=seed, cap=budget)
    except (PointError, SizeCapExceeded) as exc:
        raise click.ClickException(str(exc))
    row = rep.to_dict()
    row["provenance"] = _provenance(window=window_ref, p=p, precision=precision, budget=budget, seed=seed)
    emit_rows([row], fmt, output) if fmt == "csv" else emit(row, output)
    sys.exit(0 if rep.ok else 1)


@points.command("duality")
@_points_common
@click.option("--ring", "ring_ref", required=True)
@click.option("-n", "n", type=int, default=1, show_default=True)
def points_duality(window_ref, frame_ref, p, precision, support, budget, seed, fmt, output, ring_ref, n):
    from .point_functors import PointError, duality_diagram_check

    M, _ = window_ref_(window_ref, frame_ref, p, precision)
    try:
        rep = duality_diagram_check(M, _test_ring(ring_ref, budget), n, cap=budget)
    except (PointError, SizeCapExceeded) as exc:
        raise click.ClickException(str(exc))
    row = rep.to_dict()
    row["provenance"] = _provenance(window=window_ref, p=p, precision=precision, budget=budget, seed=seed)
    emit_rows([row], fmt, output) if fmt == "csv" else emit(row, output)
    sys.exit(0 if rep.ok else 1)


# -- verify -----------------------------------------------------------------------------------

@main.command("verify")
@click.argument("suite")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--precision", type=int, default=4, show_default=True)
@click.option("--bound", type=int, default=12, show_default=True)
@click.option("--support", type=int, default=4, show_default=True)
@click.option("--budget", type=int, default=2**20, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("-p", "p", type=int, default=None)
@click.option("-n", "ns", type=int, multiple=True)
@click.option("--scale", type=int, default=1, show_default=True, help="multiply support bounds and precisions")
@click.option("-o", "--output", help="report file (JSON)")
@click.option("--csv", "csv_out", default=None, help="also write the cells as CSV")
def verify(suite, seed, precision, bound, support, budget, samples, p, ns, scale, output, csv_out):
    """Run an invariant suite: witt-laws, constants, divided-powers, sheared-exactness,
    frame-axioms, duality, deformation, points-corpus or all."""
    from .suites import SuiteConfig, SuiteError, run_suite

    cfg = SuiteConfig(seed=seed, precision=precision, bound=bound, support=support, budget=budget,
                      samples=samples, p=p, n=tuple(ns) or (1, 2), scale=scale)
    try:
        rep = run_suite(suite, cfg)
    except SuiteError as exc:
        raise click.ClickException(str(exc))
    if output:
        emit(rep, output)
    summary = {"suite": rep["suite"], "ok": rep["ok"], "failures": rep["failures"]}
    if rep["suite"] == "all":
        summary["suites"] = {s["suite"]: {"ok": s["ok"], "failures": s["failures"]} for s in rep["suites"]}
    if csv_out:
        cells = rep.get("cells") or [dict(c, suite=s["suite"]) for s in rep.get("suites", []) for c in s["cells"]]
        emit_rows([{k: c[k] for k in ("key", "ok", "invariant")} | {"suite": c.get("suite", rep["suite"])} for c in cells],
                  "csv", csv_out)
    click.echo(dumps(summary if output else rep), nl=False)
    sys.exit(0 if rep["ok"] else 1)


# -- corpus -----------------------------------------------------------------------------------

@main.group()
def corpus():
    """Named rings and windows, import/export and schemas."""


@corpus.command("list")
def corpus_list():
    emit({
        "rings": sorted(C.named_rings()),
        "windows": {k: {"r0": v[0], "r1": v[1], "psi": v[2]} for k, v in C.WINDOW_MATRICES.items()},
        "relative_pairs": [label for label, _ in C.relative_pairs()],
        "frame_kinds": list(C.FRAME_KINDS),
    })


@corpus.command("show")
@click.argument("name")
def corpus_show(name):
    if name in C.WINDOW_MATRICES:
        r0, r1, Psi = C.WINDOW_MATRICES[name]
        emit({"window": name, "r0": r0, "r1": r1, "psi": Psi})
    else:
        emit(ring_arg(name).to_dict())


@corpus.command("export-window")
@click.argument("name")
@click.option("-p", "p", type=int, default=2, show_default=True)
@click.option("--precision", type=int, default=3, show_default=True)
@click.option("-o", "--output")
def corpus_export_window(name, p, precision, output):
    W, spec = corpus_window(name, p, precision)
    emit(window_json(W, spec), output)


@corpus.command("import-window")
@click.argument("path")
@click.option("--frame", "frame_ref", default=None)
@click.option("-o", "--output", help="write the canonical form here")
def corpus_import_window(path, frame_ref, output):
    W = window_from(path, frame_ref)
    emit(window_json(W, W.spec), output)


@corpus.command("schemas")
@click.option("-o", "--output-dir", default="schemas", show_default=True)
def corpus_schemas(output_dir):
    os.makedirs(output_dir, exist_ok=True)
    for name in SCHEMA_NAMES:
        with open(os.path.join(output_dir, f"{name}.schema.json"), "w") as fh:
            fh.write(dumps(schema(name)))
    emit({"written": [f"{n}.schema.json" for n in SCHEMA_NAMES], "dir": output_dir})


if __name__ == "__main__":
    main()
