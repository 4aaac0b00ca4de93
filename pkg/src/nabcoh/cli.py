"""Command-line front end: JSON extension documents in, deterministic text reports out.

Exit codes: 0 success, 1 parse or validation failure, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .cohomology import ModuleAction, cohomology
from .exactla import BUILTIN_ALGEBRAS, InputError, Matrix, format_rational, rational
from .gmcheck import h1_vanishing_check
from .graded import GradedVectorSpace
from .lie import LieModule, validate_module
from .nabtower import (GradedExtension, LieSection, TowerReport, normalize_section, obstruction, run_tower,
                       section_variety, tower_stage, validate_extension)
from .polynomial import natural_key

FORMAT_VERSION = 1
PARTS = ("quotient", "kernel")


class ParseError(InputError):
    """Schema errors, each prefixed by the field path it refers to."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


# -- document model ----------------------------------------------------------------

Combo = tuple  # ((element name, Fraction), ...)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    basis: tuple  # ((name, weight), ...)
    action: tuple  # ((x, v, Combo), ...)
    group: tuple = ()  # one matrix (tuple of rows) per document group generator


@dataclass(frozen=True)
class SectionDecl:
    name: str
    images: tuple  # ((g element name, Combo), ...)


@dataclass(frozen=True)
class InputDocument:
    name: str
    basis: tuple  # ((name, weight, part), ...)
    grading_element: str
    brackets: tuple = ()  # ((a, b, Combo), ...)
    group: tuple = ()  # ((order, matrix rows), ...)
    modules: tuple = ()
    sections: tuple = ()
    format: int = FORMAT_VERSION


class _Collector:
    def __init__(self) -> None:
        self.errors: list[str] = []

    def err(self, path: str, msg: str) -> None:
        self.errors.append(f"{path}: {msg}")

    def get(self, obj: Any, key: str, kind: type | tuple, path: str, required: bool = True) -> Any:
        if not isinstance(obj, dict):
            self.err(path, "expected an object")
            return None
        if key not in obj:
            if required:
                self.err(f"{path}.{key}" if path else key, "missing field")
            return None
        val = obj[key]
        if kind is int and isinstance(val, bool) or not isinstance(val, kind):
            names = kind.__name__ if isinstance(kind, type) else " or ".join(k.__name__ for k in kind)
            self.err(f"{path}.{key}" if path else key, f"expected {names}")
            return None
        return val

    def rational(self, value: Any, path: str) -> Fraction | None:
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            self.err(path, f"coefficient must be a rational string such as \"1/2\", got {json.dumps(value)}")
            return None
        try:
            return rational(value)
        except InputError as exc:
            self.err(path, str(exc))
            return None

    def combo(self, value: Any, path: str, names: set) -> Combo:
        if not isinstance(value, list):
            self.err(path, "expected a list of [element, \"p/q\"] pairs")
            return ()
        out = []
        for k, pair in enumerate(value):
            p = f"{path}[{k}]"
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                self.err(p, "expected [element, \"p/q\"]")
                continue
            if pair[0] not in names:
                self.err(p, f"unknown element {pair[0]!r}")
                continue
            c = self.rational(pair[1], p)
            if c is not None:
                out.append((pair[0], c))
        return tuple(out)

    def matrix(self, value: Any, n: int, path: str) -> tuple:
        if not (isinstance(value, list) and len(value) == n and all(isinstance(r, list) and len(r) == n
                                                                     for r in value)):
            self.err(path, f"expected a {n}x{n} matrix of rational strings")
            return ()
        rows = []
        for i, r in enumerate(value):
            row = []
            for j, x in enumerate(r):
                c = self.rational(x, f"{path}[{i}][{j}]")
                row.append(Fraction(0) if c is None else c)
            rows.append(tuple(row))
        return tuple(rows)


def parse(text: str) -> InputDocument:
    """Parse and schema-check a document; raises :class:`ParseError` listing every problem found."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError([f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    col = _Collector()
    if not isinstance(raw, dict):
        raise ParseError(["document: expected a JSON object"])
    known = {"format", "name", "basis", "grading_element", "brackets", "group", "modules", "sections"}
    for key in sorted(set(raw) - known):
        col.err(key, "unknown field")
    fmt = col.get(raw, "format", int, "")
    if fmt is not None and fmt != FORMAT_VERSION:
        col.err("format", f"unsupported format version {fmt}")
    name = col.get(raw, "name", str, "") or ""
    basis = []
    seen: set = set()
    for k, b in enumerate(col.get(raw, "basis", list, "") or []):
        p = f"basis[{k}]"
        nm = col.get(b, "name", str, p)
        wt = col.get(b, "weight", int, p)
        part = col.get(b, "part", str, p)
        if part is not None and part not in PARTS:
            col.err(f"{p}.part", f"must be one of {', '.join(PARTS)}")
        if nm is not None and nm in seen:
            col.err(f"{p}.name", f"duplicate basis name {nm!r}")
        if nm is not None:
            seen.add(nm)
        if nm is not None and wt is not None and part in PARTS:
            basis.append((nm, wt, part))
    names = {b[0] for b in basis}
    grading = col.get(raw, "grading_element", str, "") or ""
    if grading and grading not in names:
        col.err("grading_element", f"unknown element {grading!r}")
    brackets = []
    pairs: set = set()
    for k, e in enumerate(col.get(raw, "brackets", list, "", required=False) or []):
        p = f"brackets[{k}]"
        a = col.get(e, "a", str, p)
        b = col.get(e, "b", str, p)
        for key, x in (("a", a), ("b", b)):
            if x is not None and x not in names:
                col.err(f"{p}.{key}", f"unknown element {x!r}")
        if a is not None and b is not None and (a, b) in pairs:
            col.err(p, f"bracket ({a}, {b}) listed twice")
        pairs.add((a, b))
        value = col.combo(col.get(e, "value", list, p) or [], f"{p}.value", names)
        if a in names and b in names:
            brackets.append((a, b, value))
    group = []
    graw = col.get(raw, "group", dict, "", required=False)
    if graw is not None:
        for k, g in enumerate(col.get(graw, "generators", list, "group") or []):
            p = f"group.generators[{k}]"
            order = col.get(g, "order", int, p)
            mat = col.matrix(col.get(g, "matrix", list, p), len(basis), f"{p}.matrix")
            if order is not None and mat:
                group.append((order, mat))
    modules = []
    mnames: set = set()
    for k, m in enumerate(col.get(raw, "modules", list, "", required=False) or []):
        p = f"modules[{k}]"
        mname = col.get(m, "name", str, p)
        if mname is not None and mname in mnames:
            col.err(f"{p}.name", f"duplicate module name {mname!r}")
        mnames.add(mname)
        mb = []
        mseen: set = set()
        for i, b in enumerate(col.get(m, "basis", list, p) or []):
            q = f"{p}.basis[{i}]"
            nm = col.get(b, "name", str, q)
            wt = col.get(b, "weight", int, q)
            if nm is not None and nm in mseen:
                col.err(f"{q}.name", f"duplicate basis name {nm!r}")
            if nm is not None:
                mseen.add(nm)
            if nm is not None and wt is not None:
                mb.append((nm, wt))
        vnames = {b[0] for b in mb}
        gnames = {b[0] for b in basis if b[2] == "quotient"}
        acts = []
        for i, e in enumerate(col.get(m, "action", list, p, required=False) or []):
            q = f"{p}.action[{i}]"
            x = col.get(e, "x", str, q)
            v = col.get(e, "v", str, q)
            if x is not None and x not in gnames:
                col.err(f"{q}.x", f"unknown quotient element {x!r}")
            if v is not None and v not in vnames:
                col.err(f"{q}.v", f"unknown module element {v!r}")
            value = col.combo(col.get(e, "value", list, q) or [], f"{q}.value", vnames)
            if x in gnames and v in vnames:
                acts.append((x, v, value))
        mg = []
        for i, g in enumerate(col.get(m, "group", list, p, required=False) or []):
            mg.append(col.matrix(g, len(mb), f"{p}.group[{i}]"))
        if graw is not None and m.get("group") is not None and len(mg) != len(group):
            col.err(f"{p}.group", "needs one matrix per group generator")
        if mname is not None:
            modules.append(ModuleDecl(mname, tuple(mb), tuple(acts), tuple(mg)))
    sections = []
    for k, s in enumerate(col.get(raw, "sections", list, "", required=False) or []):
        p = f"sections[{k}]"
        sname = col.get(s, "name", str, p)
        imgs = []
        images = col.get(s, "images", dict, p) or {}
        for gname in sorted(images):
            if gname not in names:
                col.err(f"{p}.images.{gname}", f"unknown element {gname!r}")
                continue
            imgs.append((gname, col.combo(images[gname], f"{p}.images.{gname}", names)))
        if sname is not None:
            sections.append(SectionDecl(sname, tuple(imgs)))
    if col.errors:
        raise ParseError(col.errors)
    return InputDocument(name, tuple(basis), grading, tuple(brackets), tuple(group), tuple(modules),
                         tuple(sections), fmt)


def _combo_json(c: Combo) -> list:
    return [[nm, format_rational(x)] for nm, x in c]


def serialize(doc: InputDocument) -> str:
    out: dict = {
        "format": doc.format,
        "name": doc.name,
        "basis": [{"name": n, "weight": w, "part": p} for n, w, p in doc.basis],
        "grading_element": doc.grading_element,
        "brackets": [{"a": a, "b": b, "value": _combo_json(v)} for a, b, v in doc.brackets],
    }
    if doc.group:
        out["group"] = {"generators": [{"order": o, "matrix": [[format_rational(x) for x in r] for r in m]}
                                       for o, m in doc.group]}
    if doc.modules:
        out["modules"] = [{
            "name": m.name,
            "basis": [{"name": n, "weight": w} for n, w in m.basis],
            "action": [{"x": x, "v": v, "value": _combo_json(c)} for x, v, c in m.action],
            **({"group": [[[format_rational(x) for x in r] for r in g] for g in m.group]} if m.group else {}),
        } for m in doc.modules]
    if doc.sections:
        out["sections"] = [{"name": s.name, "images": {g: _combo_json(c) for g, c in s.images}}
                           for s in doc.sections]
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def to_extension(doc: InputDocument) -> GradedExtension:
    brackets: dict = {}
    for a, b, val in doc.brackets:
        d: dict = {}
        for nm, c in val:
            d[nm] = d.get(nm, Fraction(0)) + c
        brackets[(a, b)] = d
    E = GradedExtension.build(list(doc.basis), brackets, doc.grading_element, None, doc.name)
    if doc.group:
        from .graded import FiniteGroupAction
        n = E.total.dim
        gens = tuple(Matrix(n, n, m) for _, m in doc.group)
        E.action = FiniteGroupAction(E.total.space, gens, tuple(o for o, _ in doc.group))
    return E


def load_document(ref: str) -> InputDocument:
    """Read a document from a path, or from a bundled fixture name such as ``h2``."""
    path = Path(ref)
    if path.is_file():
        return parse(path.read_text(encoding="utf-8"))
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    bundled = resources.files("nabcoh") / "fixtures" / f"{stem}.json"
    if bundled.is_file():
        return parse(bundled.read_text(encoding="utf-8"))
    raise ParseError([f"{ref}: no such file or bundled fixture"])


# -- report formatting --------------------------------------------------------------

def _q(x: Fraction) -> str:
    return format_rational(x)


def _vec_text(names: Sequence[str], v: Sequence[Fraction]) -> str:
    parts = []
    for nm, c in zip(names, v):
        if c:
            parts.append(nm if c == 1 else f"-{nm}" if c == -1 else f"{_q(c)}*{nm}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def _header(command: str, **fields: Any) -> list[str]:
    lines = [f"command: {command}"]
    lines += [f"{k.replace('_', ' ')}: {v}" for k, v in fields.items()]
    return lines


def _validation_lines(E: GradedExtension) -> tuple[list[str], bool]:
    rep = validate_extension(E)
    lines = []
    for c in rep.checks:
        if c.passed:
            lines.append(f"check {c.name}: pass")
        else:
            lines.append(f"check {c.name}: FAIL at ({', '.join(c.witness)})")
    return lines, rep.passed


def report_validate(doc: InputDocument) -> tuple[str, int]:
    E = to_extension(doc)
    lines = _header("validate", input=doc.name)
    body, ok = _validation_lines(E)
    lines += body
    for m in doc.modules:
        M = _named_module(E, m)
        for c in validate_module(M).checks:
            status = "pass" if c.passed else f"FAIL at ({', '.join(c.witness)})"
            lines.append(f"check module {m.name} {c.name}: {status}")
            ok = ok and c.passed
    lines.append(f"result: {'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n", 0 if ok else 1


def _named_module(E: GradedExtension, decl: ModuleDecl) -> LieModule:
    g = E.g
    V = GradedVectorSpace.of(*decl.basis)
    action: dict = {}
    for x, v, val in decl.action:
        key = (g.names.index(x), V.index[v])
        d = action.setdefault(key, {})
        for nm, c in val:
            d[V.index[nm]] = d.get(V.index[nm], Fraction(0)) + c
    if g.grading is not None:
        for v in range(V.dim):
            if (g.grading, v) not in action and V.weights[v]:
                action[(g.grading, v)] = {v: Fraction(V.weights[v])}
    return LieModule(g, V, action)


def _module_for(E: GradedExtension, doc: InputDocument, which: str,
                invariant: bool) -> tuple[LieModule, ModuleAction | None]:
    if which == "adjoint":
        M = LieModule.adjoint(E.g)
        act = None
        if invariant and E.action is not None:
            gq = [Matrix(E.g.dim, E.g.dim, tuple(tuple(g[i, j] for j in E.quotient_idx) for i in E.quotient_idx))
                  for g in E.action.generators]
            act = ModuleAction.from_generators(E.g, E.g.space, [(m, m) for m in gq], E.action.orders)
        return M, act
    if which.startswith("stage:"):
        try:
            N = int(which.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad stage reference {which!r}") from None
        if N < 1 or N > E.depth:
            raise InputError(f"stage {N} is outside 1..{E.depth}")
        st = tower_stage(E, N)
        return st.module, st.action if invariant else None
    for decl in doc.modules:
        if decl.name == which:
            M = _named_module(E, decl)
            act = None
            if invariant and E.action is not None:
                if not decl.group:
                    raise InputError(f"module {which!r} declares no group action")
                gq = [Matrix(E.g.dim, E.g.dim, tuple(tuple(g[i, j] for j in E.quotient_idx)
                                                    for i in E.quotient_idx)) for g in E.action.generators]
                gv = [Matrix(M.space.dim, M.space.dim, m) for m in decl.group]
                act = ModuleAction.from_generators(E.g, M.space, list(zip(gq, gv)), E.action.orders)
            return M, act
    raise InputError(f"unknown module {which!r}; use adjoint, stage:N or a declared module name")


def report_cohomology(doc: InputDocument, degree: int, weight: int, module: str, invariant: bool) -> str:
    E = to_extension(doc)
    _require(E)
    M, act = _module_for(E, doc, module, invariant)
    res = cohomology(M, degree, weight, act)
    lines = _header("cohomology", input=doc.name, module=module, degree=degree, weight=weight,
                    invariant="yes" if act is not None else "no")
    lines.append(f"cocycle space dimension {len(res.cocycle_basis)}")
    lines.append(f"coboundary space dimension {len(res.coboundary_basis)}")
    lines.append(f"cohomology dimension {res.dimension}")
    if res.character_dimension is not None:
        lines.append(f"invariant dimension by character {res.character_dimension}")
    for k, rep in enumerate(res.representatives):
        terms = [f"{'' if c == 1 else _q(c) + ' '}{'^'.join(t) or '1'} -> {v}" for t, v, c in rep.terms()]
        lines.append(f"class {k + 1}: {' + '.join(terms)}")
    return "\n".join(lines) + "\n"


class ValidationFailure(Exception):
    pass


def _require(E: GradedExtension) -> None:
    rep = validate_extension(E)
    if not rep.passed:
        c = rep.failures()[0]
        raise ValidationFailure(f"extension fails validation: {c.name} at ({', '.join(c.witness)})")


def _map_text(E: GradedExtension, rows: Sequence[Sequence[Fraction]]) -> str:
    parts = []
    for a, r in enumerate(rows):
        if any(r):
            parts.append(f"{E.g.names[a]} -> {_vec_text(E.n_space.names, r)}")
    return ", ".join(parts)


def _points_summary(T: TowerReport) -> str:
    if T.is_empty:
        return f"empty from stage {T.empty_from}"
    if T.conditions:
        return f"conditional on {len(T.conditions)} equations in {T.free_parameters} parameters"
    if T.free_parameters == 0:
        return "single point"
    k = T.free_parameters
    return f"{k} free parameter{'s' if k != 1 else ''}"


def report_sections(doc: InputDocument) -> str:
    E = to_extension(doc)
    _require(E)
    V = section_variety(E)
    lines = _header("sections", input=doc.name)
    lines.append(f"coordinates: {len(V.coordinates)}")
    for c in V.coordinates:
        lines.append(f"  {c.name} (weight {c.weight}): {_map_text(E, c.map)}")
    lines.append(f"constraints: {len(V.constraints)}")
    for c in V.constraints:
        lines.append(f"  [{c.pair[0]}, {c.pair[1]}] component {c.target}: {c.poly} = 0")
    T = run_tower(E)
    lines.append(f"points over rationals: {_points_summary(T)}")
    if not T.is_empty and not T.conditions and T.free_parameters == 0:
        for name, v in sorted(((n, x) for n, x in zip(V.coordinate_names(), T.rational_point([]))),
                              key=lambda t: natural_key(t[0])):
            lines.append(f"  {name} = {_q(v)}")
    return "\n".join(lines) + "\n"


def report_tower(doc: InputDocument, max_stage: int | None, algebra: str) -> str:
    E = to_extension(doc)
    _require(E)
    T = run_tower(E, max_stage, algebra)
    lines = _header("tower", input=doc.name, algebra=algebra, max_stage=T.max_stage)
    lines.append(f"coordinates: {len(T.variety.coordinates)}")
    lines.append(f"constraints: {len(T.variety.constraints)}")
    base = None
    if algebra == "rationals":
        base = T.variety.section(T.rational_point([Fraction(0)] * T.free_parameters))
    for s in T.stages:
        lines.append(f"stage {s.index}: {s.status}; slice dimension {s.kernel_dimension}; "
                     f"torsor dimension {s.torsor_dimension}; stage coordinates {len(s.coordinates)}; "
                     f"stage constraints {s.constraints}; cumulative {s.cumulative_coordinates} coordinates, "
                     f"{s.cumulative_constraints} constraints")
        for p in s.conditions:
            lines.append(f"  condition: {p} = 0")
        if base is not None and s.kernel_dimension:
            try:
                ob = obstruction(base, s.index)
            except InputError:
                continue
            coords = ", ".join(_q(c) for c in ob.coordinates)
            state = "zero" if ob.is_zero else "nonzero"
            lines.append(f"  obstruction at base point: {state}; class coordinates ({coords})")
    lines.append(f"result: {_points_summary(T)}")
    if not T.is_empty:
        names = T.algebra.names
        for co in sorted(T.variety.coordinates, key=lambda c: natural_key(c.name)):
            el = T.values[co.name]
            if T.algebra.dimension == 1:
                lines.append(f"  {co.name} = {el.coords[0]}")
            else:
                comps = ", ".join(f"{nm}: {p}" for nm, p in zip(names, el.coords))
                lines.append(f"  {co.name} = ({comps})")
    return "\n".join(lines) + "\n"


def report_normalize(doc: InputDocument, section: str | None) -> str:
    E = to_extension(doc)
    _require(E)
    decls = [s for s in doc.sections if section is None or s.name == section]
    if not decls:
        raise InputError("no matching section in the document" if section else "document declares no sections")
    V = section_variety(E)
    lines = _header("normalize", input=doc.name)
    for d in decls:
        images = {g: {nm: c for nm, c in combo} for g, combo in d.images}
        s = LieSection.from_images(E, images)
        res = normalize_section(s, E)
        lines.append(f"section {d.name}:")
        lines.append(f"  conjugator: {_vec_text(E.total.names, res.conjugator)}")
        lines.append(f"  graded section: {_map_text(E, res.section.defect) or 'canonical splitting'}")
        try:
            assignment = res.section.assignment(V)
        except InputError:
            lines.append("  coordinates: not an invariant section")
        else:
            lines.append("  coordinates: " + (", ".join(f"{n} = {_q(v)}" for n, v in assignment) or "none"))
        lines.append(f"  homomorphism: {'yes' if res.section.is_homomorphism() else 'no'}")
        lines.append(f"  stabilizer trivial: {'yes' if res.stabilizer_trivial else 'no'}")
    return "\n".join(lines) + "\n"


def report_gm_check(d: int | None, max_degree: int, algebra: str) -> str:
    ds = [d] if d is not None else list(range(-5, 6))
    lines = _header("gm-check", max_degree=max_degree, algebra=algebra)
    ok = True
    for k in ds:
        r = h1_vanishing_check(k, max_degree, algebra)
        ok = ok and r.verified
        lines.append(f"d = {k}: cocycle space dimension {r.cocycle_dimension}; "
                     f"coboundary space dimension {r.coboundary_dimension}; "
                     f"verified {'true' if r.verified else 'false'}")
    lines.append(f"result: {'H1 vanishes' if ok else 'verification failed'}")
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nabcoh", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def doc_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("document", help="JSON document path or bundled fixture name (h2, l1, l1_z2, u2, a2)")
        p.add_argument("--out", help="write the report here instead of standard output")
        return p

    doc_cmd("validate", "check the extension and any declared modules")
    p = doc_cmd("cohomology", "weight-graded Lie algebra cohomology of the quotient")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--weight", type=int, default=0)
    p.add_argument("--module", default="adjoint", help="adjoint, stage:N, or a declared module name")
    p.add_argument("--invariant", action="store_true", help="restrict to group invariants")
    doc_cmd("sections", "coordinates and constraints of the graded section variety")
    p = doc_cmd("tower", "solve the section variety stage by stage")
    p.add_argument("--max-stage", type=int)
    p.add_argument("--algebra", default="rationals", choices=BUILTIN_ALGEBRAS)
    p = doc_cmd("normalize", "conjugate declared sections to their graded normal form")
    p.add_argument("--section", help="only this declared section")
    p = sub.add_parser("gm-check", help="vanishing of H1 for Laurent-polynomial cocycles")
    p.add_argument("--d", type=int, help="character exponent (default: every d in -5..5)")
    p.add_argument("--max-degree", type=int, default=10)
    p.add_argument("--algebra", default="rationals", choices=BUILTIN_ALGEBRAS)
    p.add_argument("--out")
    return ap


def run(argv: Sequence[str] | None = None) -> tuple[str, int]:
    """Execute a command; returns the report text (or error message) and the exit code."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gm-check":
            return report_gm_check(args.d, args.max_degree, args.algebra), 0
        doc = load_document(args.document)
        if args.command == "validate":
            return report_validate(doc)
        if args.command == "cohomology":
            return report_cohomology(doc, args.degree, args.weight, args.module, args.invariant), 0
        if args.command == "sections":
            return report_sections(doc), 0
        if args.command == "tower":
            return report_tower(doc, args.max_stage, args.algebra), 0
        if args.command == "normalize":
            return report_normalize(doc, args.section), 0
    except (ParseError, ValidationFailure) as exc:
        return _error_text(exc), 1
    except (InputError, AssertionError) as exc:
        return _error_text(exc), 2
    raise AssertionError(f"unhandled command {args.command}")


def _error_text(exc: Exception) -> str:
    if isinstance(exc, ParseError):
        return "".join(f"error: {e}\n" for e in exc.errors)
    return f"error: {exc}\n"


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    text, code = run(argv)
    if text.startswith("error: "):
        sys.stderr.write(text)
    elif getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
