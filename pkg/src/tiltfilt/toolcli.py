"""Input documents, command dispatch and report rendering for the ``tiltfilt`` command."""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field as dc_field
from typing import Optional

from gmpy2 import mpq

from . import filtrate as ft
from . import tiltcore as tc
from .corpora import BUNDLED, bundled_text
from .exactlin import GF, QQ, Field, Mat
from .quivalg import (
    FDAlgebra,
    Module,
    ModuleMap,
    NonAdmissible,
    Quiver,
    Relation,
    ValidationError,
    build_path_algebra,
    dual_regular,
    projective_module,
    random_module,
    simple_module,
)

_MPQ = type(mpq(0))

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_AUDIT = 0, 1, 2, 3

TOP_KEYS = ("name", "field", "quiver", "relations", "modules", "morphisms", "tilting")


class ParseError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Input documents
# ---------------------------------------------------------------------------

@dataclass
class ModuleSpec:
    dims: tuple
    arrows: dict            # arrow name -> Mat, declaration order


@dataclass
class MorphismSpec:
    source: str
    target: str
    blocks: dict            # vertex name -> Mat


@dataclass
class AlgFile:
    name: str
    field: Field
    quiver: Quiver
    relations: tuple
    modules: dict
    morphisms: dict
    tilting: object         # "DA", "A" or a tuple of module names

    def __post_init__(self):
        self._algebra = None
        self._built = {}

    def __eq__(self, other):
        if not isinstance(other, AlgFile):
            return NotImplemented
        return self.to_document() == other.to_document()

    @property
    def algebra(self) -> FDAlgebra:
        if self._algebra is None:
            try:
                self._algebra = build_path_algebra(self.quiver, self.relations, self.field, name=self.name)
            except NonAdmissible as exc:
                raise ValidationError(f"relations: {exc}") from None
        return self._algebra

    def module(self, name: str) -> Module:
        if name not in self.modules:
            raise PreconditionError(f"no module named {name!r}")
        if name not in self._built:
            alg = self.algebra
            spec = self.modules[name]
            aidx = {a.name: i for i, a in enumerate(self.quiver.arrows)}
            action = {alg.generators[aidx[a]]: m for a, m in spec.arrows.items()}
            try:
                self._built[name] = Module(alg, spec.dims, action, name=name)
            except ValidationError as exc:
                raise ValidationError(f"module {name}: {exc}") from None
        return self._built[name]

    def morphism(self, name: str) -> ModuleMap:
        if name not in self.morphisms:
            raise PreconditionError(f"no morphism named {name!r}")
        spec = self.morphisms[name]
        s, t = self.module(spec.source), self.module(spec.target)
        f = self.field
        blocks = []
        for v, vn in enumerate(self.quiver.vertices):
            blocks.append(spec.blocks.get(vn, Mat.zeros(f, t.dims[v], s.dims[v])))
        try:
            return ModuleMap(s, t, blocks)
        except ValueError as exc:
            raise ValidationError(f"morphism {name}: {exc}") from None

    def all_modules(self) -> list:
        return [self.module(n) for n in self.modules]

    def validate(self):
        self.algebra
        for n in self.modules:
            self.module(n)
        for n in self.morphisms:
            self.morphism(n)
        if isinstance(self.tilting, tuple):
            for n in self.tilting:
                if n not in self.modules:
                    raise ValidationError(f"tilting: unknown module {n!r}")

    def tilting_arg(self):
        if isinstance(self.tilting, str):
            return self.tilting
        return [self.module(n) for n in self.tilting]

    def to_document(self) -> dict:
        f = self.field
        fmt = lambda m: [[f.format(x) for x in row] for row in m.rows]
        return {
            "name": self.name,
            "field": f.name,
            "quiver": {"vertices": list(self.quiver.vertices),
                       "arrows": [[a.name, a.source, a.target] for a in self.quiver.arrows]},
            "relations": [[[f.format(c), list(p)] for c, p in r.terms] for r in self.relations],
            "modules": {n: {"dims": list(s.dims), "arrows": {a: fmt(m) for a, m in s.arrows.items()}}
                        for n, s in self.modules.items()},
            "morphisms": {n: {"source": s.source, "target": s.target,
                              "blocks": {v: fmt(m) for v, m in s.blocks.items()}}
                          for n, s in self.morphisms.items()},
            "tilting": self.tilting if isinstance(self.tilting, str) else list(self.tilting),
        }


def _need(cond, where, msg):
    if not cond:
        raise ParseError(f"{where}: {msg}")


def _parse_field(text) -> Field:
    _need(isinstance(text, str), "field", "expected a string such as 'Q' or 'F5'")
    if text == "Q":
        return QQ
    _need(text[:1] == "F" and text[1:].isdigit(), "field", f"unknown field {text!r}")
    p = int(text[1:])
    _need(p > 1 and all(p % q for q in range(2, int(p ** 0.5) + 1)), "field", f"{p} is not prime")
    return GF(p)


def _parse_scalar(f: Field, x, where):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError(f"{where}: scalars must be integers or 'a/b' strings")
    try:
        return f(x)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: cannot parse scalar {x!r}") from None


def _parse_matrix(f: Field, rows, nrows: int, ncols: int, where) -> Mat:
    _need(isinstance(rows, list), where, "matrix must be a list of rows")
    if nrows == 0:
        _need(rows == [], where, "expected an empty matrix")
        return Mat.zeros(f, 0, ncols)
    _need(len(rows) == nrows, where, f"expected {nrows} rows, got {len(rows)}")
    out = []
    for i, r in enumerate(rows):
        _need(isinstance(r, list) and len(r) == ncols, f"{where}[{i}]", f"expected a row of length {ncols}")
        out.append([_parse_scalar(f, x, f"{where}[{i}][{j}]") for j, x in enumerate(r)])
    return Mat(f, nrows, ncols, out)


def _check_keys(d, allowed, where, required=()):
    _need(isinstance(d, dict), where, "expected an object")
    extra = [k for k in d if k not in allowed]
    _need(not extra, where, f"unknown keys {extra}")
    missing = [k for k in required if k not in d]
    _need(not missing, where, f"missing keys {missing}")


def parse_document(doc: dict, validate: bool = True) -> AlgFile:
    _check_keys(doc, TOP_KEYS, "document", ("field", "quiver"))
    f = _parse_field(doc["field"])
    q = doc["quiver"]
    _check_keys(q, ("vertices", "arrows"), "quiver", ("vertices",))
    verts = q["vertices"]
    _need(isinstance(verts, list) and all(isinstance(v, str) for v in verts), "quiver.vertices",
          "expected a list of names")
    arrows = q.get("arrows", [])
    _need(isinstance(arrows, list), "quiver.arrows", "expected a list")
    for i, a in enumerate(arrows):
        _need(isinstance(a, list) and len(a) == 3 and all(isinstance(x, str) for x in a),
              f"quiver.arrows[{i}]", "expected [name, source, target]")
    try:
        quiver = Quiver(tuple(verts), tuple(tuple(a) for a in arrows))
    except ValueError as exc:
        raise ValidationError(f"quiver: {exc}") from None
    rels = []
    for i, r in enumerate(doc.get("relations", [])):
        _need(isinstance(r, list) and r, f"relations[{i}]", "expected a non-empty list of [coefficient, path]")
        terms = []
        for j, t in enumerate(r):
            w = f"relations[{i}][{j}]"
            _need(isinstance(t, list) and len(t) == 2 and isinstance(t[1], list), w, "expected [coefficient, path]")
            terms.append((_parse_scalar(f, t[0], w), tuple(t[1])))
        rels.append(Relation(tuple(terms)))
    arrow_ends = {a.name: (a.source, a.target) for a in quiver.arrows}
    vpos = {v: i for i, v in enumerate(quiver.vertices)}
    mods = {}
    for name, m in (doc.get("modules") or {}).items():
        w = f"modules.{name}"
        _check_keys(m, ("dims", "arrows"), w, ("dims",))
        dims = m["dims"]
        _need(isinstance(dims, list) and len(dims) == len(verts)
              and all(isinstance(d, int) and not isinstance(d, bool) and d >= 0 for d in dims),
              f"{w}.dims", f"expected {len(verts)} non-negative integers")
        acts = {}
        given = m.get("arrows", {})
        _need(isinstance(given, dict), f"{w}.arrows", "expected an object")
        for a, rows in given.items():
            _need(a in arrow_ends, f"{w}.arrows", f"unknown arrow {a!r}")
        for a in arrow_ends:
            if a in given:
                s, t = arrow_ends[a]
                acts[a] = _parse_matrix(f, given[a], dims[vpos[t]], dims[vpos[s]], f"{w}.arrows.{a}")
        mods[name] = ModuleSpec(tuple(dims), acts)
    morphs = {}
    for name, m in (doc.get("morphisms") or {}).items():
        w = f"morphisms.{name}"
        _check_keys(m, ("source", "target", "blocks"), w, ("source", "target"))
        _need(m["source"] in mods, f"{w}.source", f"unknown module {m['source']!r}")
        _need(m["target"] in mods, f"{w}.target", f"unknown module {m['target']!r}")
        sd, td = mods[m["source"]].dims, mods[m["target"]].dims
        blocks = {}
        given = m.get("blocks", {})
        _need(isinstance(given, dict), f"{w}.blocks", "expected an object keyed by vertex")
        for v in given:
            _need(v in vpos, f"{w}.blocks", f"unknown vertex {v!r}")
        for v in quiver.vertices:
            if v in given:
                blocks[v] = _parse_matrix(f, given[v], td[vpos[v]], sd[vpos[v]], f"{w}.blocks.{v}")
        morphs[name] = MorphismSpec(m["source"], m["target"], blocks)
    til = doc.get("tilting", "DA")
    if isinstance(til, list):
        _need(all(isinstance(t, str) for t in til), "tilting", "expected module names")
        til = tuple(til)
    else:
        _need(isinstance(til, str), "tilting", "expected 'DA', 'A', a module name or a list of names")
        if til not in ("DA", "A"):
            til = (til,)
    af = AlgFile(str(doc.get("name", "")), f, quiver, tuple(rels), mods, morphs, til)
    if validate:
        af.validate()
    return af


def parse_algfile(source: str, validate: bool = True) -> AlgFile:
    """Parse a document given as json text, or as a path to a file holding it."""
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{source}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_document(doc, validate)


def dump_algfile(af: AlgFile) -> str:
    return json.dumps(af.to_document(), indent=2)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class Report:
    command: list = dc_field(default_factory=list)
    context: dict = dc_field(default_factory=dict)
    results: dict = dc_field(default_factory=dict)
    audits: dict = dc_field(default_factory=dict)
    diagnostics: list = dc_field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("command", "context", "results", "audits", "diagnostics")
             if getattr(self, k)}
        if self.exit_code:
            d["exit_code"] = self.exit_code
        return jsonable(d)


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Mat):
        return [[x.field.format(v) for v in row] for row in x.rows]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, _MPQ):
        return QQ.format(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _text_lines(x, indent: int, out: list):
    pad = "  " * indent
    if isinstance(x, dict):
        for k, v in x.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                out.append(f"{pad}{k}:")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(x, list):
        for v in x:
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                out.append(f"{pad}-")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}- {_inline(v)}")
    else:
        out.append(f"{pad}{_inline(x)}")


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(e, (dict, list)) for e in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_inline(e) for e in v) + ")"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return "{}" if v == {} else str(v)


def chain_diagram(labels: list, dims: list) -> list:
    """An indented chain ``0 <= ... <= X``, one member per line."""
    lines = []
    for i, (lab, d) in enumerate(zip(labels, dims)):
        lines.append("  " * i + ("" if i == 0 else "<= ") + f"{lab} {_inline(list(d))}")
    return lines


def emit_report(r: Report, fmt: str = "json") -> str:
    d = r.to_dict()
    if fmt == "json":
        return json.dumps(d, sort_keys=True, indent=2)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    out = []
    diagrams = []
    for name, res in d.get("results", {}).items():
        if isinstance(res, dict) and "chain" in res:
            diagrams.append((name, res["chain"]))
    _text_lines(d, 0, out)
    for name, ch in diagrams:
        out.append(f"filtration of {name}:")
        out.extend("  " + line for line in chain_diagram(ch["labels"], ch["dims"]))
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def context_summary(ctx: tc.TiltingContext) -> dict:
    return {
        "pd_T": ctx.pd_T,
        "dim_B": ctx.B.dim,
        "generation_status": ctx.generation_status,
        "generation_detail": ctx.generation_detail,
        "summands": {n: list(m.dims) for n, m in zip(ctx.names, ctx.summands)},
    }


def corpus_modules(af: AlgFile, ctx: Optional[tc.TiltingContext] = None) -> list:
    """Declared modules, then indecomposable projectives, injectives and simples, without repeats."""
    alg = af.algebra
    mods = af.all_modules()
    mods += [projective_module(alg, v) for v in range(alg.num_vertices)]
    mods += dual_regular(alg)
    mods += [simple_module(alg, v) for v in range(alg.num_vertices)]
    if ctx is not None:
        mods += ctx.summands
    seen, out = set(), []
    for m in mods:
        k = m.key()
        if m.dim and k not in seen:
            seen.add(k)
            out.append(m)
    return out


def _subobject_data(s) -> dict:
    return {"dims": list(s.dims), "inclusion": [s.inclusion.blocks[v] for v in range(len(s.dims))]}


def _flags_data(fl: ft.ClassFlags) -> dict:
    return {"flags": fl.as_dict(), "true": fl.true_flags(), "ext_dims": list(fl.ext_dims),
            "witness": fl.witness}


def _filter_data(ctx, x, refined: bool) -> dict:
    rep = ft.canonical_filtration(ctx, x)
    agree = ft.trace_crosscheck(ctx, x, rep)
    members = [rep.X1, rep.X2, ft.Subobject.full(x)]
    dedup = []
    for s in members:
        if s.dim and (not dedup or dedup[-1] != s):
            dedup.append(s)
    d = {
        "canonical_dims": [list(s.dims) for s in dedup],
        "X1": _subobject_data(rep.X1),
        "X2": _subobject_data(rep.X2),
        "certificates": rep.canonical_certificates,
        "trace_crosscheck": agree,
        "chain": {"labels": ["X_0", "X_1", "X_2", "X_3"],
                  "dims": [list(s.dims) for s in rep.canonical_chain()]},
    }
    if refined:
        labels = [f"Z_{i}" for i in range(rep.n + 1)] + [f"Y_{i}" for i in range(rep.n, -1, -1)]
        d["refined"] = {
            "n": rep.n,
            "dims": rep.chain_dims(),
            "d_trace": rep.d_trace,
            "windows": [list(w.dims) for w in rep.windows],
            "certificates": rep.certificates,
        }
        d["chain"] = {"labels": labels, "dims": rep.chain_dims()}
    return d


def run_command(cmd: str, af: Optional[AlgFile], options: Optional[dict] = None) -> Report:
    opts = dict(options or {})
    rep = Report(command=[cmd] + [f"--{k}={v}" for k, v in sorted(opts.items()) if v not in (None, False)])
    if cmd == "selftest":
        from .acceptance import run_all
        results = run_all(seed=opts.get("seed") or 0)
        rep.audits = {f"criterion_{r.number}": {"ok": r.ok, "detail": r.detail} for r in results}
        if not all(r.ok for r in results):
            rep.exit_code = EXIT_AUDIT
        return rep
    if af is None:
        raise PreconditionError(f"command {cmd!r} needs an input document")
    ctx = tc.build_context(af.algebra, af.tilting_arg())
    rep.context = context_summary(ctx)
    if ctx.generation_status == "failed":
        rep.diagnostics.append(f"not a tilting module: {ctx.generation_detail}")
        rep.exit_code = EXIT_PRECONDITION
        return rep
    if cmd == "check":
        ok = tc.b_action_check(ctx)
        rep.audits["B_action"] = ok
        rep.results["modules"] = {n: list(af.module(n).dims) for n in af.modules}
        rep.results["morphisms"] = {n: [s.source, s.target] for n, s in af.morphisms.items()}
        if not ok:
            rep.exit_code = EXIT_AUDIT
    elif cmd in ("classify", "filter", "jtable"):
        name = opts.get("module")
        if not name:
            raise PreconditionError(f"{cmd} needs --module")
        x = af.module(name)
        if cmd == "classify":
            fl = ft.classify(ctx, x)
            rep.results[name] = _flags_data(fl)
            bad = ft.flag_consistency(fl)
            if bad:
                rep.diagnostics.extend(bad)
                rep.exit_code = EXIT_AUDIT
        elif cmd == "filter":
            d = _filter_data(ctx, x, bool(opts.get("refined")))
            rep.results[name] = d
            if not d["trace_crosscheck"]:
                rep.diagnostics.append("trace_crosscheck disagrees with the canonical filtration")
                rep.exit_code = EXIT_AUDIT
        else:
            tab = tc.j_table(ctx, x)
            rep.results[name] = {"J": {f"{i},{j}": list(m.dims) for (i, j), m in sorted(tab.items())}}
            viol = tc.j_table_violations(tab)
            rep.audits["vanishing"] = not viol
            if viol:
                rep.diagnostics.append(f"nonzero J at {viol}")
                rep.exit_code = EXIT_AUDIT
    elif cmd == "audit":
        _audit(ctx, af, opts, rep)
    else:
        raise PreconditionError(f"unknown command {cmd!r}")
    return rep


def _audit(ctx, af: AlgFile, opts: dict, rep: Report):
    rng = random.Random(opts.get("seed") or 0)
    samples = corpus_modules(af, ctx)
    samples += [m for m in (random_module(ctx.A, rng) for _ in range(opts.get("samples") or 10)) if m.dim]
    flags = [ft.classify(ctx, m) for m in samples]
    disjoint = [m.dims for m, fl in zip(samples, flags) if ft.flag_consistency(fl)]
    hv = ft.hom_vanishing_audit(ctx, samples, flags)
    cl = ft.closure_spot_checks(ctx, samples, rng, per_kind=opts.get("closure") or 10, flags=flags)
    unique = [m.dims for m in samples if not ft.trace_crosscheck(ctx, m)]
    funct = {}
    for n in af.morphisms:
        ok, wit = ft.functoriality_check(ctx, af.morphism(n))
        funct[n] = ok if ok else {"ok": False, "witness": wit}
    inj = ft.maximal_injective_audit(ctx.A)
    rep.audits = {
        "samples": len(samples),
        "flag_consistency": {"ok": not disjoint, "violations": disjoint},
        "hom_vanishing": {"ok": hv.ok, "pairs": hv.pairs_checked, "violations": hv.violations,
                          "kerF0_pairs": hv.kerf0_checked, "kerF0_violations": hv.kerf0_violations},
        "closure": {"ok": cl.ok, "checked": cl.checked, "violations": cl.violations},
        "uniqueness": {"ok": not unique, "violations": unique},
        "functoriality": funct,
        "injectives": {"verdict": inj.verdict, "entries": inj.entries, "witness": inj.witness},
    }
    if disjoint or not hv.ok or not cl.ok or unique or not all(v is True for v in funct.values()):
        rep.exit_code = EXIT_AUDIT


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    src = argparse.ArgumentParser(add_help=False)
    g = src.add_mutually_exclusive_group()
    g.add_argument("file", nargs="?", help="input document (json)")
    g.add_argument("--bundled", choices=sorted(BUNDLED), help="use a bundled corpus")
    p = argparse.ArgumentParser(prog="tiltfilt", description="Tilting-module filtrations over finite-dimensional algebras.")
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("check", parents=[common, src], help="verify the tilting hypotheses")
    for name in ("classify", "jtable"):
        sp = sub.add_parser(name, parents=[common, src])
        sp.add_argument("--module", required=True)
    sp = sub.add_parser("filter", parents=[common, src], help="canonical (and refined) filtration")
    sp.add_argument("--module", required=True)
    sp.add_argument("--refined", action="store_true")
    sp = sub.add_parser("audit", parents=[common, src], help="hom-vanishing, closure and injective audits")
    sp.add_argument("--samples", type=int, default=10)
    sub.add_parser("selftest", parents=[common], help="run every acceptance criterion")
    sub.add_parser("corpus", parents=[common], help="print a bundled document").add_argument("name", choices=sorted(BUNDLED))
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "corpus":
        print(bundled_text(args.name))
        return EXIT_OK
    opts = {k: getattr(args, k) for k in ("module", "refined", "seed", "samples") if hasattr(args, k)}
    try:
        af = None
        if args.cmd != "selftest":
            if args.bundled:
                af = parse_algfile(bundled_text(args.bundled))
            elif args.file:
                af = parse_algfile(args.file)
            else:
                raise PreconditionError("give an input document or --bundled NAME")
        rep = run_command(args.cmd, af, opts)
    except (ParseError, ValidationError) as exc:
        rep, code = Report(command=[args.cmd], diagnostics=[f"{type(exc).__name__}: {exc}"]), EXIT_INPUT
        rep.exit_code = code
    except (tc.NotSelfOrthogonal, tc.ProjDimExceeded, PreconditionError) as exc:
        rep = Report(command=[args.cmd], diagnostics=[f"{type(exc).__name__}: {exc}"], exit_code=EXIT_PRECONDITION)
    except (ft.CertificateFailed, ft.MismatchDetected, ft.NonTermination, tc.ExactnessViolated,
            tc.IdentificationFailed) as exc:
        rep = Report(command=[args.cmd], diagnostics=[f"{type(exc).__name__}: {exc}"], exit_code=EXIT_AUDIT)
    print(emit_report(rep, args.format), end="" if args.format == "text" else "\n")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
