"""The eleven acceptance criteria, runnable from the CLI (``selftest``) and from pytest."""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from . import filtrate as ft
from . import tiltcore as tc
from .corpora import bundled_text
from .homcomplex import homology, projective_dimension
from .quivalg import (
    find_isomorphism,
    kernel_subobject,
    random_map,
    random_module,
    simple_module,
)

RANDOM_MODULES = 50
RANDOM_MAPS = 50
RANDOM_B_MODULES = 50
CLOSURE_SAMPLES = 20


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: dict = dc_field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.ok else 'FAIL'}] {self.title}"


@lru_cache(maxsize=None)
def load(name: str):
    from .toolcli import parse_algfile
    af = parse_algfile(bundled_text(name))
    return af, tc.build_context(af.algebra, af.tilting_arg())


@lru_cache(maxsize=None)
def corpus(name: str, seed: int = 0, extra: int = RANDOM_MODULES) -> tuple:
    """Bundled modules of a corpus followed by seeded random modules."""
    from .toolcli import corpus_modules
    af, ctx = load(name)
    rng = random.Random(f"{name}:{seed}")
    mods = corpus_modules(af, ctx)
    n = 0
    while n < extra:
        m = random_module(ctx.A, rng)
        if m.dim:
            mods.append(m)
            n += 1
    return tuple(mods)


@lru_cache(maxsize=None)
def flags_of(name: str, seed: int = 0) -> tuple:
    _, ctx = load(name)
    return tuple(ft.classify(ctx, m) for m in corpus(name, seed))


@lru_cache(maxsize=None)
def filtrations_of(name: str, seed: int = 0) -> tuple:
    _, ctx = load(name)
    return tuple(ft.canonical_filtration(ctx, m) for m in corpus(name, seed))


def criterion_1(seed: int = 0) -> CriterionResult:
    af, ctx = load("ex1")
    d = {"pd_T": ctx.pd_T}
    s2 = simple_module(ctx.A, 1)
    d["K0_summands_T+S2"] = [ft.classify(ctx, m).K0 for m in ctx.summands + [s2]]
    fl = ft.classify(ctx, af.module("M"))
    d["M_K0"], d["M_E0"] = fl.K0, fl.E0
    w = ft.ext_closure_witness(ctx)
    d["witness_dims"] = list(w.module.dims) if w else None
    ok = (ctx.pd_T == 2 and all(d["K0_summands_T+S2"]) and not fl.K0 and fl.E0
          and d["witness_dims"] == [1, 1, 0])
    return CriterionResult(1, "first example: pd 2, FacT, M in E0 not K0, extension witness", ok, d)


def criterion_2(seed: int = 0) -> CriterionResult:
    af, ctx = load("ex2")
    A = ctx.A
    gl = max(projective_dimension(simple_module(A, v)) for v in range(A.num_vertices))
    s3, s4, i4 = af.module("S3"), af.module("S4"), af.module("I4")
    f4, fi, f3 = ft.classify(ctx, s4), ft.classify(ctx, i4), ft.classify(ctx, s3)
    ker = kernel_subobject(tc.phi(ctx, s3)).dims
    d = {"gldim": gl, "S4_F2": f4.F2, "I4_F0": fi.F0, "S3_K0": f3.K0, "S3_F0": f3.F0,
         "ker_phi_S3": list(ker)}
    ok = gl == 2 and f4.F2 and fi.F0 and f3.K0 and not f3.F0 and ker == (0, 0, 0, 1)
    return CriterionResult(2, "second example: gldim 2, S4 in F2, I4 in F0, S3 in K0 not F0", ok, d)


def criterion_3(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        bad = []
        for x in corpus(name, seed):
            g = tc.GImage(ctx, tc.f_model(ctx, x).replacement).complex(tc.TOR_DEPTH)
            h0 = homology(g, 0).module
            others = [homology(g, n).dim for n in range(1, tc.TOR_DEPTH + 1)]
            cu = tc.counit_identification(ctx, x)
            if (any(others) or find_isomorphism(h0, x) is None or not cu.iso.is_iso()):
                bad.append(list(x.dims))
        d[name] = {"modules": len(corpus(name, seed)), "failures": bad}
        ok = ok and not bad
    return CriterionResult(3, "G.F homology is X in degree 0, zero in 1..4; counit is an iso", ok, d)


def criterion_4(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        jbad = [list(x.dims) for x in corpus(name, seed) if tc.j_table_violations(tc.j_table(ctx, x))]
        rng = random.Random(f"B:{name}:{seed}")
        tbad, n = [], 0
        while n < RANDOM_B_MODULES:
            m = random_module(ctx.B, rng)
            if not m.dim:
                continue
            n += 1
            if tc.tor_module(ctx, m, 3).dim or tc.tor_module(ctx, m, 4).dim:
                tbad.append(list(m.dims))
        d[name] = {"jtable_failures": jbad, "B_modules": n, "tor_failures": tbad}
        ok = ok and not jbad and not tbad
    return CriterionResult(4, "J-table vanishing pattern; Tor_3 = Tor_4 = 0 on random B-modules", ok, d)


def criterion_5(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        bad, split = [], 0
        for x in corpus(name, seed):
            try:
                fs = tc.fundamental_sequence(ctx, x)
            except tc.ExactnessViolated:
                bad.append(list(x.dims))
                continue
            if fs.middle_dim != tc.tor_module(ctx, tc.ext_module(ctx, x, 1), 1).dim:
                bad.append(list(x.dims))
            da = tc.decomposition_audit(ctx, x)
            if da is False:
                bad.append(list(x.dims))
            elif da:
                split += 1
        d[name] = {"failures": bad, "split_checked": split}
        ok = ok and not bad
    return CriterionResult(5, "fundamental sequence exact; split decomposition when F1 = 0", ok, d)


def criterion_6(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        mods = corpus(name, seed)
        bad = []
        try:
            reps = filtrations_of(name, seed)
        except (ft.CertificateFailed, ft.NonTermination) as exc:
            d[name] = {"error": str(exc)}
            ok = False
            continue
        for x, rep in zip(mods, reps):
            if rep.n > max(x.dim, 1) or not ft.trace_crosscheck(ctx, x, rep) or not ft.window_identity_check(ctx, rep):
                bad.append(list(x.dims))
        rng = random.Random(f"maps:{name}:{seed}")
        fbad = []
        for _ in range(RANDOM_MAPS):
            u, v = rng.choice(mods), rng.choice(mods)
            f = random_map(u, v, rng)
            good, wit = ft.functoriality_check(ctx, f)
            if not good:
                fbad.append(wit)
        d[name] = {"modules": len(mods), "failures": bad, "maps": RANDOM_MAPS, "functoriality_failures": fbad}
        ok = ok and not bad and not fbad
    return CriterionResult(6, "refined and canonical filtrations certified, unique and functorial", ok, d)


def criterion_7(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        bad = []
        for rep in filtrations_of(name, seed):
            dt = rep.d_trace
            for i in range(len(dt) - 1):
                if dt[i + 1] > dt[i] or (dt[i + 1] == dt[i] and not ft._in_f1(ctx, rep.windows[i + 1])):
                    bad.append(dt)
                    break
        d[name] = {"traces": len(filtrations_of(name, seed)), "failures": bad}
        ok = ok and not bad
    return CriterionResult(7, "d-invariant non-increasing, equality only in F1", ok, d)


def criterion_8(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        r = ft.hom_vanishing_audit(ctx, corpus(name, seed), flags_of(name, seed))
        d[name] = {"pairs": r.pairs_checked, "violations": r.violations,
                   "kerF0_pairs": r.kerf0_checked, "kerF0_violations": r.kerf0_violations}
        ok = ok and r.ok and r.pairs_checked > 0
    return CriterionResult(8, "Hom(E_i, E_j) = 0 for j > i", ok, d)


def criterion_9(seed: int = 0) -> CriterionResult:
    _, ctx = load("a2")
    bad = []
    mods = corpus("a2", seed)
    for x in mods:
        try:
            rep = ft.canonical_filtration(ctx, x)
        except ft.CertificateFailed:
            bad.append(list(x.dims))
            continue
        if not rep.X2.is_full() or not ft.classify(ctx, rep.X1.module).F0:
            bad.append(list(x.dims))
    ok = ctx.pd_T <= 1 and not bad
    return CriterionResult(9, "pd(T) <= 1: X_2 = X and X_1 in F0", ok,
                           {"pd_T": ctx.pd_T, "modules": len(mods), "failures": bad})


def criterion_10(seed: int = 0) -> CriterionResult:
    _, c_n = load("nak3")
    _, c_1 = load("ex1")
    nak = ft.maximal_injective_audit(c_n.A)
    ex1 = ft.maximal_injective_audit(c_1.A)
    i2 = next(e for e in ex1.entries if e["vertex"] == "2")
    nak_ok = nak.verdict == "extension-closed" and all(e["pd"] <= 1 for e in nak.entries if e["maximal"])
    ex1_ok = ex1.verdict == "not extension-closed" and "2" in ex1.witness and i2["maximal"] and i2["pd"] == 2
    consistent = ft.ext_closure_witness(c_1) is not None and ft.ext_closure_witness(c_n) is None
    d = {"nak3": nak.verdict, "ex1": ex1.verdict, "ex1_witness": ex1.witness,
         "I2": {"maximal": i2["maximal"], "pd": i2["pd"]}, "consistent_with_extensions": consistent}
    return CriterionResult(10, "maximal injectives decide extension-closure of FacDA", nak_ok and ex1_ok and consistent, d)


def criterion_11(seed: int = 0) -> CriterionResult:
    d, ok = {}, True
    for name in ("ex1", "ex2"):
        _, ctx = load(name)
        rng = random.Random(f"closure:{name}:{seed}")
        r = ft.closure_spot_checks(ctx, corpus(name, seed), rng, CLOSURE_SAMPLES, flags_of(name, seed))
        fl = flags_of(name, seed)
        sources = {"E0_quotients": any(f.E0 for f in fl), "E2_submodules": any(f.E2 for f in fl),
                   "E1_images": any(f.E1 for f in fl) and any(f.KerF0 for f in fl)}
        vacuous = [k for k, present in sources.items() if not present]
        d[name] = {"checked": r.checked, "violations": r.violations, "vacuous": vacuous}
        ok = (ok and r.ok and sum(r.checked.values()) >= CLOSURE_SAMPLES
              and all(r.checked[k] >= CLOSURE_SAMPLES for k, present in sources.items() if present))
    return CriterionResult(11, "E0 closed under quotients, E2 under submodules, E1 under images in KerF0", ok, d)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(seed: int = 0) -> list:
    out = []
    for c in CRITERIA:
        try:
            out.append(c(seed))
        except Exception as exc:  # a crash is a failed criterion, reported with its message
            n = CRITERIA.index(c) + 1
            out.append(CriterionResult(n, c.__name__, False, {"error": f"{type(exc).__name__}: {exc}"}))
    return out
