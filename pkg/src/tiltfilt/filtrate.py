"""Subcategory classification, the refined staircase filtration, the
canonical three-step filtration and the audits built on them."""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .exactlin import Mat, Subspace, block_matrix, kernel_vectors
from .homcomplex import projective_dimension
from .quivalg.algebra import FDAlgebra
from .quivalg.module import (
    Module,
    ModuleMap,
    Subobject,
    dual_regular,
    find_isomorphism,
    hom_dimension,
    image_of_subobject,
    image_subobject,
    kernel_subobject,
    preimage,
    quotient,
    random_map,
    simple_module,
    socle,
    sum_of_images,
    hom_basis,
    trace_of,
)
from .tiltcore import (
    TiltingContext,
    ext_dims,
    ext_module,
    phi,
    psi,
    tor_module,
)


class CertificateFailed(RuntimeError):
    pass


class NonTermination(RuntimeError):
    pass


class MismatchDetected(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Chains of subobjects
# ---------------------------------------------------------------------------

def pull_back(sub_of_quotient: Subobject, proj: ModuleMap, ambient_sub: Subobject) -> Subobject:
    """Preimage under ``ambient_sub.module -> quotient``, pushed into the ambient module."""
    pre = preimage(proj, sub_of_quotient)
    return image_of_subobject(ambient_sub.inclusion, pre)


def relative_quotient(big: Subobject, small: Subobject):
    """big/small as a module, with the projection from ``big.module``."""
    f = big.ambient.field
    inner = [Subspace.span(f, bs.dim, [bs.coordinates(r) for r in ss.basis.rows])
             for bs, ss in zip(big.spaces, small.spaces)]
    return quotient(big.module, Subobject(big.module, inner))


def trace_chain(ctx: TiltingContext, x: Module) -> list:
    """U_1 = tau_T x, U_{k+1} = preimage of tau_T(x / U_k), until stable."""
    chain = []
    cur = Subobject.zero(x)
    for _ in range(x.dim + 2):
        q, p = quotient(x, cur)
        nxt = preimage(p, trace_of(ctx.summands, q))
        if nxt == cur:
            return chain
        chain.append(nxt)
        cur = nxt
    raise NonTermination("trace chain did not stabilise")


def j11_chain(ctx: TiltingContext, x: Module) -> list:
    """V_0 = x, V_{k+1} = ker psi(V_k) (= J^1_1 V_k when F^0 x = 0), until stable."""
    cur = Subobject.full(x)
    chain = [cur]
    for _ in range(x.dim + 2):
        m = cur.module
        nxt = image_of_subobject(cur.inclusion, kernel_subobject(psi(ctx, m)))
        if nxt == cur:
            return chain
        chain.append(nxt)
        cur = nxt
    raise NonTermination("J^1_1 chain did not stabilise")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

FLAG_NAMES = ("F0", "F1", "F2", "K0", "K1", "K2", "E0", "E1", "E2", "KerF0", "KerF1", "KerF2")


@dataclass
class ClassFlags:
    F0: bool
    F1: bool
    F2: bool
    K0: bool
    K1: bool
    K2: bool
    E0: bool
    E1: bool
    E2: bool
    KerF0: bool
    KerF1: bool
    KerF2: bool
    ext_dims: tuple = ()
    witness: dict = dc_field(default_factory=dict)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FLAG_NAMES}

    def true_flags(self) -> list:
        return [k for k in FLAG_NAMES if getattr(self, k)]

    def e_class(self) -> Optional[int]:
        """The unique E-class of a nonzero module, or None."""
        es = [i for i in range(3) if getattr(self, f"E{i}")]
        return es[0] if len(es) == 1 else None


def classify(ctx: TiltingContext, x: Module) -> ClassFlags:
    e = ext_dims(ctx, x)
    kf = [d == 0 for d in e]
    fi = [all(kf[j] for j in range(3) if j != i) for i in range(3)]
    if x.dim == 0:
        return ClassFlags(*([True] * 12), ext_dims=e)
    ph = phi(ctx, x)
    k0 = ph.is_surjective()
    j11 = tor_module(ctx, ext_module(ctx, x, 1), 1)
    k2 = kf[0] and j11.dim == 0
    tc = trace_chain(ctx, x)
    e0 = bool(tc) and tc[-1].is_full()
    e2 = False
    jc = None
    if kf[0]:
        jc = j11_chain(ctx, x)
        e2 = jc[-1].dim == 0
    witness = {
        "trace_chain": [s.dims for s in tc],
        "j11_chain": [s.dims for s in jc] if jc is not None else None,
        "phi_source": ph.source.dims,
        "phi_kernel": kernel_subobject(ph).dims,
        "J11": j11.dims,
    }
    return ClassFlags(fi[0], fi[1], fi[2], k0, fi[1], k2, e0, fi[1], e2,
                      kf[0], kf[1], kf[2], ext_dims=e, witness=witness)


def flag_consistency(flags: ClassFlags) -> list:
    """Violations of F_i => K_i => E_i, F1 = K1 = E1 and E-disjointness."""
    bad = []
    for i in range(3):
        if getattr(flags, f"F{i}") and not getattr(flags, f"K{i}"):
            bad.append(f"F{i} without K{i}")
        if getattr(flags, f"K{i}") and not getattr(flags, f"E{i}"):
            bad.append(f"K{i} without E{i}")
    if not (flags.F1 == flags.K1 == flags.E1):
        bad.append("F1, K1, E1 disagree")
    if sum(flags.ext_dims) and sum(getattr(flags, f"E{i}") for i in range(3)) > 1:
        bad.append("module in two E-classes")
    return bad


# ---------------------------------------------------------------------------
# Filtrations
# ---------------------------------------------------------------------------

@dataclass
class FiltrationReport:
    x: Module
    Z: list                 # Z_0 <= ... <= Z_n
    Y: list                 # Y_0 >= ... >= Y_n
    n: int
    d_trace: list           # dim F^1 of each window W_0, ..., W_n
    windows: list           # the window modules Y_i / Z_i
    certificates: list = dc_field(default_factory=list)
    X1: Optional[Subobject] = None
    X2: Optional[Subobject] = None
    canonical_certificates: dict = dc_field(default_factory=dict)

    def chain(self) -> list:
        """Z_0 ... Z_n, Y_n ... Y_0 in order."""
        return list(self.Z) + list(reversed(self.Y))

    def chain_dims(self) -> list:
        return [s.dims for s in self.chain()]

    def canonical_chain(self) -> list:
        return [Subobject.zero(self.x), self.X1, self.X2, Subobject.full(self.x)]


def refined_filtration(ctx: TiltingContext, x: Module, certify: bool = True) -> FiltrationReport:
    """Z_0 = 0, Y_0 = x; on the window W = Y_i/Z_i add im phi(W) to Z and cut Y to ker psi(W).

    Stops when W = 0 or W lies in F_1; at most dim x steps.
    """
    Z = [Subobject.zero(x)]
    Y = [Subobject.full(x)]
    windows, d_trace, certs = [], [], []
    for i in range(x.dim + 1):
        w, p = relative_quotient(Y[i], Z[i])
        windows.append(w)
        e = ext_dims(ctx, w)
        d_trace.append(e[1])
        if w.dim == 0 or (e[0] == 0 and e[2] == 0):
            rep = FiltrationReport(x, Z, Y, i, d_trace, windows, certs)
            if certify:
                _certify_refined(ctx, rep)
            return rep
        ph, ps = phi(ctx, w), psi(ctx, w)
        z_next = pull_back(image_subobject(ph), p, Y[i])
        y_next = pull_back(kernel_subobject(ps), p, Y[i])
        if not y_next.contains(z_next):
            raise CertificateFailed("window step broke the chain order")
        Z.append(z_next)
        Y.append(y_next)
    raise NonTermination(f"refined filtration exceeded {x.dim} steps")


def _certify_refined(ctx: TiltingContext, rep: FiltrationReport):
    certs = []
    for i in range(rep.n):
        zf, _ = relative_quotient(rep.Z[i + 1], rep.Z[i])
        yf, _ = relative_quotient(rep.Y[i], rep.Y[i + 1])
        w, w2 = rep.windows[i], rep.windows[i + 1]
        c = {
            "step": i + 1,
            "Z_factor": zf.dims,
            "Z_factor_K0": classify(ctx, zf).K0,
            "Y_factor": yf.dims,
            "Y_factor_K2": _k2(ctx, yf),
            "window_is_J11": find_isomorphism(w2, tor_module(ctx, ext_module(ctx, w, 1), 1)) is not None,
            "d_monotone": rep.d_trace[i + 1] <= rep.d_trace[i],
            "d_equal_in_F1": rep.d_trace[i + 1] < rep.d_trace[i] or _in_f1(ctx, w2),
        }
        certs.append(c)
    last = rep.windows[rep.n]
    mid = {"step": "middle", "window": last.dims, "in_F1": _in_f1(ctx, last)}
    certs.append(mid)
    rep.certificates = certs
    bad = [c for c in certs for k, v in c.items() if v is False]
    if bad:
        raise CertificateFailed(f"refined filtration certificate failed: {bad}")
    if not all(rep.Z[i].contains(rep.Z[i - 1]) for i in range(1, len(rep.Z))):
        raise CertificateFailed("Z chain is not increasing")
    if not all(rep.Y[i - 1].contains(rep.Y[i]) for i in range(1, len(rep.Y))):
        raise CertificateFailed("Y chain is not decreasing")
    if not rep.Y[rep.n].contains(rep.Z[rep.n]):
        raise CertificateFailed("Z_n is not inside Y_n")


def _k2(ctx, m: Module) -> bool:
    if m.dim == 0:
        return True
    return ext_module(ctx, m, 0).dim == 0 and tor_module(ctx, ext_module(ctx, m, 1), 1).dim == 0


def _in_f1(ctx, m: Module) -> bool:
    e = ext_dims(ctx, m)
    return e[0] == 0 and e[2] == 0


def canonical_filtration(ctx: TiltingContext, x: Module,
                         refined: Optional[FiltrationReport] = None) -> FiltrationReport:
    """0 <= X_1 <= X_2 <= x with X_1 = Z_n and X_2 = Y_n, certified by classify."""
    rep = refined or refined_filtration(ctx, x)
    rep.X1 = rep.Z[rep.n]
    rep.X2 = rep.Y[rep.n]
    x1 = rep.X1.module
    mid, _ = relative_quotient(rep.X2, rep.X1)
    top, _ = quotient(x, rep.X2)
    c = {
        "X1_E0": classify(ctx, x1).E0,
        "X2/X1_E1": classify(ctx, mid).E1,
        "X/X2_E2": classify(ctx, top).E2,
    }
    if ctx.pd_T <= 1:
        c["E2_factor_zero"] = top.dim == 0
        c["X1_F0"] = classify(ctx, x1).F0
    rep.canonical_certificates = c
    if not all(c.values()):
        raise CertificateFailed(f"canonical filtration certificate failed: {c}")
    return rep


def trace_crosscheck(ctx: TiltingContext, x: Module, rep: Optional[FiltrationReport] = None,
                     strict: bool = False) -> bool:
    """Recompute X_1 from the iterated trace chain and X_2 from the J^1_1 chain of x/X_1."""
    if rep is None or rep.X1 is None:
        rep = canonical_filtration(ctx, x, rep)
    tc = trace_chain(ctx, x)
    x1 = tc[-1] if tc else Subobject.zero(x)
    q, p = quotient(x, x1)
    jc = j11_chain(ctx, q)
    x2 = preimage(p, jc[-1])
    ok = x1 == rep.X1 and x2 == rep.X2
    if strict and not ok:
        raise MismatchDetected(f"X1 {x1.dims} vs {rep.X1.dims}, X2 {x2.dims} vs {rep.X2.dims}")
    return ok


def functoriality_check(ctx: TiltingContext, f: ModuleMap):
    """f(X_i) <= X_i for i = 1, 2.  Returns (flag, witness or None)."""
    rs = canonical_filtration(ctx, f.source)
    rt = canonical_filtration(ctx, f.target)
    for name, s, t in (("X1", rs.X1, rt.X1), ("X2", rs.X2, rt.X2)):
        img = image_of_subobject(f, s)
        for v, (a, b) in enumerate(zip(img.spaces, t.spaces)):
            for r in a.basis.rows:
                if not b.contains_vector(r):
                    return False, {"level": name, "vertex": v, "vector": list(r)}
    return True, None


def iterated_j11(ctx: TiltingContext, x: Module, steps: int) -> list:
    """x, J^1_1 x, (J^1_1)^2 x, ... computed as Tor_1(T, Ext^1(T, -))."""
    out = [x]
    for _ in range(steps):
        out.append(tor_module(ctx, ext_module(ctx, out[-1], 1), 1))
    return out


def window_identity_check(ctx: TiltingContext, rep: FiltrationReport) -> bool:
    its = iterated_j11(ctx, rep.x, rep.n)
    return all(find_isomorphism(w, j) is not None for w, j in zip(rep.windows, its))


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------

@dataclass
class HomVanishingReport:
    pairs_checked: int
    violations: list
    kerf0_checked: int
    kerf0_violations: list

    @property
    def ok(self) -> bool:
        return not self.violations and not self.kerf0_violations


def hom_vanishing_audit(ctx: TiltingContext, samples: Sequence[Module],
                        flags: Optional[Sequence[ClassFlags]] = None) -> HomVanishingReport:
    """Hom(E_i, E_j) = 0 for j > i on samples, and Hom(E_0, v) = 0 whenever F^0 v = 0."""
    samples = [m for m in samples if m.dim]
    flags = list(flags) if flags is not None else [classify(ctx, m) for m in samples]
    cls = [fl.e_class() for fl in flags]
    pairs, viol, kp, kviol = 0, [], 0, []
    for a, (u, cu) in enumerate(zip(samples, cls)):
        for b, (v, cv) in enumerate(zip(samples, cls)):
            if cu is not None and cv is not None and cv > cu:
                pairs += 1
                if hom_dimension(u, v):
                    viol.append((a, b, cu, cv))
            if cu == 0 and flags[b].KerF0:
                kp += 1
                if hom_dimension(u, v):
                    kviol.append((a, b))
    return HomVanishingReport(pairs, viol, kp, kviol)


@dataclass
class InjectiveAudit:
    entries: list
    verdict: str
    witness: list

    @property
    def closed(self) -> bool:
        return self.verdict == "extension-closed"


def is_maximal_injective(alg: FDAlgebra, i: int, injectives: Optional[list] = None) -> bool:
    """I_i is maximal iff the non-split maps from injectives do not cover it.

    A map from an indecomposable injective into I_i is non-split exactly when
    it kills the (simple, essential) socle of its source, so the non-split
    maps are the maps from the modules I_k / soc I_k.
    """
    inj = injectives or dual_regular(alg)
    target = inj[i]
    maps = []
    for ik in inj:
        q, _ = quotient(ik, socle(ik))
        maps.extend(hom_basis(q, target))
    return not sum_of_images(target, maps).is_full()


def maximal_injective_audit(alg: FDAlgebra) -> InjectiveAudit:
    inj = dual_regular(alg)
    entries, witness = [], []
    for i, m in enumerate(inj):
        mx = is_maximal_injective(alg, i, inj)
        pd = projective_dimension(m)
        entries.append({"vertex": alg.vertex_names[i], "dims": m.dims, "maximal": mx, "pd": pd})
        if mx and pd > 1:
            witness.append(alg.vertex_names[i])
    verdict = "not extension-closed" if witness else "extension-closed"
    return InjectiveAudit(entries, verdict, witness)


# -- extensions -------------------------------------------------------------

def _layout(u: Module, v: Module):
    alg = u.algebra
    offs, total = {}, 0
    for k in alg.generators:
        b = alg.basis[k]
        offs[k] = (total, u.dims[b.tgt], v.dims[b.src])
        total += u.dims[b.tgt] * v.dims[b.src]
    return offs, total


def _unflatten(f, offs, z) -> dict:
    return {k: Mat(f, r, c, [list(z[o + i * c: o + (i + 1) * c]) for i in range(r)])
            for k, (o, r, c) in offs.items()}


def extension_action(u: Module, v: Module, z: dict) -> dict:
    alg = u.algebra
    f = alg.field
    action = {}
    for k in alg.generators:
        b = alg.basis[k]
        action[k] = block_matrix(f, {(0, 0): u.act(k), (0, 1): z[k], (1, 1): v.act(k)},
                                 [u.dims[b.tgt], v.dims[b.tgt]], [u.dims[b.src], v.dims[b.src]])
    return action


def _defect(u: Module, v: Module, z: dict) -> list:
    """Upper-right blocks of the module axioms for the extension action; linear in z."""
    alg = u.algebra
    e = Module(alg, [a + c for a, c in zip(u.dims, v.dims)], extension_action(u, v, z), check=False)
    out = []

    def corner(m: Mat, tgt: int, src: int):
        nu, nv = u.dims[tgt], v.dims[src]
        for i in range(nu):
            out.extend(m.rows[i][u.dims[src]:u.dims[src] + nv])

    if alg.kind == "path":
        aidx = {a.name: i for i, a in enumerate(alg.quiver.arrows)}
        for rel in alg.relations:
            idx0 = [aidx[a] for a in rel.terms[0][1]]
            s = alg.basis[alg.generators[idx0[0]]].src
            t = alg.basis[alg.generators[idx0[-1]]].tgt
            acc = None
            for c, p in rel.terms:
                m = e.path_matrix([aidx[a] for a in p]).scale(c)
                acc = m if acc is None else acc + m
            corner(acc, t, s)
    else:
        for i in range(alg.dim):
            for j in range(alg.dim):
                bi, bj = alg.basis[i], alg.basis[j]
                if bi.src != bj.tgt:
                    continue
                lhs = e.act(i) @ e.act(j)
                for k, c in alg.table.get((i, j), ()):
                    lhs = lhs - e.act(k).scale(c)
                corner(lhs, bi.tgt, bj.src)
    return out


def extension_space(u: Module, v: Module) -> list:
    """Cocycles z (one block per generator, ``u_tgt x v_src``) whose classes form a basis of Ext^1(v, u).

    The extension with cocycle z acts by ``[[rho_u, z], [0, rho_v]]``.
    """
    alg = u.algebra
    f = alg.field
    offs, total = _layout(u, v)
    if total == 0:
        return []
    cols = []
    for n in range(total):
        z = [f.zero] * total
        z[n] = f.one
        cols.append(_defect(u, v, _unflatten(f, offs, z)))
    neq = len(cols[0])
    cocycles = (kernel_vectors(Mat.from_columns(f, cols, neq)) if neq
                else [[f.one if i == n else f.zero for i in range(total)] for n in range(total)])
    cob = []
    for w in range(alg.num_vertices):
        for r in range(u.dims[w]):
            for c in range(v.dims[w]):
                vec = [f.zero] * total
                for k, (o, zr, zc) in offs.items():
                    b = alg.basis[k]
                    if b.src == w:  # rho_u(k) H_w
                        ua = u.act(k)
                        for i in range(zr):
                            vec[o + i * zc + c] += ua.rows[i][r]
                    if b.tgt == w:  # - H_w rho_v(k)
                        va = v.act(k)
                        for j in range(zc):
                            vec[o + r * zc + j] -= va.rows[c][j]
                cob.append(vec)
    cur = Subspace.span(f, total, cob)
    reps = []
    for z in cocycles:
        if not cur.contains_vector(z):
            reps.append(_unflatten(f, offs, z))
            cur = cur + Subspace.span(f, total, [z])
    return reps


def extension_module(u: Module, v: Module, z: dict) -> Module:
    """The middle term of 0 -> u -> e -> v -> 0 for the cocycle z."""
    return Module(u.algebra, [a + c for a, c in zip(u.dims, v.dims)], extension_action(u, v, z))


def in_fac_T(ctx: TiltingContext, x: Module) -> bool:
    return trace_of(ctx.summands, x).is_full()


@dataclass
class ExtensionWitness:
    sub: Module
    quotient: Module
    module: Module
    trace_dims: tuple


def fac_T_candidates(ctx: TiltingContext, extra: Sequence[Module] = ()) -> list:
    cands = list(ctx.summands)
    for v in range(ctx.A.num_vertices):
        s = simple_module(ctx.A, v)
        if in_fac_T(ctx, s):
            cands.append(s)
    cands.extend(m for m in extra if in_fac_T(ctx, m))
    return cands


def ext_closure_witness(ctx: TiltingContext, bound: int = 8,
                        extra: Sequence[Module] = ()) -> Optional[ExtensionWitness]:
    """Search 0 -> u -> e -> v -> 0 with u, v in FacT and e not in FacT, dim e <= bound."""
    cands = fac_T_candidates(ctx, extra)
    for v in cands:
        for u in cands:
            if u.dim + v.dim > bound:
                continue
            reps = extension_space(u, v)
            if not reps:
                continue
            trials = []
            if len(reps) > 1:
                trials.append({k: _sum_mats([r[k] for r in reps]) for k in reps[0]})
            trials.extend(reps)
            for z in trials:
                e = extension_module(u, v, z)
                tr = trace_of(ctx.summands, e)
                if not tr.is_full():
                    return ExtensionWitness(u, v, e, tr.dims)
    return None


def _sum_mats(ms):
    acc = ms[0]
    for m in ms[1:]:
        acc = acc + m
    return acc


# -- closure spot checks ----------------------------------------------------

def random_submodule(x: Module, rng: random.Random, gens: int = 1) -> Subobject:
    f = x.field
    vecs = {}
    support = [v for v in range(len(x.dims)) if x.dims[v]]
    for _ in range(gens):
        if not support:
            break
        v = rng.choice(support)
        vecs.setdefault(v, []).append([f.random_element(rng, 2) for _ in range(x.dims[v])])
    return Subobject.span(x, vecs)


@dataclass
class ClosureReport:
    checked: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def closure_spot_checks(ctx: TiltingContext, modules: Sequence[Module], rng: random.Random,
                        per_kind: int = 20, flags: Optional[Sequence[ClassFlags]] = None) -> ClosureReport:
    """Quotients of E_0 are E_0, submodules of E_2 are E_2, images of E_1 in Ker F^0 are E_1."""
    mods = [m for m in modules if m.dim]
    flags = list(flags) if flags is not None else [classify(ctx, m) for m in mods]
    e0 = [m for m, fl in zip(mods, flags) if fl.E0]
    e1 = [m for m, fl in zip(mods, flags) if fl.E1]
    e2 = [m for m, fl in zip(mods, flags) if fl.E2]
    kf0 = [m for m, fl in zip(mods, flags) if fl.KerF0]
    checked = {"E0_quotients": 0, "E2_submodules": 0, "E1_images": 0}
    viol = []
    for _ in range(per_kind):
        if e0:
            x = rng.choice(e0)
            q, _ = quotient(x, random_submodule(x, rng))
            checked["E0_quotients"] += 1
            if q.dim and not classify(ctx, q).E0:
                viol.append(("E0_quotient", x.dims, q.dims))
        if e2:
            x = rng.choice(e2)
            s = random_submodule(x, rng).module
            checked["E2_submodules"] += 1
            if s.dim and not classify(ctx, s).E2:
                viol.append(("E2_submodule", x.dims, s.dims))
        if e1 and kf0:
            u, v = rng.choice(e1), rng.choice(kf0)
            g = random_map(u, v, rng)
            im = image_subobject(g).module
            checked["E1_images"] += 1
            if im.dim and not classify(ctx, im).E1:
                viol.append(("E1_image", u.dims, v.dims, im.dims))
    return ClosureReport(checked, viol)
