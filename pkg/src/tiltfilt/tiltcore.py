"""The tilting context: B = End(T)^op, models of F = RHom(T, -) and
G = T (x)^L_B -, the natural maps phi and psi, the five-term sequence and
the J-table.

T is handled as a list of summands T_0, ..., T_{r-1}; the vertices of B
are these summands.  A basis element of B lying in Hom_A(T_p, T_q) sits
in the block with B-source q and B-target p, and acts on
F(X)_i = Hom_A(T_i, X) by precomposition.  Hence B e_i = Hom_A(T, T_i) and
T (x)_B B e_i = T_i.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .exactlin import Coordinatizer, Mat, Subspace, block_diag, block_matrix, hstack, solve_vector, vstack
from .homcomplex import (
    ChainMap,
    SubQuotient,
    Complex,
    ProjectiveReplacement,
    Resolution,
    homology,
    injective_resolution,
    lift_chain_map,
    projective_resolution,
    single,
    truncate_good,
)
from .quivalg.algebra import BasisElement, FDAlgebra
from .quivalg.module import (
    Module,
    ModuleMap,
    NotIso,
    ProjectiveModule,
    Subobject,
    cokernel,
    direct_sum,
    dual_regular,
    find_isomorphism,
    hom_basis,
    image_subobject,
    invert_iso,
    kernel_subobject,
    projective_module,
    regular_module,
    zero_module,
)


class NotSelfOrthogonal(ValueError):
    pass


class ProjDimExceeded(ValueError):
    pass


class IdentificationFailed(RuntimeError):
    pass


class ExactnessViolated(RuntimeError):
    pass


# depth of every resolution used for Tor windows (degrees <= 2 plus guards)
TOR_DEPTH = 4


def _flat(m: ModuleMap) -> list:
    return [x for b in m.blocks for r in b.rows for x in r]


def _combine(basis: Sequence[ModuleMap], coeffs, source: Module, target: Module) -> ModuleMap:
    f = source.field
    blocks = [Mat.zeros(f, t, s) for s, t in zip(source.dims, target.dims)]
    for c, h in zip(coeffs, basis):
        if c:
            blocks = [b + hb.scale(c) for b, hb in zip(blocks, h.blocks)]
    return ModuleMap(source, target, blocks, check=False)


class HomSpace:
    """Hom_A(s, t) with a fixed basis and coordinates."""

    def __init__(self, s: Module, t: Module, basis=None):
        self.source = s
        self.target = t
        self.basis = hom_basis(s, t) if basis is None else list(basis)
        dim = sum(a * b for a, b in zip(s.dims, t.dims))
        self._coord = Coordinatizer(s.field, [_flat(h) for h in self.basis], dim)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, m: ModuleMap) -> list:
        return self._coord.coords(_flat(m))

    def element(self, coeffs) -> ModuleMap:
        return _combine(self.basis, coeffs, self.source, self.target)


# ---------------------------------------------------------------------------
# Context
# ---------------------------------------------------------------------------

@dataclass
class FModel:
    """Hom_A(T, I(x)) truncated to cohomological degrees 0..2, with its pieces."""

    x: Module
    injective: Complex
    coaugmentation: ModuleMap
    homs: dict                    # (j, i) -> HomSpace(T_i, I^j)
    full: Complex                 # untruncated Hom complex, I^j at degree -j
    complex: Complex              # truncated, degrees 0, -1, -2
    inclusion: Optional[ChainMap]  # complex -> full (None if nothing was cut)
    replacement: ProjectiveReplacement
    _homology: dict = dc_field(default_factory=dict)

    def homology(self, i: int):
        h = self._homology.get(i)
        if h is None:
            h = homology(self.complex, -i)
            self._homology[i] = h
        return h

    def to_full(self, n: int) -> ModuleMap:
        if self.inclusion is None:
            return ModuleMap.identity(self.complex.module(n))
        return self.inclusion.component(n)


class TiltingContext:
    def __init__(self, algebra: FDAlgebra, summands: Sequence[Module], names=None):
        self.A = algebra
        self.summands = list(summands)
        self.names = list(names) if names else [m.name or f"T{i}" for i, m in enumerate(self.summands)]
        self.T, _, _ = direct_sum(self.summands, algebra=algebra)
        self.T.name = "T"
        self._lock = threading.RLock()
        self._fcache = {}
        self._torcache = {}
        self._phicache = {}
        self._psicache = {}
        self.caching = True

    # filled in by build_context
    proj_res_T: Resolution
    pd_T: int
    B: FDAlgebra
    B_maps: list
    T_right_B: Module
    generation_status: str
    generation_detail: str

    def __repr__(self):
        return (f"TiltingContext(A={self.A.name or self.A}, summands={len(self.summands)}, "
                f"pd(T)={self.pd_T}, dim B={self.B.dim}, generation={self.generation_status})")

    def _memo(self, cache, key, build):
        if not self.caching:
            return build()
        with self._lock:
            hit = cache.get(key)
        if hit is not None:
            return hit
        val = build()
        with self._lock:
            return cache.setdefault(key, val)

    def clear_caches(self):
        with self._lock:
            for c in (self._fcache, self._torcache, self._phicache, self._psicache):
                c.clear()


def _summands_of(algebra: FDAlgebra, t):
    if isinstance(t, str):
        if t == "DA":
            mods = dual_regular(algebra)
            return mods, [m.name for m in mods]
        if t == "A":
            mods = [projective_module(algebra, v) for v in range(algebra.num_vertices)]
            return mods, [m.name for m in mods]
        raise ValueError(f"unknown tilting designation {t!r}")
    if isinstance(t, Module):
        return [t], [t.name or "T"]
    mods = list(t)
    return mods, [m.name or f"T{i}" for i, m in enumerate(mods)]


def build_context(algebra: FDAlgebra, t, check_generation: bool = True) -> TiltingContext:
    """Verify the tilting hypotheses on t (a module, a list of summands, "DA" or "A")."""
    summands, names = _summands_of(algebra, t)
    if not summands or any(m.dim == 0 for m in summands):
        raise ValueError("tilting module and its summands must be nonzero")
    for m in summands:
        if m.algebra is not algebra:
            raise ValueError("summand lives over a different algebra")
    ctx = TiltingContext(algebra, summands, names)
    res = projective_resolution(ctx.T, depth=3)
    if not res.terminated or res.length > 2:
        raise ProjDimExceeded("projective dimension of T exceeds 2")
    ctx.proj_res_T = res
    ctx.pd_T = res.length
    ext = ext_dims_oracle(ctx, ctx.T)
    for i in (1, 2):
        if ext[i]:
            raise NotSelfOrthogonal(f"Ext^{i}(T, T) has dimension {ext[i]}")
    _build_B(ctx)
    _build_T_right(ctx)
    if check_generation:
        ctx.generation_status, ctx.generation_detail = generation_status(ctx)
    else:
        ctx.generation_status, ctx.generation_detail = "assumed", "not checked"
    return ctx


def _build_B(ctx: TiltingContext):
    A = ctx.A
    f = A.field
    r = len(ctx.summands)
    spaces = {}
    for p in range(r):
        for q in range(r):
            maps = hom_basis(ctx.summands[p], ctx.summands[q])
            if p == q:
                ident = ModuleMap.identity(ctx.summands[p])
                chosen = [ident]
                vecs = [_flat(ident)]
                dim = len(vecs[0])
                for h in maps:
                    v = _flat(h)
                    if not Subspace.span(f, dim, vecs).contains_vector(v):
                        chosen.append(h)
                        vecs.append(v)
                maps = chosen
            spaces[(p, q)] = HomSpace(ctx.summands[p], ctx.summands[q], maps)
    basis, maps, where = [], [], {}
    for p in range(r):
        where[(p, p, 0)] = len(basis)
        basis.append(BasisElement(f"1_{ctx.names[p]}", p, p))
        maps.append(spaces[(p, p)].basis[0])
    for p in range(r):
        for q in range(r):
            for m, h in enumerate(spaces[(p, q)].basis):
                if p == q and m == 0:
                    continue
                where[(p, q, m)] = len(basis)
                basis.append(BasisElement(f"h{p}{q}_{m}", q, p))
                maps.append(h)
    pq = {}
    for (p, q, m), k in where.items():
        pq[k] = (p, q)
    table = {}
    for i, hi in enumerate(maps):
        p, q = pq[i]
        for j, hj in enumerate(maps):
            q2, s = pq[j]
            if q2 != q:
                continue
            comp = hj @ hi  # i * j = j o i
            c = spaces[(p, s)].coords(comp)
            prod = tuple((where[(p, s, m)], x) for m, x in enumerate(c) if x)
            if prod:
                table[(i, j)] = prod
    B = FDAlgebra(f, ctx.names, basis, table, list(range(r)), kind="structure",
                  name=f"End({ctx.T.name})^op")
    ctx.B = B
    ctx.B_maps = maps
    ctx.hom_spaces = spaces


def _flatten_block(h: ModuleMap) -> Mat:
    return block_diag(h.source.field, list(h.blocks))


def _build_T_right(ctx: TiltingContext):
    """T as a module over B^op: vertex i carries T_i (flattened), b acts as b(t)."""
    B = ctx.B
    op = B.opposite()
    action = {}
    for k in B.generators:
        action[B.opposite_generator(k)] = _flatten_block(ctx.B_maps[k])
    ctx.T_right_B = Module(op, [m.dim for m in ctx.summands], action, name="T_B", check=True)


def b_action_check(ctx: TiltingContext) -> bool:
    """t.(f*g) = g(f(t)) on every basis pair (verified against composition)."""
    B = ctx.B
    for (i, j), prod in B.table.items():
        lhs = ctx.B_maps[j] @ ctx.B_maps[i]
        rhs = _combine([ctx.B_maps[k] for k, _ in prod], [c for _, c in prod], lhs.source, lhs.target)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def add_T_approximation(ctx: TiltingContext, y: Module):
    """The universal map y -> T' with T' in add T (all Hom(y, T_i) basis maps)."""
    targets, rows = [], []
    for i, t in enumerate(ctx.summands):
        for h in hom_basis(y, t):
            targets.append(t)
            rows.append(h)
    tgt, _, _ = direct_sum(targets, algebra=ctx.A) if targets else (None, None, None)
    if tgt is None:
        tgt = zero_module(ctx.A)
        return ModuleMap.zero(y, tgt)
    f = ctx.A.field
    blocks = [vstack(f, [h.blocks[v] for h in rows], y.dims[v]) for v in range(ctx.A.num_vertices)]
    return ModuleMap(y, tgt, blocks, check=False)


def in_add_T(ctx: TiltingContext, y: Module) -> bool:
    """y is in add T iff its universal add T-approximation is a split mono."""
    if y.dim == 0:
        return True
    u = add_T_approximation(ctx, y)
    if not u.is_injective():
        return False
    back = hom_basis(u.target, y)
    if not back:
        return False
    comps = [_flat(h @ u) for h in back]
    ident = _flat(ModuleMap.identity(y))
    mat = Mat.from_columns(y.field, comps, len(ident))
    return solve_vector(mat, ident) is not None


def generation_status(ctx: TiltingContext):
    """Try to build 0 -> A -> T^0 -> T^1 -> T^2 -> 0 by add T-approximations."""
    y = regular_module(ctx.A)
    for step in range(3):
        u = add_T_approximation(ctx, y)
        if not u.is_injective():
            if step == 0:
                return "failed", "A does not embed in a module of add T"
            return "assumed", f"approximation {step} is not injective"
        c, _ = cokernel(u)
        if step < 2 and c.dim == 0:
            return "verified", f"coresolution of length {step}"
        if step == 1:
            if in_add_T(ctx, c):
                return "verified", "coresolution of length 2"
            return "assumed", "second cosyzygy not in add T"
        y = c
    return "assumed", "search bound reached"


# ---------------------------------------------------------------------------
# Independent dimension oracles
# ---------------------------------------------------------------------------

def _hom_from_projectives_matrix(p_from: ProjectiveModule, p_to: ProjectiveModule, d: ModuleMap,
                                 x: Module) -> Mat:
    """Matrix of Hom(p_to, x) -> Hom(p_from, x), f |-> f o d, with Hom(Ae_s, x) = x_s."""
    f = x.field
    rdims = [x.dims[s] for s in p_from.summands]
    cdims = [x.dims[s] for s in p_to.summands]
    blocks = {}
    for a2 in range(len(p_from.summands)):
        i, g = p_from.generator(a2)
        img = d.apply(i, g)
        for a, k, c in p_to.element_coordinates(i, img):
            m = x.act(k).scale(c)
            key = (a2, a)
            blocks[key] = blocks[key] + m if key in blocks else m
    return block_matrix(f, blocks, rdims, cdims)


def ext_dims_oracle(ctx: TiltingContext, x: Module, top: int = 3) -> list:
    """dim Ext^i_A(T, x), i = 0..top, from Hom(P(T), x)."""
    res = ctx.proj_res_T
    c = res.complex
    mats = {}
    for j in range(0, top + 1):
        pj = c.module(j)
        pj1 = c.module(j + 1)
        if isinstance(pj1, ProjectiveModule) and isinstance(pj, ProjectiveModule) and pj1.summands:
            mats[j] = _hom_from_projectives_matrix(pj1, pj, c.d(j + 1), x)
        else:
            mats[j] = None
    out = []
    for j in range(0, top + 1):
        pj = c.module(j)
        n = sum(x.dims[s] for s in pj.summands) if isinstance(pj, ProjectiveModule) else 0
        rk_out = mats[j].rank() if mats[j] is not None and n else 0
        rk_in = mats[j - 1].rank() if j > 0 and mats.get(j - 1) is not None else 0
        out.append(n - rk_out - rk_in)
    return out


def tor_dims_oracle(ctx: TiltingContext, m: Module, top: int = TOR_DEPTH) -> list:
    """dim Tor_j^B(T, m), j = 0..top, from a resolution of T over B^op tensored with m."""
    res = projective_resolution(ctx.T_right_B, depth=top + 1)
    c = res.complex
    f = m.field
    mats = {}
    for j in range(1, top + 2):
        pj = c.module(j)
        pj1 = c.module(j - 1)
        if not (isinstance(pj, ProjectiveModule) and pj.summands):
            mats[j] = None
            continue
        d = c.d(j)
        rdims = [m.dims[s] for s in pj1.summands]
        cdims = [m.dims[s] for s in pj.summands]
        blocks = {}
        for a2 in range(len(pj.summands)):
            i, g = pj.generator(a2)
            img = d.apply(i, g)
            for a, k, cf in pj1.element_coordinates(i, img):
                mm = m.act(k).scale(cf)
                key = (a, a2)
                blocks[key] = blocks[key] + mm if key in blocks else mm
        mats[j] = block_matrix(f, blocks, rdims, cdims)
    out = []
    for j in range(0, top + 1):
        pj = c.module(j)
        n = sum(m.dims[s] for s in pj.summands) if isinstance(pj, ProjectiveModule) else 0
        rk_out = mats[j].rank() if j > 0 and mats.get(j) is not None else 0
        rk_in = mats[j + 1].rank() if mats.get(j + 1) is not None else 0
        out.append(n - rk_out - rk_in)
    return out


# ---------------------------------------------------------------------------
# F-model
# ---------------------------------------------------------------------------

def f_model(ctx: TiltingContext, x: Module) -> FModel:
    return ctx._memo(ctx._fcache, x.key(), lambda: _build_f_model(ctx, x))


def _build_f_model(ctx: TiltingContext, x: Module) -> FModel:
    B = ctx.B
    f = B.field
    inj, coaug = injective_resolution(x)
    degs = sorted(-n for n in inj.degrees)  # cohomological degrees present
    homs = {}
    mods = {}
    for j in degs:
        ij = inj.module(-j)
        for i, t in enumerate(ctx.summands):
            homs[(j, i)] = HomSpace(t, ij)
        action = {}
        for k in B.generators:
            b = B.basis[k]
            q, p = b.src, b.tgt
            h = ctx.B_maps[k]  # T_p -> T_q
            src, tgt = homs[(j, q)], homs[(j, p)]
            cols = [tgt.coords(g @ h) for g in src.basis]
            action[k] = Mat.from_columns(f, cols, tgt.dim) if cols else Mat.zeros(f, tgt.dim, 0)
        mods[-j] = Module(B, [homs[(j, i)].dim for i in range(len(ctx.summands))], action, check=False)
    diffs = {}
    for j in degs:
        if j + 1 not in degs:
            continue
        dI = inj.d(-j)
        blocks = []
        for i in range(len(ctx.summands)):
            src, tgt = homs[(j, i)], homs[(j + 1, i)]
            cols = [tgt.coords(dI @ g) for g in src.basis]
            blocks.append(Mat.from_columns(f, cols, tgt.dim) if cols else Mat.zeros(f, tgt.dim, 0))
        diffs[-j] = ModuleMap(mods[-j], mods[-j - 1], blocks, check=False)
    full = Complex(B, mods, diffs, check=False)
    tr = truncate_good(full, lo=-2)
    return FModel(x, inj, coaug, homs, full, tr.complex, tr.inclusion, ProjectiveReplacement(tr.complex))


def ext_module(ctx: TiltingContext, x: Module, i: int) -> Module:
    """F^i x = Ext^i_A(T, x) as a B-module."""
    if i < 0 or i > 2:
        return zero_module(ctx.B)
    return f_model(ctx, x).homology(i).module


def d_invariant(ctx: TiltingContext, x: Module) -> int:
    return ext_module(ctx, x, 1).dim


def ext_dims(ctx: TiltingContext, x: Module) -> tuple:
    return tuple(ext_module(ctx, x, i).dim for i in range(3))


# ---------------------------------------------------------------------------
# G-model
# ---------------------------------------------------------------------------

def tensor_T(ctx: TiltingContext, p: Module) -> Module:
    """T (x)_B p for p a sum of B e_i: the corresponding sum of summands of T."""
    if not isinstance(p, ProjectiveModule):
        if p.dim:
            raise TypeError("tensor_T expects a projective module built from generators")
        return direct_sum([], algebra=ctx.A)[0]
    return direct_sum([ctx.summands[s] for s in p.summands], algebra=ctx.A)[0]


def tensor_T_map(ctx: TiltingContext, g: ModuleMap, src: Optional[Module] = None,
                 tgt: Optional[Module] = None) -> ModuleMap:
    """T (x) g for g between sums of B e_i: the generator image read as maps of summands."""
    p, p2 = g.source, g.target
    A = ctx.A
    f = A.field
    src = src or tensor_T(ctx, p)
    tgt = tgt or tensor_T(ctx, p2)
    ps = p.summands if isinstance(p, ProjectiveModule) else ()
    qs = p2.summands if isinstance(p2, ProjectiveModule) else ()
    comp = {}
    for a, s in enumerate(ps):
        i, gen = p.generator(a)
        for a2, k, c in p2.element_coordinates(i, g.apply(i, gen)):
            h = ctx.B_maps[k].scale(c)
            comp[(a2, a)] = comp[(a2, a)] + h if (a2, a) in comp else h
    blocks = []
    for v in range(A.num_vertices):
        rd = [ctx.summands[s].dims[v] for s in qs]
        cd = [ctx.summands[s].dims[v] for s in ps]
        blocks.append(block_matrix(f, {key: h.blocks[v] for key, h in comp.items()}, rd, cd))
    return ModuleMap(src, tgt, blocks, check=False)


class GImage:
    """T (x)_B Q for a projective replacement Q, built lazily degree by degree."""

    def __init__(self, ctx: TiltingContext, repl: ProjectiveReplacement):
        self.ctx = ctx
        self.replacement = repl
        self._terms = {}
        self._diffs = {}
        self._complex_top = None
        self._complex = None

    def term(self, n: int) -> Module:
        t = self._terms.get(n)
        if t is None:
            t = tensor_T(self.ctx, self.replacement.term(n))
            self._terms[n] = t
        return t

    def diff(self, n: int) -> ModuleMap:
        d = self._diffs.get(n)
        if d is None:
            d = tensor_T_map(self.ctx, self.replacement.dq(n), self.term(n), self.term(n - 1))
            self._diffs[n] = d
        return d

    def complex(self, top: int) -> Complex:
        """The complex in degrees <= top (the replacement is extended to top + 1)."""
        if self._complex is None or self._complex_top != top:
            self.replacement.extend_to(top + 1)
            lo = self.replacement.lo
            mods = {n: self.term(n) for n in range(lo, top + 2)}
            diffs = {n: self.diff(n) for n in range(lo + 1, top + 2)}
            self._complex = Complex(self.ctx.A, mods, diffs, check=False)
            self._complex_top = top
        return self._complex


def g_model(ctx: TiltingContext, c: Complex, depth: int = TOR_DEPTH) -> Complex:
    """T (x)^L_B c on degrees up to c.hi + depth."""
    g = GImage(ctx, ProjectiveReplacement(c))
    return g.complex(c.hi + depth)


def _resolution_image(ctx: TiltingContext, m: Module, shift_to: int = 0) -> GImage:
    key = (m.key(), shift_to)

    def build():
        return GImage(ctx, ProjectiveReplacement(single(m, shift_to)))

    return ctx._memo(ctx._torcache, key, build)


def tor_module(ctx: TiltingContext, m: Module, j: int) -> Module:
    """G_j m = Tor_j^B(T, m) as an A-module."""
    if j < 0:
        return zero_module(ctx.A)
    g = _resolution_image(ctx, m)
    return homology(g.complex(max(j, TOR_DEPTH)), j).module


# ---------------------------------------------------------------------------
# Counit, phi, psi
# ---------------------------------------------------------------------------

def _x_image(ctx: TiltingContext, x: Module) -> GImage:
    fm = f_model(ctx, x)

    def build():
        return GImage(ctx, fm.replacement)

    return ctx._memo(ctx._phicache, ("G", x.key()), build)


def evaluation(ctx: TiltingContext, fm: FModel, g: GImage, n: int) -> ModuleMap:
    """T (x) Q_n -> I^{-n}: on summand a, the map q_n(generator a) : T_s -> I^{-n}."""
    A = ctx.A
    f = A.field
    j = -n
    repl = fm.replacement
    qn = repl.term(n)
    target = fm.injective.module(n)
    if not isinstance(qn, ProjectiveModule) or not qn.summands or target.dim == 0:
        return ModuleMap.zero(g.term(n), target)
    qmap = fm.to_full(n) @ repl.q(n)
    per_sum = []
    for a, s in enumerate(qn.summands):
        i, gen = qn.generator(a)
        coeffs = qmap.apply(i, gen)
        per_sum.append(fm.homs[(j, s)].element(coeffs))
    blocks = [hstack(f, [h.blocks[v] for h in per_sum], target.dims[v]) for v in range(A.num_vertices)]
    return ModuleMap(g.term(n), target, blocks, check=False)


def counit_chain_map(ctx: TiltingContext, x: Module, top: int = TOR_DEPTH) -> ChainMap:
    fm = f_model(ctx, x)
    g = _x_image(ctx, x)
    src = g.complex(top)
    maps = {n: evaluation(ctx, fm, g, n) for n in (0, -1, -2)}
    return ChainMap(src, fm.injective, maps, check=False)


@dataclass
class CounitData:
    homology: object       # H_0 datum of the G-image
    iso: ModuleMap         # H_0 -> x
    inverse: ModuleMap     # x -> H_0


def counit_identification(ctx: TiltingContext, x: Module) -> CounitData:
    """The evaluation-induced iso H_0(T (x) Q) -> x for Q replacing F x."""

    def build():
        A = ctx.A
        f = A.field
        fm = f_model(ctx, x)
        g = _x_image(ctx, x)
        h0 = homology(g.complex(1), 0)
        if x.dim == 0:
            z = ModuleMap.zero(h0.module, x)
            if h0.dim:
                raise IdentificationFailed("G F x has nonzero H_0 for x = 0")
            return CounitData(h0, z, ModuleMap.zero(x, h0.module))
        ev = evaluation(ctx, fm, g, 0)
        coaug = fm.coaugmentation
        blocks = []
        for v in range(A.num_vertices):
            if x.dims[v] == 0:
                blocks.append(Mat.zeros(f, 0, h0.dims[v]))
                continue
            coord = Coordinatizer(f, coaug.blocks[v].columns(), coaug.target.dims[v])
            cols = []
            for col in (ev.blocks[v] @ h0.section[v]).columns():
                try:
                    cols.append(coord.coords(col))
                except ValueError:
                    raise IdentificationFailed("evaluation does not land in x") from None
            blocks.append(Mat.from_columns(f, cols, x.dims[v]) if cols else Mat.zeros(f, x.dims[v], 0))
        iso = ModuleMap(h0.module, x, blocks, check=False)
        try:
            inv = invert_iso(iso)
        except NotIso:
            raise IdentificationFailed(
                f"counit on H_0 is not an isomorphism (rank {iso.rank()} vs dim {x.dim})") from None
        return CounitData(h0, iso, inv)

    return ctx._memo(ctx._phicache, ("counit", x.key()), build)


@dataclass
class PhiData:
    map: ModuleMap          # J^0_0 x -> x
    source_homology: object
    resolution_image: GImage


def phi(ctx: TiltingContext, x: Module) -> ModuleMap:
    return phi_data(ctx, x).map


def phi_data(ctx: TiltingContext, x: Module) -> PhiData:
    """phi: J^0_0 x -> x as H_0 of T (x) (H^0[0] -> F x), then the counit."""

    def build():
        fm = f_model(ctx, x)
        h = fm.homology(0)
        f0 = h.module
        incl = ModuleMap(f0, fm.complex.module(0), h.section, check=False)
        u = ChainMap(single(f0, 0), fm.complex, {0: incl}, check=False)
        g0 = _resolution_image(ctx, f0)
        gx = _x_image(ctx, x)
        lifted = lift_chain_map(u, g0.replacement, fm.replacement, upto=0)
        src_h = homology(g0.complex(TOR_DEPTH), 0)
        tgt = counit_identification(ctx, x)
        tmap = tensor_T_map(ctx, lifted.component(0), g0.term(0), gx.term(0))
        blocks = []
        for v in range(ctx.A.num_vertices):
            m = tgt.homology.project_matrix(v, tmap.blocks[v] @ src_h.section[v])
            blocks.append(m)
        on_h = ModuleMap(src_h.module, tgt.homology.module, blocks, check=False)
        return PhiData(tgt.iso @ on_h, src_h, g0)

    return ctx._memo(ctx._phicache, ("phi", x.key()), build)


def phi_direct(ctx: TiltingContext, x: Module) -> ModuleMap:
    """phi by direct evaluation t (x) f |-> f(t) on T (x)_B F^0 x (independent route)."""
    A = ctx.A
    f = A.field
    fm = f_model(ctx, x)
    h = fm.homology(0)
    g0 = _resolution_image(ctx, h.module)
    src_h = homology(g0.complex(TOR_DEPTH), 0)
    p0 = g0.replacement.term(0)
    q0 = g0.replacement.q(0)
    to_full = fm.to_full(0)
    coaug = fm.coaugmentation
    pieces = []
    for a, s in enumerate(p0.summands if isinstance(p0, ProjectiveModule) else ()):
        i, gen = p0.generator(a)
        elt = q0.apply(i, gen)                 # in F^0 x at vertex s
        rep = h.section[i].apply(elt)          # cycle in Hom(T_s, I^0)
        coeffs = to_full.apply(i, rep)
        hom_i0 = fm.homs[(0, s)].element(coeffs)  # T_s -> I^0
        blocks = []
        for v in range(A.num_vertices):
            if not x.dims[v]:
                blocks.append(Mat.zeros(f, 0, ctx.summands[s].dims[v]))
                continue
            coord = Coordinatizer(f, coaug.blocks[v].columns(), coaug.target.dims[v])
            cols = [coord.coords(c) for c in hom_i0.blocks[v].columns()]
            blocks.append(Mat.from_columns(f, cols, x.dims[v]) if cols
                          else Mat.zeros(f, x.dims[v], 0))
        pieces.append(blocks)
    blocks = []
    for v in range(A.num_vertices):
        ev = hstack(f, [pc[v] for pc in pieces], x.dims[v]) if pieces else Mat.zeros(f, x.dims[v], 0)
        blocks.append(ev @ src_h.section[v])
    return ModuleMap(src_h.module, x, blocks, check=False)


@dataclass
class PsiData:
    map: ModuleMap           # x -> J^2_2 x
    target_homology: object


def psi(ctx: TiltingContext, x: Module) -> ModuleMap:
    return psi_data(ctx, x).map


def psi_data(ctx: TiltingContext, x: Module) -> PsiData:
    """psi: x -> J^2_2 x as H_0 of T (x) (F x -> H^2[-2]), after the inverse counit."""

    def build():
        fm = f_model(ctx, x)
        h = fm.homology(2)
        f2 = h.module
        c = fm.complex
        proj_blocks = [h.project_matrix(v, _identity(c.module(-2).dims[v], ctx.B.field))
                       for v in range(ctx.B.num_vertices)]
        proj = ModuleMap(c.module(-2), f2, proj_blocks, check=False)
        u = ChainMap(c, single(f2, -2), {-2: proj}, check=False)
        g2 = _resolution_image(ctx, f2, shift_to=-2)
        gx = _x_image(ctx, x)
        lifted = lift_chain_map(u, fm.replacement, g2.replacement, upto=0)
        tgt_h = homology(g2.complex(TOR_DEPTH - 2), 0)
        cu = counit_identification(ctx, x)
        tmap = tensor_T_map(ctx, lifted.component(0), gx.term(0), g2.term(0))
        blocks = []
        for v in range(ctx.A.num_vertices):
            blocks.append(tgt_h.project_matrix(v, tmap.blocks[v] @ cu.homology.section[v]))
        on_h = ModuleMap(cu.homology.module, tgt_h.module, blocks, check=False)
        return PsiData(on_h @ cu.inverse, tgt_h)

    return ctx._memo(ctx._psicache, ("psi", x.key()), build)


def _identity(n, f):
    return Mat.identity(f, n)


# ---------------------------------------------------------------------------
# Five-term sequence and J-table
# ---------------------------------------------------------------------------

@dataclass
class FundamentalSequence:
    x: Module
    phi: ModuleMap
    psi: ModuleMap
    J12: Module
    J00: Module
    J22: Module
    J10: Module
    J11: Module
    ker_phi: Subobject
    im_phi: Subobject
    ker_psi: Subobject
    coker_psi: Module
    middle: Module          # ker psi / im phi
    middle_lift: list       # per-vertex representatives in x
    exact: dict = dc_field(default_factory=dict)

    @property
    def middle_dim(self) -> int:
        return self.middle.dim


def fundamental_sequence(ctx: TiltingContext, x: Module, strict: bool = True) -> FundamentalSequence:
    """J^1_2 -> J^0_0 -> x -> J^2_2 -> J^1_0 with middle homology J^1_1.

    The outer terms are computed independently as Tor of Ext and compared with
    ker phi and coker psi up to isomorphism.
    """
    ph = phi(ctx, x)
    ps = psi(ctx, x)
    if not (ps @ ph).is_zero():
        raise ExactnessViolated("psi o phi is not zero")
    f1 = ext_module(ctx, x, 1)
    j12 = tor_module(ctx, f1, 2)
    j10 = tor_module(ctx, f1, 0)
    j11 = tor_module(ctx, f1, 1)
    kp = kernel_subobject(ph)
    ip = image_subobject(ph)
    ks = kernel_subobject(ps)
    cok, _ = cokernel(ps)
    sq = SubQuotient(ks, ip)
    exact = {
        "J12": find_isomorphism(kp.module, j12) is not None,
        "J00": True,
        "J22": True,
        "J10": find_isomorphism(cok, j10) is not None,
        "middle": find_isomorphism(sq.module, j11) is not None,
    }
    fs = FundamentalSequence(x, ph, ps, j12, ph.source, ps.target, j10, j11, kp, ip, ks, cok,
                             sq.module, sq.lift, exact)
    if strict and not all(exact.values()):
        bad = [k for k, v in exact.items() if not v]
        raise ExactnessViolated(f"fundamental sequence fails at {bad}")
    return fs


def j_table(ctx: TiltingContext, x: Module, guard: int = TOR_DEPTH) -> dict:
    """J^i_j x = Tor_j(T, Ext^i(T, x)) for i in 0..2 and j in 0..guard."""
    table = {}
    for i in range(3):
        fi = ext_module(ctx, x, i)
        for j in range(guard + 1):
            table[(i, j)] = tor_module(ctx, fi, j)
    return table


J_VANISHING = [(i, j) for i in range(3) for j in range(3, TOR_DEPTH + 1)] + [(0, 1), (0, 2), (2, 0), (2, 1)]


def j_table_violations(table: dict) -> list:
    return [(i, j) for (i, j) in J_VANISHING if (i, j) in table and table[(i, j)].dim]


def decomposition_audit(ctx: TiltingContext, x: Module) -> Optional[bool]:
    """For F^1 x = 0: x = im phi (+) a complement mapped isomorphically by psi.

    Returns None when F^1 x != 0.
    """
    if ext_module(ctx, x, 1).dim:
        return None
    ph, ps = phi(ctx, x), psi(ctx, x)
    if not ph.is_injective() or not ps.is_surjective():
        return False
    j22 = ps.target
    if j22.dim == 0:
        return ph.is_iso()
    homs = hom_basis(j22, x)
    comps = [_flat(ps @ h) for h in homs]
    ident = _flat(ModuleMap.identity(j22))
    if not comps:
        return False
    sol = solve_vector(Mat.from_columns(x.field, comps, len(ident)), ident)
    if sol is None:
        return False
    sigma = _combine(homs, sol, j22, x)
    f = x.field
    blocks = [hstack(f, [ph.blocks[v], sigma.blocks[v]], x.dims[v]) for v in range(ctx.A.num_vertices)]
    s, _, _ = direct_sum([ph.source, j22], algebra=ctx.A)
    return ModuleMap(s, x, blocks, check=False).is_iso()


# ---------------------------------------------------------------------------
# K_0 / K_2 witness audit
# ---------------------------------------------------------------------------

@dataclass
class WitnessAudit:
    kind: str
    ok: bool
    detail: dict


def _iso_b(m: Module, n: Module) -> bool:
    return find_isomorphism(m, n) is not None


def k0_witness_audit(ctx: TiltingContext, x: Module) -> Optional[WitnessAudit]:
    """For phi surjective: 0 -> ker phi -> J^0_0 -> x -> 0 with J_0 in F_0, J_2 in F_2."""
    ph = phi(ctx, x)
    if not ph.is_surjective():
        return None
    j0 = ph.source
    j2 = kernel_subobject(ph).module
    d = {
        "J0_in_F0": ext_dims(ctx, j0)[1:] == (0, 0),
        "J2_in_F2": ext_dims(ctx, j2)[:2] == (0, 0),
        "F0x~F0J0": _iso_b(ext_module(ctx, x, 0), ext_module(ctx, j0, 0)),
        "F1x~F2J2": _iso_b(ext_module(ctx, x, 1), ext_module(ctx, j2, 2)),
        "F2x=0": ext_module(ctx, x, 2).dim == 0,
    }
    return WitnessAudit("K0", all(d.values()), d)


def k2_witness_audit(ctx: TiltingContext, x: Module) -> Optional[WitnessAudit]:
    """For F^0 x = 0, J^1_1 x = 0: 0 -> x -> J^2_2 -> coker psi -> 0 with J^2_2 in F_2, coker in F_0."""
    if ext_module(ctx, x, 0).dim:
        return None
    ps = psi(ctx, x)
    if not ps.is_injective():
        return None
    j2 = ps.target
    j0, _ = cokernel(ps)
    d = {
        "J2_in_F2": ext_dims(ctx, j2)[:2] == (0, 0),
        "J0_in_F0": ext_dims(ctx, j0)[1:] == (0, 0),
        "F2x~F2J2": _iso_b(ext_module(ctx, x, 2), ext_module(ctx, j2, 2)),
        "F1x~F0J0": _iso_b(ext_module(ctx, x, 1), ext_module(ctx, j0, 0)),
        "F0x=0": True,
    }
    return WitnessAudit("K2", all(d.values()), d)
