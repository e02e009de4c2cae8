"""Bounded complexes of modules, chain maps and homology, plus projective
and injective resolutions and projective replacement of a complex.

Indexing is homological throughout: ``d(n): C_n -> C_{n-1}``.  A
cohomological complex with terms in degrees 0, 1, 2 is stored at 0, -1, -2.
"""
from __future__ import annotations

from collections import namedtuple
from typing import Optional

from .exactlin import Mat, Subspace, block_matrix, solve_vector
from .quivalg.module import (
    Module,
    ModuleMap,
    ProjectiveModule,
    Subobject,
    ValidationError,
    direct_sum,
    dual,
    dual_map,
    image_subobject,
    kernel_subobject,
    map_from_generators,
    quotient,
    top_generators,
    zero_module,
)


class ResolutionTooLong(RuntimeError):
    pass


class LiftFailed(RuntimeError):
    pass


class Complex:
    """A bounded complex; degrees outside the stored range hold zero modules."""

    def __init__(self, algebra, modules: dict, diffs: Optional[dict] = None, check: bool = True):
        self.algebra = algebra
        self._mods = {n: m for n, m in modules.items()}
        self._diffs = dict(diffs or {})
        self._zero = zero_module(algebra)
        for n, d in self._diffs.items():
            if d.source.dims != self.module(n).dims or d.target.dims != self.module(n - 1).dims:
                raise ValidationError(f"differential d_{n} has the wrong shape")
        if check:
            self.validate()

    @property
    def degrees(self) -> list:
        return sorted(n for n, m in self._mods.items() if m.dim)

    @property
    def lo(self) -> int:
        ds = self.degrees
        return ds[0] if ds else 0

    @property
    def hi(self) -> int:
        ds = self.degrees
        return ds[-1] if ds else 0

    def module(self, n: int) -> Module:
        return self._mods.get(n, self._zero)

    def d(self, n: int) -> ModuleMap:
        m = self._diffs.get(n)
        if m is None:
            m = ModuleMap.zero(self.module(n), self.module(n - 1))
        return m

    def dims(self) -> dict:
        return {n: self._mods[n].dims for n in sorted(self._mods)}

    def __repr__(self):
        body = ", ".join(f"{n}: {m.dims}" for n, m in sorted(self._mods.items()))
        return f"Complex({body})"

    def validate(self):
        for n in self._diffs:
            if not (self.d(n - 1) @ self.d(n)).is_zero():
                raise ValidationError(f"d_{n - 1} d_{n} is not zero")
        for d in self._diffs.values():
            d.validate()


def single(m: Module, n: int = 0) -> Complex:
    """m placed in degree n."""
    return Complex(m.algebra, {n: m}, check=False)


class ChainMap:
    def __init__(self, source: Complex, target: Complex, maps: dict, check: bool = True):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            self.validate()

    def component(self, n: int) -> ModuleMap:
        m = self.maps.get(n)
        if m is None:
            m = ModuleMap.zero(self.source.module(n), self.target.module(n))
        return m

    def validate(self, degrees=None):
        if degrees is None:
            ds = set(self.source.degrees) | set(self.target.degrees)
            degrees = sorted(ds | {n + 1 for n in ds})
        for n in degrees:
            lhs = self.component(n - 1) @ self.source.d(n)
            rhs = self.target.d(n) @ self.component(n)
            if lhs != rhs:
                raise ValidationError(f"chain map does not commute in degree {n}")

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        ds = set(self.maps) & set(other.maps)
        return ChainMap(other.source, self.target,
                        {n: self.maps[n] @ other.maps[n] for n in ds}, check=False)

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        return cls(c, c, {n: ModuleMap.identity(c.module(n)) for n in c.degrees}, check=False)


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------

class SubQuotient:
    """big/small for subobjects small <= big of one ambient module.

    ``lift`` gives, per vertex, a matrix sending quotient coordinates to
    representatives in the ambient module; ``project`` maps a member of big
    to its class.  ``lift`` is only linear, not a module map.
    """

    def __init__(self, big: Subobject, small: Subobject):
        if not big.contains(small):
            raise ValidationError("subquotient needs small <= big")
        f = big.ambient.field
        self.big = big
        self.small = small
        inner = []
        for v, (bs, ss) in enumerate(zip(big.spaces, small.spaces)):
            inner.append(Subspace.span(f, bs.dim, [bs.coordinates(r) for r in ss.basis.rows]))
        self.module, self._proj = quotient(big.module, Subobject(big.module, inner))
        incl = big.inclusion.blocks
        self.lift = [incl[v].select(cols=self._proj.complements[v]) for v in range(len(incl))]

    def project(self, v: int, vec) -> list:
        sp = self.big.spaces[v]
        if not sp.contains_vector(vec):
            raise ValueError("vector is not in the numerator subobject")
        return self._proj.blocks[v].apply(sp.coordinates(vec))

    def project_matrix(self, v: int, m: Mat) -> Mat:
        f = m.field
        cols = [self.project(v, c) for c in m.columns()]
        return Mat.from_columns(f, cols, self.module.dims[v]) if cols else Mat.zeros(f, self.module.dims[v], 0)


class HomologyDatum:
    """H_n of a complex with an explicit cycle section and class projection."""

    def __init__(self, complex_: Complex, degree: int):
        self.complex = complex_
        self.degree = degree
        self.cycles = kernel_subobject(complex_.d(degree))
        self.boundaries = image_subobject(complex_.d(degree + 1))
        self._sq = SubQuotient(self.cycles, self.boundaries)
        self.module = self._sq.module

    @property
    def section(self) -> list:
        return self._sq.lift

    def project(self, v: int, vec) -> list:
        return self._sq.project(v, vec)

    def project_matrix(self, v: int, m: Mat) -> Mat:
        return self._sq.project_matrix(v, m)

    @property
    def dims(self):
        return self.module.dims

    @property
    def dim(self) -> int:
        return self.module.dim


def homology(c: Complex, n: int) -> HomologyDatum:
    return HomologyDatum(c, n)


def homology_dims(c: Complex, degrees) -> dict:
    return {n: homology(c, n).dims for n in degrees}


def induced_on_homology(f: ChainMap, n: int, hs: Optional[HomologyDatum] = None,
                        ht: Optional[HomologyDatum] = None) -> ModuleMap:
    hs = hs or homology(f.source, n)
    ht = ht or homology(f.target, n)
    comp = f.component(n)
    blocks = [ht.project_matrix(v, comp.blocks[v] @ hs.section[v]) for v in range(len(comp.blocks))]
    return ModuleMap(hs.module, ht.module, blocks, check=False)


# ---------------------------------------------------------------------------
# Truncation, shift, cone
# ---------------------------------------------------------------------------

Truncation = namedtuple("Truncation", "complex inclusion projection")


def truncate_good(c: Complex, lo: Optional[int] = None, hi: Optional[int] = None) -> Truncation:
    """Good truncation keeping homology in degrees lo..hi.

    Above ``hi`` the complex is cut and C_hi replaced by C_hi / B_hi (with the
    projection ``c -> t``); below ``lo`` it is cut and C_lo replaced by the
    cycles Z_lo (with the inclusion ``t -> c``).  When both are given the
    inclusion lands in the ``hi``-truncation.
    """
    proj = None
    cur = c
    if hi is not None and any(n > hi for n in c.degrees):
        bd = image_subobject(c.d(hi + 1))
        qm, p = quotient(c.module(hi), bd)
        mods = {n: c.module(n) for n in c.degrees if n < hi}
        mods[hi] = qm
        diffs = {n: c.d(n) for n in c.degrees if n < hi}
        diffs[hi] = ModuleMap(qm, c.module(hi - 1),
                              [c.d(hi).blocks[v].select(cols=p.complements[v]) for v in range(len(p.blocks))],
                              check=False)
        cur = Complex(c.algebra, mods, diffs, check=False)
        maps = {n: ModuleMap.identity(c.module(n)) for n in c.degrees if n < hi}
        maps[hi] = p
        proj = ChainMap(c, cur, maps, check=False)
    inc = None
    if lo is not None and any(n < lo for n in cur.degrees):
        z = kernel_subobject(cur.d(lo))
        mods = {n: cur.module(n) for n in cur.degrees if n > lo}
        mods[lo] = z.module
        diffs = {n: cur.d(n) for n in cur.degrees if n > lo + 1}
        # d_{lo+1} lands in the cycles
        dn = cur.d(lo + 1)
        blocks = []
        for v, sp in enumerate(z.spaces):
            cols = [sp.coordinates(col) for col in dn.blocks[v].columns()]
            blocks.append(Mat.from_columns(c.algebra.field, cols, sp.dim) if cols
                          else Mat.zeros(c.algebra.field, sp.dim, 0))
        diffs[lo + 1] = ModuleMap(cur.module(lo + 1), z.module, blocks, check=False)
        t = Complex(c.algebra, mods, diffs, check=False)
        maps = {n: ModuleMap.identity(cur.module(n)) for n in cur.degrees if n > lo}
        maps[lo] = z.inclusion
        inc = ChainMap(t, cur, maps, check=False)
        cur = t
    return Truncation(cur, inc, proj)


def shift(c: Complex, k: int) -> Complex:
    """C[k] with (C[k])_n = C_{n-k} and differential (-1)^k d."""
    sign = -1 if k % 2 else 1
    mods = {n + k: c.module(n) for n in c.degrees}
    diffs = {n + k: c.d(n).scale(sign) for n in c.degrees if c.module(n - 1).dim}
    return Complex(c.algebra, mods, diffs, check=False)


def cone(f: ChainMap) -> Complex:
    """cone_n = X_{n-1} + Y_n with d(x, y) = (-d x, f x + d y)."""
    x, y = f.source, f.target
    degs = set(n + 1 for n in x.degrees) | set(y.degrees)
    fld = x.algebra.field
    sums = {}
    for n in sorted(degs | {n + 1 for n in degs}):
        sums[n] = direct_sum([x.module(n - 1), y.module(n)], algebra=x.algebra)[0]
    diffs = {}
    for n in sorted(sums):
        if n - 1 not in sums:
            continue
        blocks = []
        for v in range(x.algebra.num_vertices):
            rd = [x.module(n - 2).dims[v], y.module(n - 1).dims[v]]
            cd = [x.module(n - 1).dims[v], y.module(n).dims[v]]
            blocks.append(block_matrix(fld, {
                (0, 0): x.d(n - 1).blocks[v].scale(-1),
                (1, 0): f.component(n - 1).blocks[v],
                (1, 1): y.d(n).blocks[v],
            }, rd, cd))
        diffs[n] = ModuleMap(sums[n], sums[n - 1], blocks, check=False)
    return Complex(x.algebra, sums, diffs, check=False)


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

class Resolution:
    """P_depth -> ... -> P_0 -> m with its augmentation; ``length`` is the pd when known."""

    def __init__(self, complex_, augmentation, length, terminated):
        self.complex = complex_
        self.augmentation = augmentation
        self.length = length
        self.terminated = terminated

    def __repr__(self):
        dims = [self.complex.module(n).dims for n in range(self.length + 1 if self.length is not None else 0)]
        return f"Resolution(length={self.length}, terms={dims})"


def projective_resolution(m: Module, depth: int = 6) -> Resolution:
    """Projective resolution by projective covers (minimal over a basic algebra)."""
    alg = m.algebra
    mods, diffs = {}, {}
    if m.dim == 0:
        return Resolution(Complex(alg, {}, check=False), ModuleMap.zero(zero_module(alg), m), -1, True)
    p0, eps = _cover(m)
    mods[0] = p0
    prev_map = eps
    length = None
    for n in range(1, depth + 1):
        k = kernel_subobject(prev_map)
        if k.dim == 0:
            length = n - 1
            break
        p, e = _cover(k.module)
        dn = k.inclusion @ e
        mods[n] = p
        diffs[n] = dn
        prev_map = dn
    else:
        if kernel_subobject(prev_map).dim == 0:
            length = depth
    c = Complex(alg, mods, diffs, check=False)
    return Resolution(c, eps, length, length is not None)


free_resolution = projective_resolution


def _cover(m: Module):
    gens = top_generators(m)
    p = ProjectiveModule(m.algebra, [v for v, _ in gens])
    return p, map_from_generators(p, m, [vec for _, vec in gens])


def projective_dimension(m: Module, bound: int = 8) -> int:
    r = projective_resolution(m, bound)
    if not r.terminated:
        raise ResolutionTooLong(f"no projective resolution of length <= {bound}")
    return max(r.length, 0) if m.dim else -1


def injective_resolution(x: Module, depth: int = 6):
    """(I, coaugmentation x -> I^0) with I^j stored in homological degree -j.

    Built as the dual of a projective resolution of D(x) over the opposite algebra.
    """
    alg = x.algebra
    r = projective_resolution(dual(x), depth)
    if not r.terminated:
        raise ResolutionTooLong(f"injective resolution longer than {depth}")
    mods, diffs = {}, {}
    pc = r.complex
    for n in range(0, (r.length or 0) + 1):
        if pc.module(n).dim:
            mods[-n] = _as_module_over(dual(pc.module(n)), alg)
    for n in range(1, (r.length or 0) + 1):
        dm = dual_map(pc.d(n))
        diffs[-n + 1] = ModuleMap(mods[-n + 1], mods[-n], dm.blocks, check=False)
    c = Complex(alg, mods, diffs, check=False)
    if x.dim == 0:
        return c, ModuleMap.zero(x, zero_module(alg))
    aug = ModuleMap(x, mods[0], dual_map(r.augmentation).blocks, check=False)
    return c, aug


def _as_module_over(m: Module, alg) -> Module:
    if m.algebra is not alg:
        raise ValidationError("dual did not return to the original algebra")
    return m


# ---------------------------------------------------------------------------
# Projective replacement of a bounded complex
# ---------------------------------------------------------------------------

class ProjectiveReplacement:
    """A complex Q of projectives with a quasi-isomorphism q: Q -> C.

    Built upward from the lowest degree of C: at degree n the generators of
    Q_n cover the degree-n homology of cone(q) computed so far, i.e. the
    module {(x, y) in Q_{n-1} + C_n : dx = 0, q x = d y} modulo (0, d C_{n+1}).
    After ``extend_to(N)`` the map q induces isomorphisms H_k(Q) -> H_k(C)
    for k < N and a surjection at k = N.
    """

    def __init__(self, c: Complex):
        self.target = c
        self.algebra = c.algebra
        self.lo = c.lo
        self.top = self.lo - 1
        self._q = {}
        self._dq = {}
        self._terms = {}

    def term(self, n: int) -> Module:
        t = self._terms.get(n)
        if t is None:
            t = ProjectiveModule(self.algebra, []) if n <= self.top else zero_module(self.algebra)
        return t

    def dq(self, n: int) -> ModuleMap:
        m = self._dq.get(n)
        return m if m is not None else ModuleMap.zero(self.term(n), self.term(n - 1))

    def q(self, n: int) -> ModuleMap:
        m = self._q.get(n)
        return m if m is not None else ModuleMap.zero(self.term(n), self.target.module(n))

    def extend_to(self, n_max: int) -> "ProjectiveReplacement":
        c = self.target
        alg = self.algebra
        fld = alg.field
        while self.top < n_max:
            n = self.top + 1
            qprev = self.term(n - 1)
            cn = c.module(n)
            s, _, _ = direct_sum([qprev, cn], algebra=alg)
            s2, _, _ = direct_sum([self.term(n - 2), c.module(n - 1)], algebra=alg)
            blocks = []
            for v in range(alg.num_vertices):
                blocks.append(block_matrix(fld, {
                    (0, 0): self.dq(n - 1).blocks[v],
                    (1, 0): self.q(n - 1).blocks[v],
                    (1, 1): c.d(n).blocks[v].scale(-1),
                }, [self.term(n - 2).dims[v], c.module(n - 1).dims[v]], [qprev.dims[v], cn.dims[v]]))
            phi = ModuleMap(s, s2, blocks, check=False)
            zc = kernel_subobject(phi)
            cn1 = c.module(n + 1)
            bblocks = []
            for v in range(alg.num_vertices):
                bblocks.append(block_matrix(fld, {(1, 0): c.d(n + 1).blocks[v]},
                                            [qprev.dims[v], cn.dims[v]], [cn1.dims[v]]))
            bd = image_subobject(ModuleMap(cn1, s, bblocks, check=False))
            sq = SubQuotient(zc, bd)
            gens = top_generators(sq.module)
            xs, ys, verts = [], [], []
            for v, vec in gens:
                full = sq.lift[v].apply(vec)
                k = qprev.dims[v]
                xs.append(full[:k])
                ys.append(full[k:])
                verts.append(v)
            p = ProjectiveModule(alg, verts)
            self._terms[n] = p
            self._dq[n] = map_from_generators(p, qprev, xs)
            self._q[n] = map_from_generators(p, cn, ys)
            self.top = n
        return self

    @property
    def complex(self) -> Complex:
        mods = {n: self._terms[n] for n in range(self.lo, self.top + 1)}
        diffs = {n: self._dq[n] for n in range(self.lo + 1, self.top + 1)}
        return Complex(self.algebra, mods, diffs, check=False)

    @property
    def chain_map(self) -> ChainMap:
        return ChainMap(self.complex, self.target,
                        {n: self._q[n] for n in range(self.lo, self.top + 1)}, check=False)


def free_replacement(c: Complex, depth: int = 4) -> ProjectiveReplacement:
    return ProjectiveReplacement(c).extend_to(c.hi + depth)


def projective_replacement(c: Complex, top: int) -> ProjectiveReplacement:
    return ProjectiveReplacement(c).extend_to(top)


class LiftedMap:
    """A chain map between replacements lifting u, with its homotopy."""

    def __init__(self, source: ProjectiveReplacement, target: ProjectiveReplacement, maps, homotopy):
        self.source = source
        self.target = target
        self.maps = maps
        self.homotopy = homotopy

    def component(self, n: int) -> ModuleMap:
        m = self.maps.get(n)
        return m if m is not None else ModuleMap.zero(self.source.term(n), self.target.term(n))


def lift_chain_map(u: ChainMap, src: ProjectiveReplacement, tgt: ProjectiveReplacement,
                   upto: int) -> LiftedMap:
    """Lift u: C -> C' to Q -> Q' in degrees <= upto (q' ~u = u q up to homotopy).

    On a generator g of Q_n we solve for x in Q'_n and y in C'_{n+1} with
    d'x = ~u(dg) and q'x - dy = u q g + h(dg), then set ~u(g) = x, h(g) = y.
    """
    src.extend_to(upto)
    tgt.extend_to(upto + 1)
    alg = src.algebra
    fld = alg.field
    c2 = tgt.target
    maps, hom = {}, {}
    for n in range(src.lo, upto + 1):
        qn = src.term(n)
        qn2 = tgt.term(n)
        cn1 = c2.module(n + 1)
        if not isinstance(qn, ProjectiveModule) or not qn.summands:
            continue
        dg = src.dq(n)
        prev_u = maps.get(n - 1)
        prev_h = hom.get(n - 1)
        xs, ys = [], []
        for a in range(len(qn.summands)):
            i, gvec = qn.generator(a)
            dvec = dg.apply(i, gvec)
            if prev_u is not None:
                r1 = prev_u.apply(i, dvec)
            else:
                r1 = [fld.zero] * tgt.term(n - 1).dims[i]
            r2 = u.component(n).apply(i, src.q(n).apply(i, gvec))
            if prev_h is not None:
                extra = prev_h.apply(i, dvec)
                r2 = [a_ + b_ for a_, b_ in zip(r2, extra)]
                if fld.p:
                    r2 = [z % fld.p for z in r2]
            mat = block_matrix(fld, {
                (0, 0): tgt.dq(n).blocks[i],
                (1, 0): tgt.q(n).blocks[i],
                (1, 1): c2.d(n + 1).blocks[i].scale(-1),
            }, [tgt.term(n - 1).dims[i], c2.module(n).dims[i]], [qn2.dims[i], cn1.dims[i]])
            sol = solve_vector(mat, r1 + r2)
            if sol is None:
                raise LiftFailed(f"no lift in degree {n}")
            xs.append(sol[:qn2.dims[i]])
            ys.append(sol[qn2.dims[i]:])
        maps[n] = map_from_generators(qn, qn2, xs)
        hom[n] = map_from_generators(qn, cn1, ys)
    return LiftedMap(src, tgt, maps, hom)
