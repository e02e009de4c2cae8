"""Modules over ``FDAlgebra``: graded vector spaces with generator actions,
module maps, canonical subobjects and the standard constructions on them."""
from __future__ import annotations

import random
from typing import Optional, Sequence

from ..exactlin import (
    Field,
    Mat,
    Subspace,
    _kernel_vectors,
    block_diag,
    block_matrix,
    kernel_vectors,
    rref_rows,
)
from .algebra import AlgebraMismatch, FDAlgebra


class ValidationError(ValueError):
    pass


class NotIso(ValueError):
    pass


def _same_algebra(*mods):
    alg = mods[0].algebra
    for m in mods[1:]:
        if m.algebra is not alg:
            raise AlgebraMismatch("modules live over different algebras")
    return alg


class Module:
    """A module given by per-vertex dimensions and one matrix per generator.

    For a path algebra the generators are the arrows; for a structure-constant
    algebra they are the non-idempotent basis elements.  The matrix of a
    generator of block (src, tgt) has shape ``dims[tgt] x dims[src]``.
    """

    def __init__(self, algebra: FDAlgebra, dims, action, name: str = "", check: bool = True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        self.action = dict(action)
        self.name = name
        self._act = {}
        self._key = None
        field = algebra.field
        if len(self.dims) != algebra.num_vertices:
            raise ValidationError("dimension vector has the wrong length")
        for k in algebra.generators:
            b = algebra.basis[k]
            shape = (self.dims[b.tgt], self.dims[b.src])
            m = self.action.get(k)
            if m is None:
                self.action[k] = Mat.zeros(field, *shape)
            elif m.shape != shape:
                raise ValidationError(f"matrix for {b.name} has shape {m.shape}, expected {shape}")
        if check:
            self.validate()

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"Module({label}dims={self.dims})"

    def key(self):
        if self._key is None:
            self._key = (id(self.algebra), self.dims,
                         tuple(self.action[k] for k in self.algebra.generators))
        return self._key

    def same_as(self, other: "Module") -> bool:
        return self.algebra is other.algebra and self.key() == other.key()

    def is_zero(self) -> bool:
        return self.dim == 0

    # -- action ---------------------------------------------------------
    def act(self, k: int) -> Mat:
        """Matrix of the basis element k (block src -> tgt)."""
        m = self._act.get(k)
        if m is not None:
            return m
        alg = self.algebra
        b = alg.basis[k]
        if k in self.action:
            m = self.action[k]
        elif k in alg.idempotents:
            m = Mat.identity(self.field, self.dims[b.src])
        elif alg.kind == "path":
            m = self.path_matrix(b.path)
        else:
            raise KeyError(k)
        self._act[k] = m
        return m

    def path_matrix(self, arrows: Sequence[int]) -> Mat:
        alg = self.algebra
        gens = alg.generators
        m = None
        for a in arrows:
            g = self.action[gens[a]]
            m = g if m is None else g @ m
        return m

    def act_vector(self, vec: Sequence, src: int, tgt: int) -> Mat:
        """Matrix of an algebra element (coefficient vector) restricted to one block."""
        f = self.field
        acc = Mat.zeros(f, self.dims[tgt], self.dims[src])
        for k in self.algebra.block(src, tgt):
            c = vec[k]
            if c:
                acc = acc + self.act(k).scale(c)
        return acc

    def validate(self):
        alg = self.algebra
        f = self.field
        if alg.kind == "path":
            q = alg.quiver
            aidx = {a.name: i for i, a in enumerate(q.arrows)}
            for n, rel in enumerate(alg.relations):
                acc = None
                for c, p in rel.terms:
                    idx = tuple(aidx[a] for a in p)
                    m = self.path_matrix(idx).scale(c)
                    acc = m if acc is None else acc + m
                if acc is not None and not acc.is_zero():
                    text = " + ".join(f"{f.format(f(c))}*{'.'.join(p)}" for c, p in rel.terms)
                    raise ValidationError(f"relation {n} ({text}) is not satisfied")
        else:
            for (i, j), prod in alg.table.items():
                bi, bj = alg.basis[i], alg.basis[j]
                lhs = self.act(i) @ self.act(j)
                rhs = Mat.zeros(f, self.dims[bi.tgt], self.dims[bj.src])
                for k, c in prod:
                    rhs = rhs + self.act(k).scale(c)
                if lhs != rhs:
                    raise ValidationError(f"action is not multiplicative on ({bi.name}, {bj.name})")
            for i in range(alg.dim):
                for j in range(alg.dim):
                    if (i, j) in alg.table:
                        continue
                    bi, bj = alg.basis[i], alg.basis[j]
                    if bi.src == bj.tgt and not (self.act(i) @ self.act(j)).is_zero():
                        raise ValidationError(f"product ({bi.name}, {bj.name}) should act as zero")

    def zero_vector(self, v: int) -> list:
        return [self.field.zero] * self.dims[v]


class ModuleMap:
    """A module homomorphism given by one matrix per vertex."""

    def __init__(self, source: Module, target: Module, blocks, check: bool = True):
        _same_algebra(source, target)
        self.source = source
        self.target = target
        self.blocks = tuple(blocks)
        for v, m in enumerate(self.blocks):
            if m.shape != (target.dims[v], source.dims[v]):
                raise ValidationError(f"block at vertex {v} has shape {m.shape}")
        if check:
            self.validate()

    @property
    def algebra(self):
        return self.source.algebra

    def __repr__(self):
        return f"ModuleMap({self.source.dims} -> {self.target.dims})"

    def validate(self):
        alg = self.algebra
        for k in alg.generators:
            b = alg.basis[k]
            lhs = self.blocks[b.tgt] @ self.source.act(k)
            rhs = self.target.act(k) @ self.blocks[b.src]
            if lhs != rhs:
                raise ValidationError(f"map does not commute with {b.name}")

    @classmethod
    def zero(cls, source: Module, target: Module) -> "ModuleMap":
        f = source.field
        return cls(source, target, [Mat.zeros(f, t, s) for s, t in zip(source.dims, target.dims)], check=False)

    @classmethod
    def identity(cls, m: Module) -> "ModuleMap":
        return cls(m, m, [Mat.identity(m.field, d) for d in m.dims], check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition: ``(g @ f)(x) = g(f(x))``."""
        if other.target.dims != self.source.dims:
            raise ValidationError("maps are not composable")
        return ModuleMap(other.source, self.target,
                         [a @ b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         [a + b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target,
                         [a - b for a, b in zip(self.blocks, other.blocks)], check=False)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [a.scale(c) for a in self.blocks], check=False)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.source.dims == other.source.dims
                and self.target.dims == other.target.dims and self.blocks == other.blocks)

    def __hash__(self):
        return hash(self.blocks)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks)

    def rank(self) -> int:
        return sum(m.rank() for m in self.blocks)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dims == self.target.dims and self.is_injective()

    def apply(self, v: int, vec: Sequence) -> list:
        return self.blocks[v].apply(vec)


class Subobject:
    """A submodule stored as canonical (rref) subspaces, one per vertex."""

    def __init__(self, ambient: Module, spaces, check: bool = False):
        self.ambient = ambient
        self.spaces = tuple(spaces)
        self._module = None
        self._inclusion = None
        if check:
            self.check_stable()

    @classmethod
    def span(cls, ambient: Module, vectors_by_vertex) -> "Subobject":
        """The submodule generated by the given vectors (closed under the action)."""
        f = ambient.field
        alg = ambient.algebra
        spaces = []
        for v in range(alg.num_vertices):
            spaces.append(Subspace.span(f, ambient.dims[v], vectors_by_vertex.get(v, [])))
        # close under the generators
        changed = True
        while changed:
            changed = False
            for k in alg.generators:
                b = alg.basis[k]
                src = spaces[b.src]
                if not src.dim:
                    continue
                m = ambient.act(k)
                new = [m.apply(r) for r in src.basis.rows]
                tgt = spaces[b.tgt]
                if all(tgt.contains_vector(x) for x in new):
                    continue
                spaces[b.tgt] = Subspace.span(f, ambient.dims[b.tgt], tgt.vectors() + new)
                changed = True
        return cls(ambient, spaces)

    @classmethod
    def zero(cls, ambient: Module) -> "Subobject":
        return cls(ambient, [Subspace.zero(ambient.field, d) for d in ambient.dims])

    @classmethod
    def full(cls, ambient: Module) -> "Subobject":
        return cls(ambient, [Subspace.full(ambient.field, d) for d in ambient.dims])

    @property
    def dims(self) -> tuple:
        return tuple(s.dim for s in self.spaces)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def __repr__(self):
        return f"Subobject(dims={self.dims} in {self.ambient.dims})"

    def __eq__(self, other):
        return isinstance(other, Subobject) and self.spaces == other.spaces

    def __hash__(self):
        return hash(self.spaces)

    def contains(self, other: "Subobject") -> bool:
        return all(a.contains(b) for a, b in zip(self.spaces, other.spaces))

    def __add__(self, other: "Subobject") -> "Subobject":
        return Subobject(self.ambient, [a + b for a, b in zip(self.spaces, other.spaces)])

    def __and__(self, other: "Subobject") -> "Subobject":
        return Subobject(self.ambient, [a.intersection(b) for a, b in zip(self.spaces, other.spaces)])

    def is_full(self) -> bool:
        return self.dims == self.ambient.dims

    def check_stable(self):
        alg = self.ambient.algebra
        for k in alg.generators:
            b = alg.basis[k]
            m = self.ambient.act(k)
            for r in self.spaces[b.src].basis.rows:
                if not self.spaces[b.tgt].contains_vector(m.apply(r)):
                    raise ValidationError("subspaces are not stable under the action")

    @property
    def module(self) -> Module:
        if self._module is None:
            amb = self.ambient
            alg = amb.algebra
            action = {}
            for k in alg.generators:
                b = alg.basis[k]
                m = amb.act(k)
                tgt = self.spaces[b.tgt]
                cols = [tgt.coordinates(m.apply(r)) for r in self.spaces[b.src].basis.rows]
                action[k] = Mat.from_columns(amb.field, cols, tgt.dim)
            self._module = Module(alg, self.dims, action, check=False)
        return self._module

    @property
    def inclusion(self) -> ModuleMap:
        if self._inclusion is None:
            blocks = [s.basis.T for s in self.spaces]
            self._inclusion = ModuleMap(self.module, self.ambient, blocks, check=False)
        return self._inclusion


# ---------------------------------------------------------------------------
# Kernels, images, quotients
# ---------------------------------------------------------------------------

def image_subobject(f: ModuleMap) -> Subobject:
    fld = f.source.field
    return Subobject(f.target, [Subspace.span(fld, m.nrows, m.columns()) for m in f.blocks])


def kernel_subobject(f: ModuleMap) -> Subobject:
    fld = f.source.field
    return Subobject(f.source, [Subspace.span(fld, m.ncols, kernel_vectors(m)) for m in f.blocks])


def quotient(m: Module, u: Subobject):
    """The quotient m/u with its projection; the basis is the standard complement."""
    f = m.field
    alg = m.algebra
    comps = [s.complement_indices() for s in u.spaces]
    proj_blocks = []
    for v, s in enumerate(u.spaces):
        cols = []
        for j in range(m.dims[v]):
            e = [f.zero] * m.dims[v]
            e[j] = f.one
            r = s.reduce(e)
            cols.append([r[c] for c in comps[v]])
        proj_blocks.append(Mat.from_columns(f, cols, len(comps[v])))
    action = {}
    for k in alg.generators:
        b = alg.basis[k]
        a = m.act(k)
        sel = a.select(cols=comps[b.src])
        action[k] = proj_blocks[b.tgt] @ sel
    q = Module(alg, [len(c) for c in comps], action, check=False)
    proj = ModuleMap(m, q, proj_blocks, check=False)
    proj.complements = comps
    return q, proj


def cokernel(f: ModuleMap):
    return quotient(f.target, image_subobject(f))


def preimage(f: ModuleMap, s: Subobject) -> Subobject:
    """{x : f(x) in s} as a subobject of f's source."""
    fld = f.source.field
    spaces = []
    for v, (m, sv) in enumerate(zip(f.blocks, s.spaces)):
        comp = sv.complement_indices()
        # x in preimage  <=>  reduce(m x) vanishes on the complement coordinates
        cols = [[sv.reduce(col)[c] for c in comp] for col in m.columns()]
        red = Mat.from_columns(fld, cols, len(comp)) if m.ncols else Mat.zeros(fld, len(comp), 0)
        spaces.append(Subspace.span(fld, m.ncols, kernel_vectors(red)))
    return Subobject(f.source, spaces)


def image_of_subobject(f: ModuleMap, s: Subobject) -> Subobject:
    fld = f.source.field
    spaces = []
    for m, sv in zip(f.blocks, s.spaces):
        spaces.append(Subspace.span(fld, m.nrows, [m.apply(r) for r in sv.basis.rows]))
    return Subobject(f.target, spaces)


def invert_iso(f: ModuleMap) -> ModuleMap:
    if not f.is_iso():
        raise NotIso("map is not bijective")
    return ModuleMap(f.target, f.source, [m.inverse() for m in f.blocks], check=False)


def restrict(f: ModuleMap, sub: Subobject, tgt_sub: Optional[Subobject] = None) -> ModuleMap:
    """f restricted to ``sub``, landing in ``tgt_sub`` (default: all of the target)."""
    inc = sub.inclusion
    g = f @ inc
    if tgt_sub is None:
        return g
    cols_blocks = []
    for v, m in enumerate(g.blocks):
        sp = tgt_sub.spaces[v]
        cols = []
        for col in m.columns():
            if not sp.contains_vector(col):
                raise ValidationError("image is not inside the target subobject")
            cols.append(sp.coordinates(col))
        cols_blocks.append(Mat.from_columns(f.source.field, cols, sp.dim) if cols
                           else Mat.zeros(f.source.field, sp.dim, 0))
    return ModuleMap(sub.module, tgt_sub.module, cols_blocks, check=False)


def induced_on_quotients(f: ModuleMap, proj_src: ModuleMap, proj_tgt: ModuleMap) -> ModuleMap:
    """The map src/U -> tgt/V induced by f (requires f(U) inside V)."""
    blocks = []
    for v in range(len(f.blocks)):
        comp = proj_src.complements[v]
        m = f.blocks[v].select(cols=comp)
        blocks.append(proj_tgt.blocks[v] @ m)
    return ModuleMap(proj_src.target, proj_tgt.target, blocks, check=False)


# ---------------------------------------------------------------------------
# Direct sums and standard modules
# ---------------------------------------------------------------------------

def zero_module(alg: FDAlgebra) -> Module:
    return Module(alg, [0] * alg.num_vertices, {}, check=False)


def direct_sum(mods: Sequence[Module], algebra: Optional[FDAlgebra] = None):
    """Direct sum with injections and projections."""
    mods = list(mods)
    alg = algebra if algebra is not None else mods[0].algebra
    if mods:
        _same_algebra(*mods)
    f = alg.field
    action = {}
    for k in alg.generators:
        action[k] = block_diag(f, [m.act(k) for m in mods]) if mods else None
    dims = [sum(m.dims[v] for m in mods) for v in range(alg.num_vertices)]
    if not mods:
        return zero_module(alg), [], []
    s = Module(alg, dims, action, check=False)
    incs, projs = [], []
    for a, m in enumerate(mods):
        ib, pb = [], []
        for v in range(alg.num_vertices):
            sizes = [x.dims[v] for x in mods]
            ib.append(block_matrix(f, {(a, 0): Mat.identity(f, m.dims[v])}, sizes, [m.dims[v]]))
            pb.append(block_matrix(f, {(0, a): Mat.identity(f, m.dims[v])}, [m.dims[v]], sizes))
        incs.append(ModuleMap(m, s, ib, check=False))
        projs.append(ModuleMap(s, m, pb, check=False))
    return s, incs, projs


def simple_module(alg: FDAlgebra, v) -> Module:
    v = alg.vertex_index(v)
    dims = [0] * alg.num_vertices
    dims[v] = 1
    return Module(alg, dims, {}, name=f"S_{alg.vertex_names[v]}", check=False)


class ProjectiveModule(Module):
    """A direct sum of indecomposable-idempotent projectives A e_i.

    Coordinates at vertex w are pairs (summand a, basis index k) with k in the
    block (summands[a] -> w); the generator of summand a is its idempotent.
    """

    def __init__(self, algebra: FDAlgebra, summands: Sequence[int], name: str = ""):
        self.summands = tuple(summands)
        coords = [[] for _ in range(algebra.num_vertices)]
        for a, i in enumerate(self.summands):
            for w in range(algebra.num_vertices):
                for k in algebra.block(i, w):
                    coords[w].append((a, k))
        self.coords = coords
        self.position = [{ak: n for n, ak in enumerate(c)} for c in coords]
        f = algebra.field
        action = {}
        for g in algebra.generators:
            b = algebra.basis[g]
            rows = [[f.zero] * len(coords[b.src]) for _ in range(len(coords[b.tgt]))]
            for col, (a, k) in enumerate(coords[b.src]):
                for k2, c in algebra.mul_basis(g, k):
                    rows[self.position[b.tgt][(a, k2)]][col] += c
            action[g] = Mat(f, len(coords[b.tgt]), len(coords[b.src]), rows)
        super().__init__(algebra, [len(c) for c in coords], action, name=name, check=False)

    def generator(self, a: int):
        """(vertex, vector) of the a-th generator."""
        i = self.summands[a]
        alg = self.algebra
        vec = [alg.field.zero] * self.dims[i]
        vec[self.position[i][(a, alg.idempotents[i])]] = alg.field.one
        return i, vec

    def generator_images(self, f: ModuleMap) -> list:
        out = []
        for a in range(len(self.summands)):
            i, vec = self.generator(a)
            out.append(f.apply(i, vec))
        return out

    def element_coordinates(self, w: int, vec: Sequence):
        """Split a vector at vertex w into (summand, basis index, coefficient) triples."""
        return [(a, k, c) for (a, k), c in zip(self.coords[w], vec) if c]


def map_from_generators(p: ProjectiveModule, target: Module, images: Sequence) -> ModuleMap:
    """The unique map sending the a-th generator of p to ``images[a]``."""
    _same_algebra(p, target)
    f = p.field
    blocks = []
    for w in range(p.algebra.num_vertices):
        cols = []
        for a, k in p.coords[w]:
            cols.append(target.act(k).apply(images[a]))
        blocks.append(Mat.from_columns(f, cols, target.dims[w]) if cols
                      else Mat.zeros(f, target.dims[w], 0))
    return ModuleMap(p, target, blocks, check=False)


def projective_module(alg: FDAlgebra, v) -> ProjectiveModule:
    v = alg.vertex_index(v)
    return ProjectiveModule(alg, [v], name=f"P_{alg.vertex_names[v]}")


def free_module(alg: FDAlgebra, n: int = 1) -> ProjectiveModule:
    return ProjectiveModule(alg, [v for _ in range(n) for v in range(alg.num_vertices)], name="A")


def dual(m: Module) -> Module:
    """The k-dual D(m) = Hom_k(m, k), a module over the opposite algebra."""
    alg = m.algebra
    op = alg.opposite()
    action = {alg.opposite_generator(k): m.act(k).T for k in alg.generators}
    name = f"D({m.name})" if m.name else ""
    return Module(op, m.dims, action, name=name, check=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual(f.target), dual(f.source), [b.T for b in f.blocks], check=False)


def injective_module(alg: FDAlgebra, v) -> Module:
    v = alg.vertex_index(v)
    i = dual(projective_module(alg.opposite(), v))
    i.name = f"I_{alg.vertex_names[v]}"
    # dual() of an op-module lands back on alg itself
    assert i.algebra is alg
    return i


def regular_module(alg: FDAlgebra) -> ProjectiveModule:
    return ProjectiveModule(alg, range(alg.num_vertices), name="A")


def dual_regular(alg: FDAlgebra) -> list:
    """The indecomposable injectives I_v, whose sum is DA."""
    return [injective_module(alg, v) for v in range(alg.num_vertices)]


# ---------------------------------------------------------------------------
# Hom spaces, traces, radical/socle/top
# ---------------------------------------------------------------------------

def hom_system(m: Module, n: Module):
    """Coefficient matrix of the intertwining equations, and the unknown layout."""
    alg = _same_algebra(m, n)
    f = alg.field
    p = f.p
    offs = []
    total = 0
    for v in range(alg.num_vertices):
        offs.append(total)
        total += m.dims[v] * n.dims[v]
    rows = []
    for k in alg.generators:
        b = alg.basis[k]
        s, t = b.src, b.tgt
        ms, mt, ns, nt = m.dims[s], m.dims[t], n.dims[s], n.dims[t]
        if not ms or not nt:
            continue
        a = m.act(k).rows  # mt x ms
        c = n.act(k).rows  # nt x ns
        for i in range(nt):
            for j in range(ms):
                row = {}
                # sum_l f_t[i][l] * a[l][j]
                for l in range(mt):
                    x = a[l][j]
                    if x:
                        idx = offs[t] + i * mt + l
                        row[idx] = row.get(idx, 0) + x
                # - sum_l c[i][l] * f_s[l][j]
                for l in range(ns):
                    x = c[i][l]
                    if x:
                        idx = offs[s] + l * ms + j
                        row[idx] = row.get(idx, 0) - x
                if row:
                    dense = [f.zero] * total
                    for idx, x in row.items():
                        dense[idx] = x % p if p else x
                    if any(dense):
                        rows.append(dense)
    return rows, offs, total


def hom_basis(m: Module, n: Module) -> list:
    """A basis of Hom(m, n) as module maps."""
    alg = _same_algebra(m, n)
    f = alg.field
    rows, offs, total = hom_system(m, n)
    if total == 0:
        return []
    red, pivots = rref_rows(f, rows, total)
    sols = _kernel_vectors(f, red, pivots, total)
    maps = []
    for x in sols:
        blocks = []
        for v in range(alg.num_vertices):
            r, c = n.dims[v], m.dims[v]
            o = offs[v]
            blocks.append(Mat(f, r, c, [x[o + i * c: o + (i + 1) * c] for i in range(r)]))
        maps.append(ModuleMap(m, n, blocks, check=False))
    return maps


def hom_dimension(m: Module, n: Module) -> int:
    rows, offs, total = hom_system(m, n)
    red, _ = rref_rows(m.field, rows, total)
    return total - len(red)


def sum_of_images(target: Module, maps: Sequence[ModuleMap]) -> Subobject:
    f = target.field
    spaces = []
    for v in range(target.algebra.num_vertices):
        cols = []
        for g in maps:
            cols.extend(g.blocks[v].columns())
        spaces.append(Subspace.span(f, target.dims[v], cols))
    return Subobject(target, spaces)


def trace_of(t, x: Module) -> Subobject:
    """Trace of t (a module or a list of modules) in x: the sum of all images."""
    ts = t if isinstance(t, (list, tuple)) else [t]
    maps = []
    for ti in ts:
        maps.extend(hom_basis(ti, x))
    return sum_of_images(x, maps)


def radical(m: Module) -> Subobject:
    """rad(A) m, spanned by the images of the radical basis."""
    alg = m.algebra
    f = m.field
    cols = {v: [] for v in range(alg.num_vertices)}
    if alg.kind == "path":
        for k in alg.generators:
            b = alg.basis[k]
            cols[b.tgt].extend(m.act(k).columns())
    else:
        for s, t, vec in alg.radical_basis():
            if m.dims[s] and m.dims[t]:
                cols[t].extend(m.act_vector(vec, s, t).columns())
    return Subobject(m, [Subspace.span(f, m.dims[v], cols[v]) for v in range(alg.num_vertices)])


def socle(m: Module) -> Subobject:
    """Elements killed by the radical."""
    alg = m.algebra
    f = m.field
    stacks = {v: [] for v in range(alg.num_vertices)}
    if alg.kind == "path":
        for k in alg.generators:
            b = alg.basis[k]
            stacks[b.src].extend(m.act(k).rows)
    else:
        for s, t, vec in alg.radical_basis():
            if m.dims[s] and m.dims[t]:
                stacks[s].extend(m.act_vector(vec, s, t).rows)
    spaces = []
    for v in range(alg.num_vertices):
        mat = Mat(f, len(stacks[v]), m.dims[v], stacks[v])
        spaces.append(Subspace.span(f, m.dims[v], kernel_vectors(mat)))
    return Subobject(m, spaces)


def top(m: Module):
    """m / rad m with its projection."""
    return quotient(m, radical(m))


def top_generators(m: Module) -> list:
    """Vectors (vertex, vector) lifting a basis of the top; a minimal generating set."""
    rad = radical(m)
    f = m.field
    gens = []
    for v, s in enumerate(rad.spaces):
        for c in s.complement_indices():
            vec = [f.zero] * m.dims[v]
            vec[c] = f.one
            gens.append((v, vec))
    return gens


def socle_top_radical(m: Module) -> dict:
    t, proj = top(m)
    return {"socle": socle(m), "radical": radical(m), "top": t, "top_projection": proj}


def projective_cover(m: Module):
    """(P, epi P -> m) with P a sum of A e_i over a minimal generating set."""
    gens = top_generators(m)
    p = ProjectiveModule(m.algebra, [v for v, _ in gens])
    return p, map_from_generators(p, m, [vec for _, vec in gens])


def find_isomorphism(m: Module, n: Module, rng: Optional[random.Random] = None,
                     tries: int = 8) -> Optional[ModuleMap]:
    """An isomorphism m -> n, or None.

    Random combinations of a Hom basis; over Q a miss has negligible
    probability (isomorphisms form a nonempty Zariski-open set).
    """
    if m.dims != n.dims:
        return None
    if m.dim == 0:
        return ModuleMap.zero(m, n)
    basis = hom_basis(m, n)
    if not basis:
        return None
    rng = rng or random.Random(0x5eed)
    f = m.field
    bound = 1000 if not f.p else f.p
    if f.p:
        tries = max(tries, 40)
    for _ in range(tries):
        coeffs = [f(rng.randint(-bound, bound)) for _ in basis]
        g = ModuleMap.zero(m, n)
        for c, h in zip(coeffs, basis):
            if c:
                g = g + h.scale(c)
        if g.is_iso():
            return g
    return None


def is_isomorphic(m: Module, n: Module) -> bool:
    return find_isomorphism(m, n) is not None


def random_projective_map(alg: FDAlgebra, rng: random.Random, src_summands, tgt_summands,
                          bound: int = 2) -> ModuleMap:
    p = ProjectiveModule(alg, src_summands)
    q = ProjectiveModule(alg, tgt_summands)
    f = alg.field
    images = []
    for a, s in enumerate(p.summands):
        images.append([f.random_element(rng, bound) for _ in range(q.dims[s])])
    return map_from_generators(p, q, images)


def random_module(alg: FDAlgebra, rng: random.Random, max_top: int = 3, max_rel: int = 3,
                  bound: int = 2) -> Module:
    """Cokernel of a random map between sums of indecomposable projectives."""
    n = alg.num_vertices
    top_s = [rng.randrange(n) for _ in range(rng.randint(1, max_top))]
    rel_s = [rng.randrange(n) for _ in range(rng.randint(0, max_rel))]
    g = random_projective_map(alg, rng, rel_s, top_s, bound)
    m, _ = cokernel(g)
    return m


def random_map(m: Module, n: Module, rng: random.Random, bound: int = 2) -> ModuleMap:
    """A random combination of a Hom basis (zero if Hom vanishes)."""
    basis = hom_basis(m, n)
    g = ModuleMap.zero(m, n)
    for h in basis:
        c = m.field.random_element(rng, bound)
        if c:
            g = g + h.scale(c)
    return g
